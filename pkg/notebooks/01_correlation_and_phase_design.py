# %% [markdown]
# # Surface correlation and the equal-phase design
#
# How much correlation energy each surface holds, and why giving every
# element the same phase is the best a statistical-CSI design can do.

# %%
import numpy as np

from doubleris import SystemConfig, build_correlation_set, optimal_phase_config, random_phase_config
from doubleris.correlation import phase_weighted_trace
from doubleris.rbd import evaluate_design, rbd_check

config = SystemConfig.default()
corr = build_correlation_set(config)
print(f"N = {config.N1}, tr(R^2) = {corr.tr_R1_2:.1f}  (uncorrelated would give {config.N1})")

# %% [markdown]
# Shrinking the element spacing packs the same number of elements closer
# together, so the correlation energy grows.

# %%
for eps in (0.05, 0.025, 0.0125):
    c = config.with_element_spacing(eps)
    print(f"spacing {eps:.4f} m -> tr(R^2) = {build_correlation_set(c).tr_R1_2:8.1f}")

# %% [markdown]
# Random phases against the equal-phase design.

# %%
best = evaluate_design(config, corr, optimal_phase_config(config.N1, config.N2))
v = [phase_weighted_trace(corr.R_1, random_phase_config(config.N1, config.N2, s).theta_1)
     for s in range(200)]
print(f"equal phases: v1 = {best.v1:.1f}, sum rate {best.sum_rate:.3f} bit/s/Hz")
print(f"random:       v1 in [{min(v):.1f}, {max(v):.1f}]")

check = rbd_check(config, corr, samples=1000)
print(f"1000 random designs, best sum rate {check.best_random_sum_rate:.3f}; passed = {check.passed}")
