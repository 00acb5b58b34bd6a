# %% [markdown]
# # Sum rate against BS correlation for two array sizes

# %%
import numpy as np

from doubleris import SystemConfig
from doubleris.experiments import SweepSpec, run_sweep

grid = tuple(np.round(np.arange(0.0, 0.91, 0.1), 2))
for M in (16, 64):
    rows = run_sweep(SweepSpec("rho_magnitude", grid, SystemConfig.default(M=M)))
    sums = np.array([sum(r.rate_closed_form for r in rows if r.sweep_value == g) for g in grid])
    print(f"M = {M:2d}: " + " ".join(f"{v:6.2f}" for v in sums))

# %% [markdown]
# More antennas lift the whole curve, and stronger BS correlation always
# costs rate: with MRT it raises the interference term tr(R_B^2).
