# %% [markdown]
# # Per-user rate against transmit power, for several phase-noise levels

# %%
import numpy as np

from doubleris import SystemConfig
from doubleris.experiments import SweepSpec, run_sweep

grid = tuple(range(0, 31, 5))
curves = {}
for kappa in (0, 2, 4, 10):
    rows = run_sweep(SweepSpec("total_power_dbm", grid, SystemConfig.default(kappa=kappa)))
    curves[kappa] = np.array([r.rate_closed_form for r in rows if r.user_index == 0])
    print(f"kappa = {kappa:2d}: " + " ".join(f"{v:5.2f}" for v in curves[kappa]))

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    for kappa, y in curves.items():
        plt.plot(grid, y, marker="o", label=f"kappa = {kappa}")
    plt.xlabel("total transmit power [dBm]")
    plt.ylabel("user 1 rate [bit/s/Hz]")
    plt.legend()
    plt.savefig("power_sweep.png", dpi=120)
