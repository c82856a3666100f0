"""
Best exponent as the network gets denser
========================================

In sparse networks the nearest interferer dominates and the half-way
exponent is close to optimal. As density grows, outages come from the sum
of many interferers; boosting your own weak links then mostly adds
interference for everybody else, and the best exponent moves toward
constant power.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from fpclab import NetworkParams, ObjectiveSpec, Rayleigh, optimal_exponent, robustness_band

densities = np.logspace(-5, -3, 5)

# %%
# The lower bound is quick to optimise, with a 1% and a 10% tolerance band
# around the optimum. The simulated optimum uses a coarse grid and shared
# random draws across exponents.
bound = ObjectiveSpec(method="lower_bound")
simulated = ObjectiveSpec(method="simulated", grid_step=0.1, n_trials=40_000, master_seed=3)

rows = []
for lam in densities:
    params = NetworkParams(lam=lam)
    opt = optimal_exponent(bound, params, Rayleigh())
    band = robustness_band(bound, params, Rayleigh(), 10.0, opt)
    sim = optimal_exponent(simulated, params, Rayleigh())
    rows.append((lam, opt.s_star, band.s_lo, band.s_hi, sim.s_star))
    print("lambda=%.1e  s*(bound)=%.3f  10%% band=[%.3f, %.3f]  s*(simulated)=%.2f" % rows[-1])

rows = np.array(rows)
fig, ax = plt.subplots(figsize=(5, 3.5))
ax.fill_between(rows[:, 0], rows[:, 2], rows[:, 3], alpha=0.2, label="10% band (bound)")
ax.plot(rows[:, 0], rows[:, 1], label="s* (lower bound)")
ax.plot(rows[:, 0], rows[:, 4], "o--", label="s* (simulated)")
ax.set_xscale("log")
ax.set_xlabel("density lambda [1/m^2]")
ax.set_ylabel("optimal exponent")
ax.legend()
fig.tight_layout()
fig.savefig("optimal_exponent_vs_density.png", dpi=120)
