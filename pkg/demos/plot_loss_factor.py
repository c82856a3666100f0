"""
Capacity loss from fading, as a function of the power-control exponent
======================================================================

The loss factor ``L(s)`` measures how much transmission capacity Rayleigh
fading costs relative to a network without fading. ``s = 0`` is constant
power, ``s = 1`` full channel inversion; both end up at the same value and
the half-way exponent does best for every path-loss exponent.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from fpclab import Rayleigh, loss_factor_fpc

s = np.linspace(0.0, 1.0, 101)

# %%
# One curve per path-loss exponent. Small exponents (alpha near 2) suffer
# most without power control, because E[H^-delta] approaches E[1/H], which
# is infinite for Rayleigh fading.
fig, ax = plt.subplots(figsize=(5, 3.5))
for alpha in (2.1, 3.0, 4.0):
    L = [loss_factor_fpc(x, Rayleigh(), 2 / alpha) for x in s]
    ax.plot(s, L, label=f"alpha = {alpha}")
    print(f"alpha={alpha}: L(0)={L[0]:.4f}  L(0.5)={L[50]:.4f}  gain {L[50] / L[0]:.2f}x")

ax.set_xlabel("power-control exponent s")
ax.set_ylabel("loss factor L")
ax.legend()
fig.tight_layout()
fig.savefig("loss_factor.png", dpi=120)
