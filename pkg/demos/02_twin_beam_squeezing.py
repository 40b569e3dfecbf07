"""Two-mode squeezing of the inner sideband pair below threshold.

Below threshold the inner pair behaves as a textbook nondegenerate
parametric amplifier: the output noise of the joint quadrature Y_s1 + Y_i1
drops below the two-unit shot-noise level while Y_s1 - Y_i1 is
antisqueezed.  The computed spectra fall exactly on the analytic
parametric-amplifier curves.

Run:  python demos/02_twin_beam_squeezing.py
Writes demos/out/twin_beam_squeezing.png
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from kerrcomb import (
    CombinationCoeffs,
    RateParams,
    linear_model,
    output_variance,
    spectrum_grid,
    steady_state,
)

GAMMA, G = 4.02e5, 2.21e-4
rates = RateParams.from_ratio(GAMMA, 1.0, G, epsilon_ratio=0.8)
lm = linear_model(rates)
chi = rates.g * steady_state(rates).a_p ** 2 / rates.gamma
print(f"parametric gain parameter chi = {chi:.3f} (threshold at chi = 1)")

ratios = np.linspace(0.0, 4.0, 401)
grid = spectrum_grid(lm, ratios * rates.gamma)
y_sum = CombinationCoeffs(cx=np.zeros(5), cy=np.array([0.0, 1, 1, 0, 0]))
y_diff = CombinationCoeffs(cx=np.zeros(5), cy=np.array([0.0, 1, -1, 0, 0]))
v_sum = [output_variance(qs, y_sum, rates.gammac) for qs in grid]
v_diff = [output_variance(qs, y_diff, rates.gammac) for qs in grid]

analytic_sq = 2 * (1 - 4 * chi / ((1 + chi) ** 2 + ratios**2))
analytic_anti = 2 * (1 + 4 * chi / ((1 - chi) ** 2 + ratios**2))
print(f"max |computed - analytic| (squeezed arm): {np.abs(v_sum - analytic_sq).max():.2e}")

fig, ax = plt.subplots(figsize=(6.4, 4.2))
ax.semilogy(ratios, v_sum, label=r"$V(Y_{s1}+Y_{i1})$ squeezed")
ax.semilogy(ratios, v_diff, label=r"$V(Y_{s1}-Y_{i1})$ antisqueezed")
ax.semilogy(ratios, analytic_sq, "k:", lw=1, label="analytic")
ax.semilogy(ratios, analytic_anti, "k:", lw=1)
ax.axhline(2.0, color="gray", ls="--", lw=1, label="shot noise (2 units)")
ax.set_xlabel(r"analysis frequency $\omega/\gamma$")
ax.set_ylabel("output noise variance")
ax.legend()
ax.set_title(f"Twin-beam squeezing below threshold ($\\chi$ = {chi:.2f})")
fig.tight_layout()

os.makedirs("demos/out", exist_ok=True)
fig.savefig("demos/out/twin_beam_squeezing.png", dpi=150)
print("wrote demos/out/twin_beam_squeezing.png")
