"""Classical steady states of the five-mode comb versus pump amplitude.

Below the oscillation threshold only the pump mode is occupied; above it
the two sideband pairs switch on with the closed-form amplitudes, which we
verify here against the full nonlinear equations of motion at every point.

Run:  python demos/01_threshold_and_steady_states.py
Writes demos/out/steady_states.png
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from kerrcomb import RateParams, pump_threshold, steady_state, steady_state_residual

GAMMA = 4.02e5  # total damping rate, 1/s
G = 2.21e-4  # nonlinear coupling rate, 1/s

rates0 = RateParams.from_ratio(GAMMA, 1.0, G, epsilon_ratio=1.0)
eps_th = pump_threshold(rates0)
print(f"pump threshold: {eps_th:.4e} 1/s (1.15x threshold = {1.15 * eps_th:.4e})")

ratios = np.linspace(0.0, 1.6, 321)
a_p, a_a, a_b, worst = [], [], [], 0.0
for r in ratios:
    rates = RateParams.from_ratio(GAMMA, 1.0, G, epsilon_ratio=float(r))
    ss = steady_state(rates)
    a_p.append(ss.a_p)
    a_a.append(ss.a_a)
    a_b.append(ss.a_b)
    worst = max(worst, steady_state_residual(rates, ss))
print(f"worst drift-vector residual over the scan: {worst:.2e} (bound 1e-8)")

fig, ax = plt.subplots(figsize=(6.4, 4.2))
ax.plot(ratios, a_p, label="pump $A_p$")
ax.plot(ratios, a_a, label="inner sidebands $A_a$")
ax.plot(ratios, a_b, label="outer sidebands $A_b$")
ax.axvline(1.0, color="gray", ls=":", lw=1, label="threshold")
ax.set_xlabel(r"pump amplitude $\epsilon/\epsilon_{\rm th}$")
ax.set_ylabel("steady-state amplitude")
ax.legend()
ax.set_title("Sidebands switch on at threshold")
fig.tight_layout()

os.makedirs("demos/out", exist_ok=True)
fig.savefig("demos/out/steady_states.png", dpi=150)
print("wrote demos/out/steady_states.png")
