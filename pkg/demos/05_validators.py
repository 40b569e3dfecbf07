"""Self-validation: every analytic shortcut against its brute-force twin.

Runs the full validator bundle at the headline operating point and at a
below-threshold point: steady-state residual, finite-difference Jacobian,
stability, noise factorization, the Lyapunov/spectral-integral
cross-check, and the grid-search guard on the closed-form gain optimizer.
Also demonstrates the damping-rescale invariance (the witness traces
depend only on omega/gamma, the pump-to-threshold ratio and the coupling
fraction) together with its negative control.

Run:  python demos/05_validators.py
"""

from kerrcomb import RateParams, scaling_check, validate_model

GAMMA, G = 4.02e5, 2.21e-4

for label, eps_ratio in (("headline (1.15x threshold)", 1.15), ("below threshold (0.8x)", 0.8)):
    print(f"\n== {label} ==")
    rates = RateParams.from_ratio(GAMMA, 1.0, G, epsilon_ratio=eps_ratio)
    for report in validate_model(rates):
        print("  " + report.row())

print("\n== damping-rescale invariance ==")
base = RateParams.from_ratio(GAMMA, 1.0, G, epsilon_ratio=1.15)
print("  " + scaling_check(base, 2.0).row())
print("  " + scaling_check(base, 2.0, preserve_pump_ratio=False).row() + "  <- negative control")
