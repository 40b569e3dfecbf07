"""Brute-force validators for every analytic shortcut in the package.

Each validator recomputes a quantity by an independent route and reports
the discrepancy:

* :func:`numeric_jacobian` checks the analytic drift matrix by central
  finite differences of the drift vector.
* :func:`lyapunov_covariance` solves the stationary covariance equation
  ``M V + V M.T + D = 0`` by dense Kronecker vectorization; the spectral
  integral :func:`spectrum_integral` must reproduce it.
* :func:`grid_search_gains` re-optimizes witness gains by exhaustive search
  plus derivative-free refinement, guarding the closed-form optimizer.

These live in the shipped library (not only in the tests) so any operating
point can be self-validated; :func:`validate_model` bundles them for the
command-line ``validate`` subcommand.

Marginal phase mode: above threshold the drift matrix has one exact zero
eigenvalue, so the Lyapunov system is singular (the free phase diffuses
without bound) and the spectral integral diverges in the same direction.
:func:`lyapunov_covariance` then removes the rank-one inconsistent
component of ``D`` (which only affects the ill-defined phase-variance
entry) and solves the consistent remainder; :func:`lyapunov_crosscheck`
compares integral and covariance after projecting both onto the damped
subspace, where the stationary identity is well defined.  For a strictly
stable drift matrix the projector is the identity and the comparison is the
plain entrywise one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnstableModelError
from .linearize import (
    LinearModel,
    drift_matrix,
    drift_vector,
    linear_model,
    noise_factor,
    stability,
    steady_field,
)
from .model import RateParams, SteadyState, steady_state, steady_state_residual
from .spectra import QuadratureSpectrum, _quadrature_batch, _spectral_batch
from .vlf import FREE_MODES, optimize_gains, vlf_value

#: |Re eigenvalue| below this fraction of the matrix scale counts as marginal.
_MARGINAL_TOL_RATIO = 1e-9


@dataclass(frozen=True)
class OracleReport:
    """Outcome of one validator run."""

    name: str
    max_abs_error: float
    max_rel_error: float
    passed: bool
    details: str = ""

    def row(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (
            f"{self.name:<24s} {status:<5s} abs={self.max_abs_error:.3e} "
            f"rel={self.max_rel_error:.3e}  {self.details}"
        )


def numeric_jacobian(rates: RateParams, ss: SteadyState) -> np.ndarray:
    """Finite-difference Jacobian of the drift vector at a steady state.

    Central differences with independent perturbations of each of the 10
    phase-space variables; step ``1e-6 * max(1, A_p)``.
    """
    base = steady_field(ss)
    step = 1e-6 * max(1.0, ss.a_p)
    jac = np.zeros((10, 10), dtype=complex)
    for j in range(10):
        bump = np.zeros(10, dtype=complex)
        bump[j] = step
        jac[:, j] = (drift_vector(rates, base + bump) - drift_vector(rates, base - bump)) / (
            2.0 * step
        )
    return jac


def _marginal_split(drift: np.ndarray):
    """Eigen-split of a drift matrix into damped and marginal parts.

    Returns ``(eigvals, right, left_rows, marginal_mask)`` where
    ``left_rows = inv(right)``.  Raises :class:`UnstableModelError` when any
    eigenvalue real part is strictly positive beyond tolerance.
    """
    drift = np.asarray(drift, dtype=complex)
    scale = max(float(np.abs(drift).max()), 1e-300)
    tol = _MARGINAL_TOL_RATIO * scale
    eigvals, right = np.linalg.eig(drift)
    if eigvals.real.max() > tol:
        raise UnstableModelError(
            f"drift matrix is unstable: max Re eigenvalue = {eigvals.real.max():.6e}"
        )
    marginal = np.abs(eigvals.real) <= tol
    left_rows = np.linalg.inv(right)
    return eigvals, right, left_rows, marginal


def damped_projector(drift: np.ndarray) -> np.ndarray:
    """Spectral projector onto the damped (strictly decaying) subspace.

    Identity when the drift matrix is strictly stable; otherwise the
    oblique projector annihilating the marginal eigenvectors.
    """
    _, right, left_rows, marginal = _marginal_split(drift)
    proj = np.eye(drift.shape[0], dtype=complex)
    if marginal.any():
        proj -= right[:, marginal] @ left_rows[marginal, :]
    return proj


def lyapunov_covariance(drift: np.ndarray, diffusion: np.ndarray) -> np.ndarray:
    """Stationary covariance ``V`` with ``M V + V M.T + D = 0``.

    Dense Kronecker-vectorized solve (100x100 at dimension 10).  With a
    marginal zero mode the equation is inconsistent in exactly one rank-one
    direction; that component of ``D`` is removed (it only feeds the
    unbounded phase variance, whose entry in ``V`` is then set by the
    minimum-norm solution) and the consistent remainder is solved exactly.

    Raises
    ------
    UnstableModelError
        If the drift matrix has a strictly growing mode.
    """
    m = np.asarray(drift, dtype=complex)
    d = np.asarray(diffusion, dtype=complex)
    n = m.shape[0]
    eigvals, right, left_rows, marginal = _marginal_split(m)
    kron = np.kron(np.eye(n), m) + np.kron(m, np.eye(n))
    if not marginal.any():
        return np.linalg.solve(kron, -d.reshape(-1)).reshape(n, n)
    if marginal.sum() != 1:
        raise UnstableModelError(
            f"expected at most one marginal mode, found {int(marginal.sum())}"
        )
    k0 = int(np.where(marginal)[0][0])
    v0 = right[:, k0]
    u0 = left_rows[k0, :]  # left eigenvector, normalized so u0 @ v0 = 1
    # remove the inconsistent rank-one component; v0 v0^T maps to a single
    # eigen-coordinate so only the ill-defined phase-variance entry changes
    c = (u0 @ d @ u0) / (u0 @ v0) ** 2
    d_consistent = d - c * np.outer(v0, v0)
    solution = np.linalg.lstsq(kron, -d_consistent.reshape(-1), rcond=1e-12)[0]
    return solution.reshape(n, n)


def spectrum_integral(lm: LinearModel, half_width: float, points: int) -> np.ndarray:
    """Trapezoidal ``(1/2pi) * integral of S(omega)`` over ``[-W, W]``.

    The grid is symmetric and even-sized so it never contains ``omega = 0``
    (singular above threshold) and odd-in-frequency integrand parts cancel
    pairwise; an odd ``points`` request is bumped by one.
    """
    if half_width <= 0:
        raise ValueError("half_width must be positive")
    if points < 2:
        raise ValueError("points must be at least 2")
    if points % 2 == 1:
        points += 1
    omegas = np.linspace(-half_width, half_width, points)
    s = _spectral_batch(lm, omegas)
    return np.trapezoid(s, omegas, axis=0) / (2.0 * np.pi)


def _fit_quadratic_step(objective, center: np.ndarray, h: float):
    """One Newton step from a least-squares quadratic fit of sampled values.

    Thirteen samples (center, axis steps, pair steps) determine the ten
    coefficients of a full quadratic in three variables; the fitted
    stationary point is exact for an exactly quadratic objective.
    """
    points = [center.copy()]
    for j in range(3):
        for sign in (-h, h):
            p = center.copy()
            p[j] += sign
            points.append(p)
    for a, b in ((0, 1), (0, 2), (1, 2)):
        p = center.copy()
        p[a] += h
        p[b] += h
        points.append(p)
    pts = np.array(points)
    fvals = np.array([objective(p) for p in pts])
    design = np.column_stack(
        [
            np.ones(len(pts)),
            pts,
            pts**2,
            pts[:, 0] * pts[:, 1],
            pts[:, 0] * pts[:, 2],
            pts[:, 1] * pts[:, 2],
        ]
    )
    coef = np.linalg.lstsq(design, fvals, rcond=None)[0]
    lin = coef[1:4]
    hess = np.diag(2.0 * coef[4:7])
    hess[0, 1] = hess[1, 0] = coef[7]
    hess[0, 2] = hess[2, 0] = coef[8]
    hess[1, 2] = hess[2, 1] = coef[9]
    try:
        step_to = np.linalg.solve(hess, -lin)
    except np.linalg.LinAlgError:
        step_to = np.linalg.lstsq(hess, -lin, rcond=None)[0]
    return step_to


def grid_search_gains(
    qs: QuadratureSpectrum,
    index: int,
    gammac: float,
    gain_range: float = 3.0,
    steps: int = 13,
) -> tuple[dict, float]:
    """Witness-gain optimum by exhaustive grid plus value-fit refinement.

    Evaluates :func:`vlf_value` on a ``steps**3`` grid over
    ``[-gain_range, gain_range]^3``, then polishes the best point with
    Newton steps taken from least-squares quadratic fits of sampled values
    (exact for the quadratic objective, robust in the ill-conditioned
    near-zero-frequency valleys where per-coordinate descent stalls).  Uses
    function values only; never touches the closed-form optimizer's
    Hessian.  A polish step is kept only if it lowers the sampled value.
    """
    modes = FREE_MODES[index]
    axis = np.linspace(-gain_range, gain_range, steps)
    grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)

    def objective(gvec):
        return vlf_value(qs, index, dict(zip(modes, gvec)), gammac)

    values = np.array([objective(g) for g in grid])
    best = int(values.argmin())
    gains, value = grid[best].copy(), float(values[best])
    for h in (1.0, 1e-2 * (1.0 + np.abs(gains).max())):
        candidate = _fit_quadratic_step(objective, gains, h)
        candidate_value = objective(candidate)
        if candidate_value < value:
            gains, value = candidate, float(candidate_value)
    return dict(zip(modes, (float(x) for x in gains))), value


def lyapunov_crosscheck(
    lm: LinearModel, half_width: float | None = None, points: int = 20000
) -> OracleReport:
    """Compare the spectral integral against the Lyapunov covariance.

    Both sides are projected onto the damped subspace before the entrywise
    comparison (a no-op for a strictly stable model); the error is measured
    relative to the max-norm of the projected covariance.  Passes at 1%,
    which is dominated by the integration-window truncation.
    """
    if half_width is None:
        half_width = 200.0 * lm.rates.gamma
    cov = lyapunov_covariance(lm.drift, lm.diffusion)
    integral = spectrum_integral(lm, half_width, points)
    proj = damped_projector(lm.drift)
    ref = proj @ cov @ proj.T
    diff = proj @ integral @ proj.T - ref
    max_abs = float(np.abs(diff).max())
    max_rel = max_abs / float(np.abs(ref).max())
    return OracleReport(
        name="lyapunov_crosscheck",
        max_abs_error=max_abs,
        max_rel_error=max_rel,
        passed=max_rel <= 0.01,
        details=f"half_width={half_width:.3e}, points={points}",
    )


def jacobian_check(rates: RateParams, ss: SteadyState) -> OracleReport:
    """Analytic drift matrix vs central finite differences (1e-6 relative)."""
    analytic = drift_matrix(rates, ss)
    numeric = numeric_jacobian(rates, ss)
    max_abs = float(np.abs(analytic - numeric).max())
    max_rel = max_abs / float(np.abs(analytic).max())
    return OracleReport(
        name="jacobian_check",
        max_abs_error=max_abs,
        max_rel_error=max_rel,
        passed=max_rel <= 1e-6,
    )


def noise_factor_check(lm: LinearModel) -> OracleReport:
    """Residual of the noise factorization ``B @ B.T = D``."""
    b = noise_factor(lm.diffusion)
    residual = float(np.abs(b @ b.T - lm.diffusion).max())
    bound = 1e-10 * (1.0 + float(np.abs(lm.diffusion).max()))
    return OracleReport(
        name="noise_factor_check",
        max_abs_error=residual,
        max_rel_error=residual / bound * 1e-10,
        passed=residual <= bound,
    )


def steady_state_check(rates: RateParams) -> OracleReport:
    """Closed-form steady state against the full drift vector (1e-8)."""
    residual = steady_state_residual(rates, steady_state(rates))
    return OracleReport(
        name="steady_state_check",
        max_abs_error=residual,
        max_rel_error=residual,
        passed=residual <= 1e-8,
    )


def gain_optimizer_check(
    lm: LinearModel, omega_ratios=(0.3, 1.0, 2.5), tol: float = 1e-6
) -> OracleReport:
    """Closed-form gain optimum vs grid search at a few frequencies."""
    worst = 0.0
    gamma = lm.rates.gamma
    sq = _quadrature_batch(_spectral_batch(lm, np.asarray(omega_ratios) * gamma))
    for i, ratio in enumerate(omega_ratios):
        qs = QuadratureSpectrum(omega=ratio * gamma, sq=sq[i])
        for index in range(1, 5):
            _, closed = optimize_gains(qs, index, lm.rates.gammac)
            _, searched = grid_search_gains(qs, index, lm.rates.gammac)
            worst = max(worst, abs(closed - searched))
    return OracleReport(
        name="gain_optimizer_check",
        max_abs_error=worst,
        max_rel_error=worst / 4.0,
        passed=worst <= tol,
        details=f"omega/gamma={tuple(omega_ratios)}",
    )


def validate_model(rates: RateParams) -> list[OracleReport]:
    """Run every oracle at one operating point (the ``validate`` subcommand)."""
    reports = [steady_state_check(rates)]
    ss = steady_state(rates)
    reports.append(jacobian_check(rates, ss))
    lm = linear_model(rates)
    report = stability(lm.drift, rates.gamma)
    reports.append(
        OracleReport(
            name="stability_check",
            max_abs_error=abs(report.max_real_part),
            max_rel_error=abs(report.max_real_part) / rates.gamma,
            passed=report.stable,
            details=f"max Re eigenvalue / gamma = {report.max_real_part / rates.gamma:.3e}",
        )
    )
    reports.append(noise_factor_check(lm))
    if report.stable:
        reports.append(lyapunov_crosscheck(lm))
        reports.append(gain_optimizer_check(lm))
    return reports
