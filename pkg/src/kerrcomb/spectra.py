"""Spectral correlation matrices, quadrature transforms and output variances.

The stationary fluctuation spectrum of the linearized model is the
resolvent sandwich

    S(omega) = (-M + i*omega*I)^-1 @ D @ (-M.T - i*omega*I)^-1,

evaluated with plain transposes: in the phase-space representation used
here the starred variables are independent and correlations pair by
transpose, not conjugate transpose.  Quadratures are ``X_k = a_k + a_k*``
and ``Y_k = -i (a_k - a_k*)`` so the vacuum variance is 1 per quadrature;
measurable extracavity variances follow from the input-output relation
``S_out = 1 + 2*gammac*S`` per unit-coefficient quadrature.

Above threshold the drift matrix has an exact zero eigenvalue (free phase
diffusion), so ``S(omega)`` diverges as ``1/omega**2`` at zero frequency in
that one direction and the resolvent is singular at ``omega = 0`` exactly.
:func:`default_omega_grid` therefore replaces a requested zero frequency by
a small positive proxy (``3e-3 * gamma``); all reported quadrature
combinations have finite limits there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrixError
from .linearize import LinearModel

#: omega = 0 is evaluated at this multiple of gamma on default grids.  The
#: reported quadrature combinations sit on a flat plateau there (the proxy
#: differs from the zero-frequency limit by ~4e-5 in witness units), while a
#: smaller floor degrades the conditioning of the optimizing solves.
OMEGA_FLOOR_RATIO = 3e-3

#: Relative distance (in units of gamma) at which i*omega is considered to
#: collide with an eigenvalue of -M, making the resolvent singular.
_SINGULAR_TOL_RATIO = 1e-9


def _quadrature_transform() -> np.ndarray:
    """Rows map [alpha, alpha*] to [X_p..X_i2, Y_p..Y_i2]."""
    t = np.zeros((10, 10), dtype=complex)
    for k in range(5):
        t[k, k] = 1.0
        t[k, k + 5] = 1.0
        t[k + 5, k] = -1.0j
        t[k + 5, k + 5] = 1.0j
    return t


QUADRATURE_TRANSFORM = _quadrature_transform()


@dataclass(frozen=True)
class SpectralMatrix:
    """Intracavity spectral correlation matrix at one analysis frequency."""

    omega: float
    s: np.ndarray


@dataclass(frozen=True)
class QuadratureSpectrum:
    """Symmetrized spectral matrix in the quadrature basis [X..., Y...]."""

    omega: float
    sq: np.ndarray


@dataclass(frozen=True)
class CombinationCoeffs:
    """Real coefficients of a joint quadrature combination.

    ``cx[k]`` multiplies ``X`` of the k-th mode (order p, s1, i1, s2, i2)
    and ``cy[k]`` the corresponding ``Y``; at least one coefficient must be
    nonzero.
    """

    cx: np.ndarray
    cy: np.ndarray

    def __post_init__(self):
        cx = np.asarray(self.cx, dtype=float)
        cy = np.asarray(self.cy, dtype=float)
        if cx.shape != (5,) or cy.shape != (5,):
            raise ValueError("cx and cy must each hold one coefficient per mode")
        if not (np.any(cx) or np.any(cy)):
            raise ValueError("combination must have at least one nonzero coefficient")
        object.__setattr__(self, "cx", cx)
        object.__setattr__(self, "cy", cy)

    @property
    def stacked(self) -> np.ndarray:
        return np.concatenate([self.cx, self.cy])


def default_omega_grid(
    gamma: float,
    max_ratio: float = 5.0,
    points: int = 1001,
    floor_ratio: float = OMEGA_FLOOR_RATIO,
) -> np.ndarray:
    """Uniform analysis-frequency grid ``omega/gamma in [0, max_ratio]``.

    An exactly-zero entry is replaced by ``floor_ratio * gamma`` (pass
    ``floor_ratio=0`` to disable and accept a singular point above
    threshold).  Expressing the floor in units of ``gamma`` keeps traces on
    matched ``omega/gamma`` grids comparable across damping scales.
    """
    grid = np.linspace(0.0, max_ratio, points) * gamma
    if floor_ratio > 0 and points > 0 and grid[0] == 0.0:
        grid[0] = floor_ratio * gamma
    return grid


def _singular_frequencies(drift: np.ndarray, omegas: np.ndarray, gamma: float) -> np.ndarray:
    """Frequencies where -M + i*omega*I is numerically singular."""
    resolvent_poles = np.linalg.eigvals(-np.asarray(drift, dtype=complex))
    dist = np.abs(1j * omegas[:, None] - resolvent_poles[None, :]).min(axis=1)
    return omegas[dist <= _SINGULAR_TOL_RATIO * gamma]


def _spectral_batch(lm: LinearModel, omegas: np.ndarray) -> np.ndarray:
    """Resolvent sandwich for a whole frequency grid, shape (n, 10, 10).

    Two batched dense solves per grid; no explicit inverse is formed.
    """
    omegas = np.asarray(omegas, dtype=float)
    bad = _singular_frequencies(lm.drift, omegas, lm.rates.gamma)
    if bad.size:
        raise SingularMatrixError(
            "shifted drift matrix is numerically singular at omega/gamma = "
            f"{np.array2string(bad / lm.rates.gamma, max_line_width=200)} "
            "(marginal free-phase mode; use a nonzero analysis frequency)"
        )
    n = omegas.size
    eye = np.eye(10, dtype=complex)
    shifted = -lm.drift[None, :, :] + 1j * omegas[:, None, None] * eye
    left = np.linalg.solve(shifted, np.broadcast_to(lm.diffusion, (n, 10, 10)))
    # right factor: S = left @ (-M.T - i w I)^-1, computed via the transposed solve
    shifted_t = -lm.drift[None, :, :] - 1j * omegas[:, None, None] * eye
    s_t = np.linalg.solve(shifted_t, np.transpose(left, (0, 2, 1)))
    return np.transpose(s_t, (0, 2, 1))


def _quadrature_batch(s_batch: np.ndarray) -> np.ndarray:
    """Symmetrized quadrature-basis transform of stacked spectral matrices."""
    t = QUADRATURE_TRANSFORM
    sq = t @ s_batch @ t.T
    return 0.5 * (sq + np.transpose(sq, (0, 2, 1)))


def intracavity_spectrum(lm: LinearModel, omega: float) -> SpectralMatrix:
    """Spectral correlation matrix ``S(omega)`` of the stationary fluctuations.

    Requires a stable model; raises :class:`SingularMatrixError` when
    ``i*omega`` collides with an eigenvalue of ``-M`` (above threshold this
    happens exactly at ``omega = 0``).
    """
    s = _spectral_batch(lm, np.array([float(omega)]))[0]
    return SpectralMatrix(omega=float(omega), s=s)


def quadrature_spectrum(sm: SpectralMatrix) -> QuadratureSpectrum:
    """Transform to the quadrature basis and symmetrize.

    ``sq = sym(T @ s @ T.T)`` with ``sym(A) = (A + A.T)/2``; downstream
    variance formulas are quadratic forms over this symmetric matrix.
    """
    sq = _quadrature_batch(np.asarray(sm.s, dtype=complex)[None, :, :])[0]
    return QuadratureSpectrum(omega=sm.omega, sq=sq)


def output_variance(qs: QuadratureSpectrum, coeffs: CombinationCoeffs, gammac: float) -> float:
    """Measurable extracavity variance of a joint quadrature combination.

    The first term counts one unit of shot noise per squared coefficient;
    the second applies the input-output relation to the normally-ordered
    intracavity spectrum.
    """
    if gammac < 0:
        raise ValueError("gammac must be non-negative")
    c = coeffs.stacked
    shot = float(np.dot(c, c))
    return shot + 2.0 * gammac * float(np.real(c @ qs.sq @ c))


def spectrum_grid(lm: LinearModel, omegas) -> list[QuadratureSpectrum]:
    """Quadrature spectra for every frequency in ``omegas`` (order preserved)."""
    omegas = np.asarray(omegas, dtype=float)
    if omegas.size == 0:
        return []
    sq = _quadrature_batch(_spectral_batch(lm, omegas))
    return [QuadratureSpectrum(omega=float(w), sq=sq[i]) for i, w in enumerate(omegas)]


def output_quadrature_spectra(lm: LinearModel, omegas) -> np.ndarray:
    """Single-quadrature output spectra, shape (n, 10).

    Column ``k`` is ``1 + 2*gammac*sq[k, k]`` for the quadrature order
    ``X_p..X_i2, Y_p..Y_i2``; vacuum level is 1.
    """
    omegas = np.asarray(omegas, dtype=float)
    sq = _quadrature_batch(_spectral_batch(lm, omegas))
    diag = np.real(np.diagonal(sq, axis1=1, axis2=2))
    return 1.0 + 2.0 * lm.rates.gammac * diag

