"""Multipartite entanglement witnesses with optimized gain parameters.

Four witness values ``S(1)..S(4)`` are sums of two output variances of
joint quadrature combinations.  Each combination fixes the coefficients of
two modes and leaves real gains on the remaining three; in the uncorrelated
limit every optimized witness equals 4, and a value strictly below 4
signals entanglement across the corresponding bipartition.  Simultaneous
violation of all four at one analysis frequency is the five-partite
verdict.

The gains enter the output variance quadratically with positive
semidefinite Hessian ``2*(I + 2*gammac*SYY)`` restricted to the free modes
(the output Y covariance), so the optimum is a single symmetric 3x3 solve
per witness and frequency.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linearize import LinearModel
from .model import MODES
from .spectra import (
    CombinationCoeffs,
    QuadratureSpectrum,
    _quadrature_batch,
    _spectral_batch,
    output_variance,
)

#: Free gain modes per witness index.
FREE_MODES = {
    1: ("i1", "s2", "i2"),
    2: ("s1", "s2", "i2"),
    3: ("p", "i1", "i2"),
    4: ("p", "s1", "s2"),
}

# Fixed coefficient patterns (cx for the X part, cy for the Y part at zero gains).
_FIXED = {
    1: (np.array([1.0, 1.0, 0.0, 0.0, 0.0]), np.array([-1.0, 1.0, 0.0, 0.0, 0.0])),
    2: (np.array([1.0, 0.0, 1.0, 0.0, 0.0]), np.array([-1.0, 0.0, 1.0, 0.0, 0.0])),
    3: (np.array([0.0, 1.0, 0.0, -1.0, 0.0]), np.array([0.0, 1.0, 0.0, 1.0, 0.0])),
    4: (np.array([0.0, 0.0, -1.0, 0.0, 1.0]), np.array([0.0, 0.0, 1.0, 0.0, 1.0])),
}

_FREE_IDX = {index: tuple(MODES.index(m) for m in modes) for index, modes in FREE_MODES.items()}


@dataclass(frozen=True)
class VlfReport:
    """Witness values at one analysis frequency.

    ``violated[i]`` is ``s_values[i] < 4`` (strict); ``five_partite`` is the
    conjunction of all four.
    """

    omega: float
    s_values: np.ndarray
    gains: tuple[dict, dict, dict, dict]
    violated: np.ndarray
    five_partite: bool


@dataclass(frozen=True)
class VlfSummary:
    """Grid-level summary of :func:`five_partite_verdict`."""

    min_values: np.ndarray
    argmin_omega: np.ndarray
    five_partite: bool
    five_partite_omegas: np.ndarray


def _check_index(index: int) -> None:
    if index not in FREE_MODES:
        raise ValueError(f"witness index must be 1..4, got {index!r}")


def _check_gains(index: int, gains: dict) -> np.ndarray:
    expected = FREE_MODES[index]
    if set(gains) != set(expected):
        raise ValueError(
            f"witness {index} takes gains for modes {expected}, got {tuple(sorted(gains))}"
        )
    return np.array([float(gains[m]) for m in expected])


def vlf_combinations(index: int, gains: dict) -> tuple[CombinationCoeffs, CombinationCoeffs]:
    """The two quadrature combinations (u on X, v on Y) of one witness."""
    _check_index(index)
    gvec = _check_gains(index, gains)
    cx, cy0 = _FIXED[index]
    cy = cy0.copy()
    for value, k in zip(gvec, _FREE_IDX[index]):
        cy[k] += value
    u = CombinationCoeffs(cx=cx, cy=np.zeros(5))
    v = CombinationCoeffs(cx=np.zeros(5), cy=cy)
    return u, v


def vlf_value(qs: QuadratureSpectrum, index: int, gains: dict, gammac: float) -> float:
    """Witness value ``S(index)`` for explicit gains."""
    u, v = vlf_combinations(index, gains)
    return output_variance(qs, u, gammac) + output_variance(qs, v, gammac)


def _optimize_batch(sq_batch: np.ndarray, gammac: float, index: int):
    """Closed-form optimal gains over a stacked spectrum array.

    Returns ``(values, gains)`` with shapes (n,) and (n, 3).  Uses the real
    parts of the quadrature blocks; output variances of real combinations
    only see those.
    """
    _check_index(index)
    cx, cy0 = _FIXED[index]
    free = list(_FREE_IDX[index])
    sxx = sq_batch[:, :5, :5].real
    syy = sq_batch[:, 5:, 5:].real

    u_part = cx @ cx + 2.0 * gammac * np.einsum("i,nij,j->n", cx, sxx, cx)
    q = np.eye(5)[None, :, :] + 2.0 * gammac * syy  # output Y covariance
    b = np.einsum("nij,j->ni", q, cy0)
    q_ff = q[:, free][:, :, free]
    rhs = -b[:, free]
    try:
        gains = np.linalg.solve(q_ff, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        # singular Hessian: fall back to the minimum-norm stationary point
        gains = np.empty_like(rhs)
        for i in range(rhs.shape[0]):
            gains[i] = np.linalg.lstsq(q_ff[i], rhs[i], rcond=None)[0]
    cy = np.broadcast_to(cy0, (sq_batch.shape[0], 5)).copy()
    cy[:, free] += gains
    v_part = np.einsum("ni,nij,nj->n", cy, q, cy)
    return u_part + v_part, gains


def optimize_gains(qs: QuadratureSpectrum, index: int, gammac: float) -> tuple[dict, float]:
    """Globally optimal gains and witness value at one frequency.

    The objective is an exact quadratic with Hessian
    ``2*(I_free + 2*gammac*SYY_free)``, solved as one symmetric linear
    system; a singular Hessian falls back to the minimum-norm solution.
    """
    sq = np.asarray(qs.sq, dtype=complex)
    if not np.all(np.isfinite(sq)):
        raise ValueError("quadrature spectrum contains non-finite entries")
    values, gains = _optimize_batch(sq[None, :, :], gammac, index)
    gain_map = dict(zip(FREE_MODES[index], (float(x) for x in gains[0])))
    return gain_map, float(values[0])


def optimized_values(lm: LinearModel, omegas) -> tuple[np.ndarray, np.ndarray]:
    """Optimized witness values over a frequency grid.

    Returns ``(values, gains)`` with shapes (n, 4) and (n, 4, 3); column
    ``i`` holds ``S(i+1)``.  The out-coupling rate is taken from the model.
    """
    omegas = np.asarray(omegas, dtype=float)
    sq = _quadrature_batch(_spectral_batch(lm, omegas))
    values = np.empty((omegas.size, 4))
    gains = np.empty((omegas.size, 4, 3))
    for index in range(1, 5):
        v, gn = _optimize_batch(sq, lm.rates.gammac, index)
        values[:, index - 1] = v
        gains[:, index - 1, :] = gn
    return values, gains


def vlf_value_trace(lm: LinearModel, omegas, fixed_gains) -> np.ndarray:
    """Witness traces with one fixed gain vector per witness.

    ``fixed_gains`` has shape (4, 3), rows ordered by witness index and
    columns by the :data:`FREE_MODES` order.  Used to compare a single
    global gain set against per-frequency optimization.
    """
    omegas = np.asarray(omegas, dtype=float)
    fixed_gains = np.asarray(fixed_gains, dtype=float)
    sq = _quadrature_batch(_spectral_batch(lm, omegas))
    gammac = lm.rates.gammac
    sxx = sq[:, :5, :5].real
    syy = sq[:, 5:, 5:].real
    out = np.empty((omegas.size, 4))
    for index in range(1, 5):
        cx, cy0 = _FIXED[index]
        cy = cy0.copy()
        cy[list(_FREE_IDX[index])] += fixed_gains[index - 1]
        u = cx @ cx + 2.0 * gammac * np.einsum("i,nij,j->n", cx, sxx, cx)
        v = cy @ cy + 2.0 * gammac * np.einsum("i,nij,j->n", cy, syy, cy)
        out[:, index - 1] = u + v
    return out


def five_partite_verdict(lm: LinearModel, omegas) -> tuple[list[VlfReport], VlfSummary]:
    """Per-frequency optimized witness report plus a grid summary.

    Gains are optimized independently at each analysis frequency.  The
    verdict threshold is strict (< 4): equality counts as non-violation.
    """
    omegas = np.asarray(omegas, dtype=float)
    values, gains = optimized_values(lm, omegas)
    violated = values < 4.0
    all_four = violated.all(axis=1)

    reports = []
    for i, w in enumerate(omegas):
        gain_maps = tuple(
            dict(zip(FREE_MODES[index], (float(x) for x in gains[i, index - 1])))
            for index in range(1, 5)
        )
        reports.append(
            VlfReport(
                omega=float(w),
                s_values=values[i].copy(),
                gains=gain_maps,
                violated=violated[i].copy(),
                five_partite=bool(all_four[i]),
            )
        )
    summary = VlfSummary(
        min_values=values.min(axis=0),
        argmin_omega=omegas[values.argmin(axis=0)],
        five_partite=bool(all_four.any()),
        five_partite_omegas=omegas[all_four],
    )
    return reports, summary
