"""Nonlinear drift vector, its Jacobian, diffusion matrix and stability.

All 10-dimensional objects live in the phase-space basis
``[p, s1, i1, s2, i2, p*, s1*, i1*, s2*, i2*]`` where the starred entries
are independent variables (they equal the complex conjugates of the
unstarred ones only on physical states).

The five mode equations are cubic polynomials in these variables.  They are
encoded once as a term table (coefficient kind, sign, variable indices);
:func:`drift_vector` evaluates the polynomials and :func:`drift_matrix`
differentiates the same table by the product rule, so the Jacobian is exact
by construction rather than transcribed entry by entry.

A structural note on stability: the four-wave-mixing interaction conserves
the weighted phase ``0*p + 1*s1 - 1*i1 + 2*s2 - 2*i2``, so every
above-threshold steady state spontaneously breaks a U(1) symmetry and the
drift matrix carries one exact zero eigenvalue (free phase diffusion of the
sideband phase difference).  :func:`stability` therefore accepts
eigenvalues whose real part is zero to within ``1e-9 * gamma`` and flags
only strictly growing modes as unstable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import RateParams, SteadyState

#: Relative tolerance (in units of gamma) below which a real part counts as zero.
STABILITY_TOL_RATIO = 1e-9

# Coefficient kinds for the drift term table.
_EPS, _GAMMA, _G = 0, 1, 2

# Upper five rows of the drift: (coefficient kind, sign/multiplicity, variable indices).
# Indices 0..4 are p, s1, i1, s2, i2 and 5..9 their starred partners.
_UPPER_TERMS = (
    # pump row
    (
        (_EPS, 1.0, ()),
        (_GAMMA, -1.0, (0,)),
        (_G, -2.0, (5, 1, 2)),
        (_G, -1.0, (6, 3, 2)),
        (_G, -1.0, (7, 4, 1)),
        (_G, 1.0, (1, 1, 8)),
        (_G, 1.0, (2, 2, 9)),
    ),
    # s1 row
    (
        (_GAMMA, -1.0, (1,)),
        (_G, 1.0, (0, 0, 7)),
        (_G, 1.0, (2, 0, 9)),
        (_G, -1.0, (3, 2, 5)),
        (_G, -2.0, (0, 3, 6)),
    ),
    # i1 row
    (
        (_GAMMA, -1.0, (2,)),
        (_G, 1.0, (0, 0, 6)),
        (_G, 1.0, (1, 0, 8)),
        (_G, -1.0, (4, 1, 5)),
        (_G, -2.0, (0, 4, 7)),
    ),
    # s2 row
    (
        (_GAMMA, -1.0, (3,)),
        (_G, 1.0, (1, 0, 7)),
        (_G, 1.0, (1, 1, 5)),
    ),
    # i2 row
    (
        (_GAMMA, -1.0, (4,)),
        (_G, 1.0, (2, 0, 6)),
        (_G, 1.0, (2, 2, 5)),
    ),
)

# The starred rows are the same polynomials with starred and unstarred
# variables exchanged (all coefficients are real).
_TERMS = tuple(_UPPER_TERMS) + tuple(
    tuple((kind, sign, tuple((v + 5) % 10 for v in variables)) for kind, sign, variables in row)
    for row in _UPPER_TERMS
)


@dataclass
class LinearModel:
    """Linearized fluctuation model about a steady state.

    Attributes
    ----------
    drift : ndarray
        10x10 complex drift matrix (Jacobian at the steady state).
    diffusion : ndarray
        10x10 complex symmetric diffusion matrix.
    steady : SteadyState
    rates : RateParams
    """

    drift: np.ndarray
    diffusion: np.ndarray
    steady: SteadyState
    rates: RateParams


@dataclass(frozen=True)
class StabilityReport:
    """Eigenvalue summary of a drift matrix.

    ``stable`` means no eigenvalue has real part above the zero tolerance;
    a numerically-zero eigenvalue (the free-phase mode present above
    threshold) still counts as stable.
    """

    eigenvalues: np.ndarray
    max_real_part: float
    stable: bool


def steady_field(ss: SteadyState) -> np.ndarray:
    """Embed a steady state as a physical 10-vector (starred half conjugate)."""
    upper = np.array([ss.a_p, ss.a_a, ss.a_a, ss.a_b, ss.a_b], dtype=complex)
    return np.concatenate([upper, upper.conj()])


def _coefficients(rates: RateParams) -> tuple[float, float, float]:
    return rates.epsilon, rates.gamma, rates.g


def drift_vector(rates: RateParams, state: np.ndarray) -> np.ndarray:
    """Deterministic part of the equations of motion at ``state``.

    ``state`` is any complex 10-vector in the ``[alpha, alpha*]`` basis; the
    starred half is treated as independent (fluctuation vectors need not be
    conjugate-symmetric).
    """
    state = np.asarray(state, dtype=complex)
    if state.shape != (10,):
        raise ValueError(f"state must be a 10-vector, got shape {state.shape}")
    coeff = _coefficients(rates)
    out = np.zeros(10, dtype=complex)
    for row, terms in enumerate(_TERMS):
        acc = 0.0 + 0.0j
        for kind, sign, variables in terms:
            term = sign * coeff[kind]
            for v in variables:
                term = term * state[v]
            acc += term
        out[row] = acc
    return out


def jacobian_at(rates: RateParams, state: np.ndarray) -> np.ndarray:
    """Exact Jacobian of :func:`drift_vector` at an arbitrary state.

    Differentiates the drift term table by the product rule; the 10
    variables are independent (no conjugation constraint).
    """
    state = np.asarray(state, dtype=complex)
    coeff = _coefficients(rates)
    jac = np.zeros((10, 10), dtype=complex)
    for row, terms in enumerate(_TERMS):
        for kind, sign, variables in terms:
            base = sign * coeff[kind]
            for pos, v in enumerate(variables):
                partial = base
                for q, w in enumerate(variables):
                    if q != pos:
                        partial = partial * state[w]
                jac[row, v] += partial
    return jac


def drift_matrix(rates: RateParams, ss: SteadyState) -> np.ndarray:
    """Drift matrix: Jacobian of the drift vector at the steady state.

    The block structure is ``[[m1, m2], [conj(m2), conj(m1)]]``; with the
    real-amplitude phase convention both blocks are real.
    """
    return jacobian_at(rates, steady_field(ss))


def diffusion_matrix(rates: RateParams, ss: SteadyState) -> np.ndarray:
    """Diffusion matrix ``D = [[d, 0], [0, conj(d)]]`` at the steady state.

    ``d`` is the 5x5 complex symmetric block of noise correlations among the
    unstarred variables, evaluated at the real steady-state amplitudes.
    """
    g = rates.g
    ap, aa, ab = ss.a_p, ss.a_a, ss.a_b
    d = g * np.array(
        [
            [-2 * aa * aa, -ab * aa, -aa * ab, aa * aa, aa * aa],
            [-ab * aa, -2 * ap * ab, ap * ap, 0.0, aa * ap],
            [-aa * ab, ap * ap, -2 * ap * ab, aa * ap, 0.0],
            [aa * aa, 0.0, aa * ap, 0.0, 0.0],
            [aa * aa, aa * ap, 0.0, 0.0, 0.0],
        ],
        dtype=complex,
    )
    out = np.zeros((10, 10), dtype=complex)
    out[:5, :5] = d
    out[5:, 5:] = d.conj()
    return out


def noise_factor(diffusion: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Factor ``B`` with ``B @ B.T == D`` for complex symmetric ``D``.

    Uses the Autonne-Takagi factorization via an SVD: near-degenerate
    singular values are grouped (relative tolerance ``rel_tol``) and each
    group rotated by the matrix square root of the corresponding unitary
    overlap block.  ``B`` is not unique; only the product is guaranteed.

    Raises
    ------
    ValueError
        If ``D`` is not symmetric to within ``rel_tol`` (relative).
    """
    d = np.asarray(diffusion, dtype=complex)
    if d.shape[0] != d.shape[1]:
        raise ValueError("diffusion matrix must be square")
    scale = np.abs(d).max()
    if np.abs(d - d.T).max() > rel_tol * (1.0 + scale):
        raise ValueError("diffusion matrix is not symmetric within tolerance")

    u, s, vh = np.linalg.svd(d)
    w = vh.conj().T
    # group singular values that coincide up to rounding; the SVD mixes
    # degenerate subspaces arbitrarily, so those must be handled as blocks
    groups = []
    start = 0
    smax = s[0] if s.size else 0.0
    for i in range(1, len(s)):
        if abs(s[i] - s[start]) > rel_tol * max(smax, 1e-300):
            groups.append(list(range(start, i)))
            start = i
    groups.append(list(range(start, len(s))))

    blocks = []
    for idx in groups:
        z = u[:, idx].T @ w[:, idx]
        blocks.append(scipy.linalg.sqrtm(z).astype(complex))
    q = scipy.linalg.block_diag(*blocks)
    return (u @ q.conj()) * np.sqrt(s)[None, :]


def stability(drift: np.ndarray, gamma: float | None = None) -> StabilityReport:
    """Eigenvalue stability verdict for a drift matrix.

    A point is stable when no eigenvalue real part exceeds the zero
    tolerance ``STABILITY_TOL_RATIO * gamma`` (0 when ``gamma`` is omitted).
    The tolerance absorbs the exact zero eigenvalue of the broken-phase
    mode, which is marginal rather than growing; genuine instabilities in
    this model appear with real parts of order ``gamma``.

    Eigenvalue-solver failures propagate as ``numpy.linalg.LinAlgError``.
    """
    eigenvalues = np.linalg.eigvals(np.asarray(drift, dtype=complex))
    max_real = float(eigenvalues.real.max())
    tol = STABILITY_TOL_RATIO * gamma if gamma is not None else 0.0
    return StabilityReport(eigenvalues=eigenvalues, max_real_part=max_real, stable=max_real < tol)


def linear_model(rates: RateParams) -> LinearModel:
    """Steady state plus drift and diffusion matrices in one step."""
    from .model import steady_state

    ss = steady_state(rates)
    return LinearModel(
        drift=drift_matrix(rates, ss),
        diffusion=diffusion_matrix(rates, ss),
        steady=ss,
        rates=rates,
    )
