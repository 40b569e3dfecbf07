"""Device parameters, coupling constant, pump threshold and steady states.

Five resonator modes take part: the pump ``p``, the inner sideband pair
``s1``/``i1`` and the outer pair ``s2``/``i2``.  All modes share the same
total damping rate ``gamma = gamma0 + gammac`` (intrinsic plus coupling
loss), and the pump drive amplitude ``epsilon`` is taken real and positive,
so all classical steady-state amplitudes are real and non-negative.

Above the oscillation threshold ``epsilon_th = gamma*sqrt(gamma/g)`` the
sidebands acquire the closed-form amplitudes implemented in
:func:`steady_state`; :func:`steady_state_residual` verifies any state
against the full nonlinear drift vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Mode labels in canonical order; all 10-dimensional vectors and matrices use
#: the ordering [p, s1, i1, s2, i2, p*, s1*, i1*, s2*, i2*].
MODES = ("p", "s1", "i1", "s2", "i2")

SPEED_OF_LIGHT = 299_792_458.0  # m/s
HBAR = 1.054_571_817e-34  # J*s


@dataclass(frozen=True)
class PhysicalParams:
    """Device-level inputs from which the nonlinear coupling rate follows.

    Parameters
    ----------
    n0 : float
        Linear refractive index (dimensionless).
    n2 : float
        Kerr coefficient in m^2/W.
    lambda0 : float
        Pump wavelength in m; accepted range (1e-7, 1e-5).
    mode_volume : float
        Cavity mode volume in m^3 (a direct input; not derived here).
    radius : float, optional
        Resonator radius in m (informational only).
    q_factor : float, optional
        Loaded quality factor (informational only).
    """

    n0: float
    n2: float
    lambda0: float
    mode_volume: float
    radius: float | None = None
    q_factor: float | None = None

    def __post_init__(self):
        # n2 = 0 (no Kerr effect) is a valid degenerate limit; the rest must be positive
        if self.n2 < 0:
            raise ValueError(f"PhysicalParams.n2 must be non-negative, got {self.n2!r}")
        for name in ("n0", "lambda0", "mode_volume"):
            value = getattr(self, name)
            if not (value > 0):
                raise ValueError(f"PhysicalParams.{name} must be strictly positive, got {value!r}")
        if not (1e-7 < self.lambda0 < 1e-5):
            raise ValueError(
                f"PhysicalParams.lambda0 = {self.lambda0!r} m is outside the sanity window (1e-7, 1e-5)"
            )
        for name in ("radius", "q_factor"):
            value = getattr(self, name)
            if value is not None and not (value > 0):
                raise ValueError(f"PhysicalParams.{name} must be strictly positive if given")


@dataclass(frozen=True)
class RateParams:
    """Dynamical rates that fully determine the model.

    All five modes share identical rates.  ``gamma`` must equal
    ``gamma0 + gammac``; use :meth:`from_ratio` to build a consistent set
    from the coupling fraction ``gammac/gamma``.

    Parameters
    ----------
    gamma : float
        Total damping rate in 1/s.
    gamma0 : float
        Intrinsic (absorption) damping rate in 1/s.
    gammac : float
        Out-coupling damping rate in 1/s, in [0, gamma].
    g : float
        Nonlinear coupling rate in 1/s.
    epsilon : float
        Pump drive amplitude in 1/s, real and non-negative.
    """

    gamma: float
    gamma0: float
    gammac: float
    g: float
    epsilon: float

    def __post_init__(self):
        if not (self.gamma > 0):
            raise ValueError(f"RateParams.gamma must be positive, got {self.gamma!r}")
        if not (self.g > 0):
            raise ValueError(f"RateParams.g must be positive, got {self.g!r}")
        if self.epsilon < 0:
            raise ValueError("RateParams.epsilon must be non-negative (real-positive pump convention)")
        if not (0.0 <= self.gammac <= self.gamma):
            raise ValueError(f"RateParams.gammac must lie in [0, gamma], got {self.gammac!r}")
        if abs(self.gamma - (self.gamma0 + self.gammac)) > 1e-12 * self.gamma:
            raise ValueError(
                "RateParams requires gamma == gamma0 + gammac "
                f"(got {self.gamma!r} vs {self.gamma0 + self.gammac!r})"
            )

    @classmethod
    def from_ratio(
        cls,
        gamma: float,
        coupling_ratio: float,
        g: float,
        epsilon: float | None = None,
        epsilon_ratio: float | None = None,
    ) -> "RateParams":
        """Build rates from ``gammac/gamma`` plus either an absolute pump
        amplitude ``epsilon`` or a threshold ratio ``epsilon_ratio``.

        Exactly one of ``epsilon`` and ``epsilon_ratio`` must be given.
        """
        if (epsilon is None) == (epsilon_ratio is None):
            raise ValueError("provide exactly one of epsilon and epsilon_ratio")
        if not (0.0 <= coupling_ratio <= 1.0):
            raise ValueError(f"coupling_ratio must lie in [0, 1], got {coupling_ratio!r}")
        if epsilon is None:
            epsilon = epsilon_ratio * gamma * math.sqrt(gamma / g)
        gammac = coupling_ratio * gamma
        return cls(gamma=gamma, gamma0=gamma - gammac, gammac=gammac, g=g, epsilon=epsilon)

    @property
    def coupling_ratio(self) -> float:
        return self.gammac / self.gamma

    @property
    def epsilon_ratio(self) -> float:
        """Pump amplitude in units of the threshold amplitude."""
        return self.epsilon / pump_threshold(self)


@dataclass(frozen=True)
class SteadyState:
    """Classical steady-state amplitudes (real, non-negative).

    ``a_a`` is the common inner-sideband amplitude (s1 and i1) and ``a_b``
    the common outer amplitude (s2 and i2); both vanish below threshold.
    """

    a_p: float
    a_a: float
    a_b: float
    above_threshold: bool


def coupling_constant(phys: PhysicalParams) -> float:
    """Nonlinear coupling rate (1/s) from device parameters.

    ``g = n2 * hbar * omega0**2 * c / (V * n0**2)`` with ``omega0`` the pump
    angular frequency ``2*pi*c/lambda0``.
    """
    omega0 = 2.0 * math.pi * SPEED_OF_LIGHT / phys.lambda0
    return phys.n2 * HBAR * omega0**2 * SPEED_OF_LIGHT / (phys.mode_volume * phys.n0**2)


def pump_threshold(rates: RateParams) -> float:
    """Pump amplitude (1/s) above which the sidebands oscillate:
    ``epsilon_th = gamma * sqrt(gamma / g)``."""
    return rates.gamma * math.sqrt(rates.gamma / rates.g)


def steady_state(rates: RateParams) -> SteadyState:
    """Classical steady state of the five-mode system.

    Below threshold only the pump is occupied, ``A_p = epsilon/gamma``.
    At and above threshold::

        A_p = (epsilon + sqrt(epsilon**2 + 3*gamma**3/g)) / (3*gamma)
        A_a = sqrt((gamma/(4*g)) * (1 - gamma/(g*A_p**2)))
        A_b = 2*g*A_p*A_a**2 / gamma

    Both branches agree at threshold (``A_a = 0``); the threshold point is
    handled by the above-threshold branch.
    """
    gamma, g, eps = rates.gamma, rates.g, rates.epsilon
    eps_th = pump_threshold(rates)
    if eps < eps_th:
        return SteadyState(a_p=eps / gamma, a_a=0.0, a_b=0.0, above_threshold=False)
    a_p = (eps + math.sqrt(eps**2 + 3.0 * gamma**3 / g)) / (3.0 * gamma)
    # max() guards the exact-threshold case where rounding makes the radicand
    # infinitesimally negative
    a_a = math.sqrt(max(0.0, (gamma / (4.0 * g)) * (1.0 - gamma / (g * a_p**2))))
    a_b = 2.0 * g * a_p * a_a**2 / gamma
    return SteadyState(a_p=a_p, a_a=a_a, a_b=a_b, above_threshold=True)


def steady_state_residual(rates: RateParams, ss: SteadyState) -> float:
    """Max-norm of the nonlinear drift vector at ``ss``, normalized by
    ``gamma * max(A_p, 1)``.  Zero (to rounding) iff ``ss`` solves the
    classical equations of motion."""
    from .linearize import drift_vector, steady_field

    residual = drift_vector(rates, steady_field(ss))
    return float(np.abs(residual).max() / (rates.gamma * max(ss.a_p, 1.0)))
