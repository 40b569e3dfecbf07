"""Parameter sweeps over coupling ratio and pump power, plus scaling checks.

Every sweep point re-verifies the closed-form steady state against the
nonlinear drift vector and checks dynamical stability before any spectra
are computed.  Unstable points are recorded as gaps (NaN rows in the
traces and CSV), never silently dropped: the steady state loses stability
at pump amplitudes around 1.43 times threshold, inside the default pump
sweep range.

Sweep outputs are deterministic; identical inputs produce bit-identical
CSV bodies.  Points are independent and may be evaluated in parallel
(``KERRCOMB_THREADS`` environment variable); result order always follows
input order.
"""

from __future__ import annotations

import json
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError
from .linearize import linear_model, stability
from .model import RateParams, steady_state, steady_state_residual
from .oracle import OracleReport
from .spectra import default_omega_grid
from .vlf import FREE_MODES, optimized_values

THREADS_ENV_VAR = "KERRCOMB_THREADS"

#: Hard guard on the signal/idler symmetry identities S1=S2, S3=S4 across
#: sweep outputs.  The identities hold to ~1e-10 relative at ordinary
#: points; approaching the instability edge a softening eigenvalue degrades
#: the mirrored solves to ~1e-7 in double precision, so the guard sits at
#: 1e-6 (a real symmetry bug shows up at order one).
SYMMETRY_GUARD = 1e-6

#: A jump of the minimizing frequency larger than this (units of gamma)
#: between adjacent sweep points counts as a regime change.
REGIME_JUMP_RATIO = 0.2

#: Gain column labels in CSV order.
GAIN_COLUMNS = tuple(
    f"g{index}_{mode}" for index in range(1, 5) for mode in FREE_MODES[index]
)


@dataclass
class SweepResult:
    """Witness traces along one swept parameter.

    ``s_values`` has shape (npoints, nomega, 4) and ``gains``
    (npoints, nomega, 4, 3); rows of unstable points hold NaN.  ``traces``
    holds the min-over-frequency summaries per witness, ``points`` the full
    per-point parameters, and ``metadata`` sweep-level information
    (including detected regime changes for pump sweeps).
    """

    axis_name: str
    axis_values: np.ndarray
    omegas: np.ndarray
    gamma: float
    s_values: np.ndarray
    gains: np.ndarray
    stable: np.ndarray
    traces: dict = field(default_factory=dict)
    points: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _point_info(rates: RateParams, residual: float, report) -> dict:
    ss = steady_state(rates)
    return {
        "gamma": rates.gamma,
        "gamma0": rates.gamma0,
        "gammac": rates.gammac,
        "g": rates.g,
        "epsilon": rates.epsilon,
        "epsilon_ratio": rates.epsilon_ratio,
        "a_p": ss.a_p,
        "a_a": ss.a_a,
        "a_b": ss.a_b,
        "above_threshold": ss.above_threshold,
        "steady_state_residual": residual,
        "max_real_part": report.max_real_part,
        "stable": bool(report.stable),
    }


def _evaluate_point(rates: RateParams, omegas: np.ndarray):
    """Optimized witness values at one sweep point, or NaN if unstable."""
    ss = steady_state(rates)
    residual = steady_state_residual(rates, ss)
    if residual > 1e-8:
        raise ModelError(f"steady-state residual {residual:.3e} exceeds 1e-8 at {rates}")
    lm = linear_model(rates)
    report = stability(lm.drift, rates.gamma)
    info = _point_info(rates, residual, report)
    if not report.stable:
        nan_values = np.full((omegas.size, 4), np.nan)
        nan_gains = np.full((omegas.size, 4, 3), np.nan)
        return nan_values, nan_gains, False, info
    values, gains = optimized_values(lm, omegas)
    _enforce_symmetry(values)
    return values, gains, True, info


def _enforce_symmetry(values: np.ndarray) -> None:
    scale = np.abs(values).max()
    pair_dev = max(
        np.abs(values[:, 0] - values[:, 1]).max(),
        np.abs(values[:, 2] - values[:, 3]).max(),
    )
    if pair_dev > SYMMETRY_GUARD * scale:
        raise ModelError(
            f"signal/idler symmetry violated: |S1-S2| or |S3-S4| = {pair_dev:.3e} "
            f"(relative {pair_dev / scale:.3e})"
        )


def _run_points(rate_list, omegas):
    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda r: _evaluate_point(r, omegas), rate_list))
    return [_evaluate_point(r, omegas) for r in rate_list]


def _assemble(axis_name, axis_values, omegas, gamma, results) -> SweepResult:
    n, nw = len(results), omegas.size
    s_values = np.empty((n, nw, 4))
    gains = np.empty((n, nw, 4, 3))
    stable = np.empty(n, dtype=bool)
    points = []
    for i, (vals, gns, ok, info) in enumerate(results):
        s_values[i] = vals
        gains[i] = gns
        stable[i] = ok
        points.append(info)
    result = SweepResult(
        axis_name=axis_name,
        axis_values=np.asarray(axis_values, dtype=float),
        omegas=omegas,
        gamma=gamma,
        s_values=s_values,
        gains=gains,
        stable=stable,
        points=points,
    )
    with np.errstate(invalid="ignore"):
        for index in range(4):
            trace = s_values[:, :, index]
            mins = np.where(stable, np.nanmin(np.where(stable[:, None], trace, np.inf), axis=1), np.nan)
            argmin = np.where(
                stable,
                omegas[np.nanargmin(np.where(stable[:, None], trace, np.inf), axis=1)] / gamma,
                np.nan,
            )
            result.traces[f"min_S{index + 1}"] = mins
            result.traces[f"argmin_omega_ratio_S{index + 1}"] = argmin
    return result


def _regime_changes(result: SweepResult, index: int) -> list:
    """Jumps of the minimizing frequency between adjacent stable points."""
    w_star = result.traces[f"argmin_omega_ratio_S{index}"]
    changes = []
    for i in range(len(w_star) - 1):
        if not (result.stable[i] and result.stable[i + 1]):
            continue
        if abs(w_star[i + 1] - w_star[i]) > REGIME_JUMP_RATIO:
            changes.append(
                {
                    "axis_low": float(result.axis_values[i]),
                    "axis_high": float(result.axis_values[i + 1]),
                    "omega_ratio_low": float(w_star[i]),
                    "omega_ratio_high": float(w_star[i + 1]),
                }
            )
    return changes


def coupling_sweep(
    base: RateParams,
    ratios,
    eps_ratio: float = 1.15,
    omegas: np.ndarray | None = None,
) -> SweepResult:
    """Optimized witness traces versus out-coupling fraction ``gammac/gamma``.

    The pump amplitude is pinned to ``eps_ratio`` times threshold at every
    point; ``base`` supplies ``gamma`` and ``g``.
    """
    ratios = np.asarray(ratios, dtype=float)
    if ratios.size and (ratios.min() < 0.0 or ratios.max() > 1.0):
        raise ValueError("coupling ratios must lie in [0, 1]")
    if omegas is None:
        omegas = default_omega_grid(base.gamma)
    rate_list = [
        RateParams.from_ratio(base.gamma, float(r), base.g, epsilon_ratio=eps_ratio)
        for r in ratios
    ]
    results = _run_points(rate_list, omegas)
    sweep = _assemble("gamma_c_ratio", ratios, omegas, base.gamma, results)
    sweep.metadata = {
        "sweep": "coupling",
        "eps_ratio": eps_ratio,
        "gamma": base.gamma,
        "g": base.g,
    }
    return sweep


def pump_sweep(
    base: RateParams,
    eps_over_th,
    omegas: np.ndarray | None = None,
) -> SweepResult:
    """Optimized witness traces versus pump amplitude in threshold units.

    Requires ideal out-coupling (``gammac == gamma``) and ratios in (1, 2].
    The summary locates the global-minimum pump per witness and any regime
    changes (jumps of the minimizing frequency between adjacent points).
    """
    eps_over_th = np.asarray(eps_over_th, dtype=float)
    if eps_over_th.size and (eps_over_th.min() <= 1.0 or eps_over_th.max() > 2.0):
        raise ValueError("pump ratios must lie in (1, 2]")
    if abs(base.gammac - base.gamma) > 1e-12 * base.gamma:
        raise ValueError("pump_sweep requires ideal coupling (gammac == gamma)")
    if omegas is None:
        omegas = default_omega_grid(base.gamma)
    rate_list = [
        RateParams.from_ratio(base.gamma, 1.0, base.g, epsilon_ratio=float(r))
        for r in eps_over_th
    ]
    results = _run_points(rate_list, omegas)
    sweep = _assemble("eps_over_eps_th", eps_over_th, omegas, base.gamma, results)
    argmins = {}
    for index in (1, 3):
        trace = sweep.traces[f"min_S{index}"]
        if np.any(sweep.stable):
            masked = np.where(sweep.stable, trace, np.inf)
            argmins[f"S{index}"] = float(eps_over_th[int(np.argmin(masked))])
    sweep.metadata = {
        "sweep": "pump",
        "gamma": base.gamma,
        "g": base.g,
        "argmin_eps_ratio": argmins,
        "regime_changes": {f"S{i}": _regime_changes(sweep, i) for i in (1, 3)},
        "unstable_points": [float(x) for x in eps_over_th[~sweep.stable]],
    }
    return sweep


def scaling_check(
    base: RateParams,
    scale: float,
    omega_ratios: np.ndarray | None = None,
    preserve_pump_ratio: bool = True,
) -> OracleReport:
    """Invariance of witness traces under damping rescaling.

    Rescales ``gamma -> scale*gamma`` at fixed ``g``, preserving
    ``gammac/gamma`` and (by default) ``epsilon/epsilon_th``, and compares
    the optimized witness traces on matched ``omega/gamma`` grids.  With the
    pump ratio preserved the traces are identical up to rounding (passes at
    1e-8 relative); ``preserve_pump_ratio=False`` holds ``epsilon`` fixed
    absolutely and serves as the negative control.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    if omega_ratios is None:
        omega_ratios = default_omega_grid(1.0)
    omega_ratios = np.asarray(omega_ratios, dtype=float)

    gamma2 = scale * base.gamma
    if preserve_pump_ratio:
        # threshold scales as gamma**1.5 at fixed g, so this preserves the
        # pump ratio exactly (bitwise for scale = 1)
        scaled = RateParams.from_ratio(
            gamma2, base.coupling_ratio, base.g, epsilon=base.epsilon * scale**1.5
        )
    else:
        scaled = RateParams.from_ratio(gamma2, base.coupling_ratio, base.g, epsilon=base.epsilon)

    values = []
    for rates in (base, scaled):
        lm = linear_model(rates)
        report = stability(lm.drift, rates.gamma)
        if not report.stable:
            raise ModelError(f"scaling check hit an unstable point at {rates}")
        vals, _ = optimized_values(lm, omega_ratios * rates.gamma)
        values.append(vals)
    diff = float(np.abs(values[0] - values[1]).max())
    rel = diff / float(np.abs(values[0]).max())
    return OracleReport(
        name="scaling_check",
        max_abs_error=diff,
        max_rel_error=rel,
        passed=rel <= 1e-8,
        details=f"scale={scale}, preserve_pump_ratio={preserve_pump_ratio}",
    )


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", text=True)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sweep_csv_text(result: SweepResult) -> str:
    """CSV body: one row per (axis value, frequency), 17 significant digits."""
    header = [result.axis_name, "omega_over_gamma", "S1", "S2", "S3", "S4", *GAIN_COLUMNS]
    lines = [",".join(header)]
    for i, axis_value in enumerate(result.axis_values):
        for j, omega in enumerate(result.omegas):
            row = [_fmt(axis_value), _fmt(omega / result.gamma)]
            row.extend(_fmt(result.s_values[i, j, k]) for k in range(4))
            row.extend(_fmt(result.gains[i, j, k, m]) for k in range(4) for m in range(3))
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_sweep_csv(result: SweepResult, path: str) -> None:
    _atomic_write(path, sweep_csv_text(result))


def sweep_sidecar(result: SweepResult, version: str) -> dict:
    return {
        "tool_version": version,
        "axis_name": result.axis_name,
        "axis_values": [float(x) for x in result.axis_values],
        "omega_over_gamma": {
            "min": float(result.omegas.min() / result.gamma) if result.omegas.size else None,
            "max": float(result.omegas.max() / result.gamma) if result.omegas.size else None,
            "points": int(result.omegas.size),
        },
        "traces": {k: [float(x) for x in v] for k, v in result.traces.items()},
        "points": result.points,
        "metadata": result.metadata,
    }


def write_sweep_json(result: SweepResult, path: str, version: str = "0") -> None:
    _atomic_write(path, json.dumps(sweep_sidecar(result, version), indent=2, sort_keys=True) + "\n")
