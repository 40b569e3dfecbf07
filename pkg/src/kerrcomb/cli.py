"""Command-line front end: config parsing, subcommands, CSV/JSON outputs.

Configuration is a line-oriented ``key = value`` file; every key can also
be overridden on the command line with ``--set key=value``.  Defaults
reproduce the headline operating point (``gamma = 4.02e5 1/s``,
``g = 2.21e-4 1/s``, ideal out-coupling, pump at 1.15 times threshold), so
``kerrcomb vlf`` with no arguments emits the five-partite witness traces
at that point.

Exit codes: 0 success, 2 configuration error (diagnostic names the
offending key), 3 model error (instability or a singular operating point,
echoed in the message).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import ConfigError, ModelError
from .experiments import (
    GAIN_COLUMNS,
    _atomic_write,
    _fmt,
    coupling_sweep,
    pump_sweep,
    scaling_check,
    sweep_csv_text,
    sweep_sidecar,
)
from .linearize import linear_model, stability
from .model import (
    MODES,
    PhysicalParams,
    RateParams,
    coupling_constant,
    pump_threshold,
    steady_state,
)
from .spectra import default_omega_grid, output_quadrature_spectra
from .vlf import optimized_values, vlf_value_trace

# key: (type, default, help with SI units)
_CONFIG_SCHEMA = {
    "gamma": (float, 4.02e5, "total damping rate, 1/s"),
    "g": (float, 2.21e-4, "nonlinear coupling rate, 1/s"),
    "gamma_c_ratio": (float, 1.0, "out-coupling fraction gammac/gamma, dimensionless in [0, 1]"),
    "epsilon": (float, None, "pump amplitude, 1/s (mutually exclusive with epsilon_ratio)"),
    "epsilon_ratio": (float, 1.15, "pump amplitude over threshold amplitude, dimensionless"),
    "omega_max": (float, 5.0, "analysis-frequency grid maximum, units of gamma"),
    "omega_points": (int, 1001, "number of grid frequencies"),
    "omega_floor": (float, 3e-3, "replacement for omega = 0 on the grid, units of gamma (0 disables)"),
    "coupling_ratios": (str, "0.34,0.57,0.8,1.0", "comma-separated gammac/gamma sweep values"),
    "pump_min": (float, 1.01, "pump sweep start, units of threshold"),
    "pump_max": (float, 1.5, "pump sweep end, units of threshold"),
    "pump_step": (float, 0.005, "pump sweep step, units of threshold"),
    "scale": (float, 2.0, "damping rescale factor for scaling-check, dimensionless"),
    "n0": (float, None, "linear refractive index, dimensionless"),
    "n2": (float, None, "Kerr coefficient, m^2/W"),
    "lambda0": (float, None, "pump wavelength, m"),
    "mode_volume": (float, None, "cavity mode volume, m^3"),
    "radius": (float, None, "resonator radius, m (informational)"),
    "q_factor": (float, None, "loaded quality factor, dimensionless (informational)"),
    "output_dir": (str, ".", "directory for output files"),
    "output_format": (str, "both", "'csv', 'json' or 'both'"),
}

_PHYSICAL_KEYS = ("n0", "n2", "lambda0", "mode_volume")


@dataclass
class RunConfig:
    """Resolved configuration; ``explicit`` records which keys the user set."""

    values: dict = field(default_factory=dict)
    explicit: set = field(default_factory=set)

    def __post_init__(self):
        for key, (_, default, _help) in _CONFIG_SCHEMA.items():
            self.values.setdefault(key, default)

    def __getitem__(self, key):
        return self.values[key]

    def set(self, key: str, raw: str, where: str = "") -> None:
        if key not in _CONFIG_SCHEMA:
            raise ConfigError(f"{where}unknown key '{key}'")
        kind = _CONFIG_SCHEMA[key][0]
        try:
            value = kind(raw)
        except ValueError:
            raise ConfigError(f"{where}key '{key}': cannot parse {raw!r} as {kind.__name__}") from None
        self.values[key] = value
        self.explicit.add(key)

    def validate(self) -> None:
        if "epsilon" in self.explicit and "epsilon_ratio" in self.explicit:
            raise ConfigError("key 'epsilon': give either epsilon or epsilon_ratio, not both")
        if not (0.0 <= self["gamma_c_ratio"] <= 1.0):
            raise ConfigError(
                f"key 'gamma_c_ratio': value {self['gamma_c_ratio']} is outside [0, 1]"
            )
        for key in ("gamma", "g"):
            if not (self[key] > 0):
                raise ConfigError(f"key '{key}': must be strictly positive")
        if self["omega_points"] < 1:
            raise ConfigError("key 'omega_points': must be at least 1")
        if self["omega_max"] < 0 or self["omega_floor"] < 0:
            raise ConfigError("key 'omega_max'/'omega_floor': must be non-negative")
        if self["output_format"] not in ("csv", "json", "both"):
            raise ConfigError("key 'output_format': expected 'csv', 'json' or 'both'")
        if self["pump_step"] <= 0:
            raise ConfigError("key 'pump_step': must be positive")
        given = [k for k in _PHYSICAL_KEYS if self.values[k] is not None]
        if given and len(given) != len(_PHYSICAL_KEYS):
            missing = [k for k in _PHYSICAL_KEYS if self.values[k] is None]
            raise ConfigError(f"key '{missing[0]}': physical parameters require all of {_PHYSICAL_KEYS}")
        try:
            self.resolve_rates()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"key 'gamma': {exc}") from exc

    def resolve_g(self) -> float:
        """Coupling rate: explicit ``g`` wins, else derived from device values."""
        if "g" not in self.explicit and self.values["n0"] is not None:
            phys = PhysicalParams(
                n0=self["n0"],
                n2=self["n2"],
                lambda0=self["lambda0"],
                mode_volume=self["mode_volume"],
                radius=self.values["radius"],
                q_factor=self.values["q_factor"],
            )
            return coupling_constant(phys)
        return self["g"]

    def resolve_rates(self) -> RateParams:
        g = self.resolve_g()
        if "epsilon" in self.explicit:
            return RateParams.from_ratio(
                self["gamma"], self["gamma_c_ratio"], g, epsilon=self["epsilon"]
            )
        return RateParams.from_ratio(
            self["gamma"], self["gamma_c_ratio"], g, epsilon_ratio=self["epsilon_ratio"]
        )

    def omega_grid(self, gamma: float) -> np.ndarray:
        return default_omega_grid(
            gamma,
            max_ratio=self["omega_max"],
            points=self["omega_points"],
            floor_ratio=self["omega_floor"],
        )

    def coupling_ratio_list(self) -> list[float]:
        try:
            return [float(tok) for tok in self["coupling_ratios"].split(",") if tok.strip()]
        except ValueError:
            raise ConfigError("key 'coupling_ratios': expected comma-separated numbers") from None

    def pump_grid(self) -> np.ndarray:
        lo, hi, step = self["pump_min"], self["pump_max"], self["pump_step"]
        if hi < lo:
            raise ConfigError("key 'pump_max': must be >= pump_min")
        n = int(round((hi - lo) / step)) + 1
        return np.round(lo + step * np.arange(n), 12)


def parse_config(text: str) -> RunConfig:
    """Parse a ``key = value`` configuration file body.

    Blank lines and ``#`` comments are ignored; unknown keys and malformed
    lines are rejected with the line number.  An empty file yields the
    default operating point.
    """
    config = RunConfig()
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line.strip()!r}")
        key, _, raw = line.partition("=")
        config.set(key.strip(), raw.strip(), where=f"line {lineno}: ")
    config.validate()
    return config


def serialize_config(config: RunConfig) -> str:
    """Canonical text form; ``parse_config`` round-trips it."""
    lines = []
    for key in _CONFIG_SCHEMA:
        value = config.values[key]
        if value is None:
            continue
        if isinstance(value, float):
            lines.append(f"{key} = {value!r}")
        else:
            lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def _sidecar_common(config: RunConfig, rates: RateParams) -> dict:
    ss = steady_state(rates)
    lm = linear_model(rates)
    report = stability(lm.drift, rates.gamma)
    return {
        "tool_version": __version__,
        "rates": {
            "gamma": rates.gamma,
            "gamma0": rates.gamma0,
            "gammac": rates.gammac,
            "g": rates.g,
            "epsilon": rates.epsilon,
        },
        "epsilon_th": pump_threshold(rates),
        "epsilon_ratio": rates.epsilon_ratio,
        "steady_state": {
            "a_p": ss.a_p,
            "a_a": ss.a_a,
            "a_b": ss.a_b,
            "above_threshold": ss.above_threshold,
        },
        "stability": {
            "max_real_part": report.max_real_part,
            "stable": report.stable,
        },
        "config": {k: config.values[k] for k in _CONFIG_SCHEMA if config.values[k] is not None},
    }


def _write_json(path: str, payload: dict) -> None:
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _out(config: RunConfig, args, name: str) -> str:
    directory = args.output_dir or config["output_dir"]
    import os

    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, name)


def _cmd_steady_state(config: RunConfig, args) -> int:
    rates = config.resolve_rates()
    path = _out(config, args, "steady_state.json")
    _write_json(path, _sidecar_common(config, rates))
    print(f"wrote {path}")
    return 0


def _cmd_spectrum(config: RunConfig, args) -> int:
    rates = config.resolve_rates()
    lm = linear_model(rates)
    report = stability(lm.drift, rates.gamma)
    if not report.stable:
        raise ModelError(
            f"operating point is unstable (max Re eigenvalue = {report.max_real_part:.3e}) "
            f"at epsilon/epsilon_th = {rates.epsilon_ratio:.6g}"
        )
    omegas = config.omega_grid(rates.gamma)
    spectra = output_quadrature_spectra(lm, omegas)
    header = ["omega_over_gamma"]
    header += [f"Sout_X_{m}" for m in MODES] + [f"Sout_Y_{m}" for m in MODES]
    lines = [",".join(header)]
    for i, w in enumerate(omegas):
        lines.append(",".join([_fmt(w / rates.gamma)] + [_fmt(x) for x in spectra[i]]))
    sidecar = _sidecar_common(config, rates)
    if config["output_format"] == "json":
        sidecar["rows"] = [[float(w / rates.gamma), *map(float, spectra[i])] for i, w in enumerate(omegas)]
        sidecar["columns"] = header
    else:
        csv_path = _out(config, args, "spectrum.csv")
        _atomic_write(csv_path, "\n".join(lines) + "\n")
        print(f"wrote {csv_path}")
    json_path = _out(config, args, "spectrum.json")
    _write_json(json_path, sidecar)
    print(f"wrote {json_path}")
    return 0


def _cmd_vlf(config: RunConfig, args) -> int:
    rates = config.resolve_rates()
    lm = linear_model(rates)
    report = stability(lm.drift, rates.gamma)
    if not report.stable:
        raise ModelError(
            f"operating point is unstable (max Re eigenvalue = {report.max_real_part:.3e}) "
            f"at epsilon/epsilon_th = {rates.epsilon_ratio:.6g}"
        )
    omegas = config.omega_grid(rates.gamma)
    values, gains = optimized_values(lm, omegas)
    mode = "per-omega"
    if args.global_gains:
        # one gain set per witness, taken at its per-omega-optimized minimum,
        # then held fixed across the whole trace
        mode = "global"
        fixed = gains[values.argmin(axis=0), range(4), :]
        values = vlf_value_trace(lm, omegas, fixed)
        gains = np.broadcast_to(fixed[None, :, :], gains.shape).copy()

    header = ["omega_over_gamma", "S1", "S2", "S3", "S4", *GAIN_COLUMNS]
    lines = [",".join(header)]
    for i, w in enumerate(omegas):
        row = [_fmt(w / rates.gamma)]
        row += [_fmt(values[i, k]) for k in range(4)]
        row += [_fmt(gains[i, k, m]) for k in range(4) for m in range(3)]
        lines.append(",".join(row))

    sidecar = _sidecar_common(config, rates)
    mins = values.min(axis=0)
    sidecar["vlf"] = {
        "gain_mode": mode,
        "min_values": [float(x) for x in mins],
        "argmin_omega_over_gamma": [float(omegas[k] / rates.gamma) for k in values.argmin(axis=0)],
        "five_partite": bool((values < 4.0).all(axis=1).any()),
    }
    if config["output_format"] == "json":
        sidecar["columns"] = header
        sidecar["rows"] = [
            [float(w / rates.gamma)]
            + [float(values[i, k]) for k in range(4)]
            + [float(gains[i, k, m]) for k in range(4) for m in range(3)]
            for i, w in enumerate(omegas)
        ]
    else:
        csv_path = _out(config, args, "vlf.csv")
        _atomic_write(csv_path, "\n".join(lines) + "\n")
        print(f"wrote {csv_path}")
    json_path = _out(config, args, "vlf.json")
    _write_json(json_path, sidecar)
    print(f"wrote {json_path}")
    return 0


def _write_sweep(config: RunConfig, args, result, stem: str) -> None:
    sidecar = _sidecar_common(config, config.resolve_rates())
    sidecar["sweep"] = sweep_sidecar(result, __version__)
    if config["output_format"] != "json":
        csv_path = _out(config, args, f"{stem}.csv")
        _atomic_write(csv_path, sweep_csv_text(result))
        print(f"wrote {csv_path}")
    _write_json(_out(config, args, f"{stem}.json"), sidecar)
    print(f"wrote {_out(config, args, f'{stem}.json')}")


def _cmd_sweep_coupling(config: RunConfig, args) -> int:
    rates = config.resolve_rates()
    result = coupling_sweep(
        rates,
        config.coupling_ratio_list(),
        eps_ratio=rates.epsilon_ratio,
        omegas=config.omega_grid(rates.gamma),
    )
    _write_sweep(config, args, result, "sweep_coupling")
    return 0


def _cmd_sweep_pump(config: RunConfig, args) -> int:
    rates = config.resolve_rates()
    if abs(config["gamma_c_ratio"] - 1.0) > 1e-12:
        raise ConfigError("key 'gamma_c_ratio': sweep-pump requires ideal coupling (ratio 1.0)")
    result = pump_sweep(rates, config.pump_grid(), omegas=config.omega_grid(rates.gamma))
    _write_sweep(config, args, result, "sweep_pump")
    return 0


def _cmd_scaling_check(config: RunConfig, args) -> int:
    rates = config.resolve_rates()
    report = scaling_check(
        rates,
        config["scale"],
        omega_ratios=config.omega_grid(1.0),
    )
    payload = _sidecar_common(config, rates)
    payload["report"] = {
        "name": report.name,
        "max_abs_error": report.max_abs_error,
        "max_rel_error": report.max_rel_error,
        "passed": report.passed,
        "details": report.details,
    }
    _write_json(_out(config, args, "scaling_check.json"), payload)
    print(report.row())
    return 0 if report.passed else 3


def _cmd_validate(config: RunConfig, args) -> int:
    from .oracle import validate_model

    rates = config.resolve_rates()
    reports = validate_model(rates)
    payload = _sidecar_common(config, rates)
    payload["reports"] = [
        {
            "name": r.name,
            "max_abs_error": r.max_abs_error,
            "max_rel_error": r.max_rel_error,
            "passed": r.passed,
            "details": r.details,
        }
        for r in reports
    ]
    _write_json(_out(config, args, "validate.json"), payload)
    for r in reports:
        print(r.row())
    return 0 if all(r.passed for r in reports) else 3


_SUBCOMMANDS = {
    "steady-state": (_cmd_steady_state, "classical steady state as JSON"),
    "spectrum": (_cmd_spectrum, "single-quadrature output noise spectra"),
    "vlf": (_cmd_vlf, "optimized multipartite witness traces"),
    "sweep-coupling": (_cmd_sweep_coupling, "witness traces versus gammac/gamma"),
    "sweep-pump": (_cmd_sweep_pump, "witness minima versus pump amplitude"),
    "scaling-check": (_cmd_scaling_check, "damping-rescale invariance check"),
    "validate": (_cmd_validate, "run all brute-force validators"),
}


def _build_parser() -> argparse.ArgumentParser:
    key_help = "\n".join(
        f"  {key:<16s} default {default!r}: {text}"
        for key, (_, default, text) in _CONFIG_SCHEMA.items()
    )
    parser = argparse.ArgumentParser(
        prog="kerrcomb",
        description="Five-mode Kerr comb quantum noise and entanglement witnesses.",
        epilog=(
            "configuration keys (file 'key = value' lines or --set key=value):\n"
            f"{key_help}\n\n"
            f"environment: KERRCOMB_THREADS limits sweep-point worker threads.\n"
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"kerrcomb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_func, help_text) in _SUBCOMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="path to a key = value configuration file")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one configuration key (repeatable)",
        )
        p.add_argument("--output-dir", help="override the output directory")
        if name == "vlf":
            p.add_argument(
                "--global-gains",
                action="store_true",
                help=(
                    "hold one gain set per witness fixed over the whole trace "
                    "(taken at its per-frequency-optimized minimum) instead of "
                    "re-optimizing gains at every analysis frequency"
                ),
            )
    return parser


def run(argv) -> int:
    """Entry point used by the console script; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not hasattr(args, "global_gains"):
        args.global_gains = False
    try:
        if args.config is not None:
            try:
                with open(args.config, "r") as handle:
                    text = handle.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config file {args.config!r}: {exc}") from exc
            config = parse_config(text)
        else:
            config = parse_config("")
        for item in args.overrides:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            key, _, raw = item.partition("=")
            config.set(key.strip(), raw.strip(), where="--set: ")
        config.validate()
        return _SUBCOMMANDS[args.command][0](config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
