"""Sweeps, gap handling, determinism and the scaling check."""

import json

import numpy as np
import pytest

from kerrcomb import (
    RateParams,
    coupling_sweep,
    pump_sweep,
    scaling_check,
    write_sweep_csv,
    write_sweep_json,
)
from kerrcomb.experiments import GAIN_COLUMNS, sweep_csv_text
from kerrcomb.spectra import default_omega_grid

from conftest import GAMMA, G, rates_at

SMALL_GRID = default_omega_grid(GAMMA, points=41)


class TestCouplingSweep:
    def test_decoupled_output_is_exactly_shot_noise(self):
        result = coupling_sweep(rates_at(), [0.0], omegas=SMALL_GRID)
        np.testing.assert_allclose(result.s_values, 4.0, atol=1e-12)
        np.testing.assert_allclose(result.gains, 0.0, atol=1e-12)

    def test_traces_and_shapes(self):
        ratios = [0.34, 1.0]
        result = coupling_sweep(rates_at(), ratios, omegas=SMALL_GRID)
        assert result.axis_name == "gamma_c_ratio"
        assert result.s_values.shape == (2, len(SMALL_GRID), 4)
        assert result.stable.all()
        assert result.traces["min_S1"][1] < result.traces["min_S1"][0]
        assert len(result.points) == 2
        assert result.points[0]["above_threshold"]

    def test_ratio_validation(self):
        with pytest.raises(ValueError, match="ratios"):
            coupling_sweep(rates_at(), [0.5, 1.2], omegas=SMALL_GRID)

    def test_pump_pinned_to_ratio(self):
        result = coupling_sweep(rates_at(eps_ratio=0.7), [1.0], eps_ratio=1.15, omegas=SMALL_GRID)
        assert result.points[0]["epsilon_ratio"] == pytest.approx(1.15, rel=1e-12)


class TestPumpSweep:
    def test_requires_ideal_coupling(self):
        with pytest.raises(ValueError, match="ideal coupling"):
            pump_sweep(rates_at(0.8), [1.1], omegas=SMALL_GRID)

    def test_range_validation(self):
        with pytest.raises(ValueError, match="pump ratios"):
            pump_sweep(rates_at(), [0.9, 1.1], omegas=SMALL_GRID)

    def test_unstable_points_recorded_as_gaps(self):
        # the steady state loses stability near 1.43 times threshold
        result = pump_sweep(rates_at(), [1.1, 1.45], omegas=SMALL_GRID)
        assert result.stable.tolist() == [True, False]
        assert np.isfinite(result.s_values[0]).all()
        assert np.isnan(result.s_values[1]).all()
        assert result.metadata["unstable_points"] == [1.45]
        assert np.isnan(result.traces["min_S1"][1])
        assert not result.points[1]["stable"]
        assert result.points[1]["max_real_part"] > 0

    def test_regime_change_detected(self):
        grid = np.round(np.arange(1.05, 1.1501, 0.01), 10)
        result = pump_sweep(rates_at(), grid, omegas=default_omega_grid(GAMMA, points=201))
        changes = result.metadata["regime_changes"]["S3"]
        assert changes, "expected a minimizing-frequency jump in [1.05, 1.15]"
        assert any(1.05 <= c["axis_low"] and c["axis_high"] <= 1.15 for c in changes)

    def test_argmin_metadata(self):
        grid = [1.1, 1.15, 1.2]
        result = pump_sweep(rates_at(), grid, omegas=SMALL_GRID)
        argmin = result.metadata["argmin_eps_ratio"]
        assert argmin["S3"] in grid


class TestScalingCheck:
    def test_identity_scale(self):
        report = scaling_check(rates_at(1.0, 1.15), 1.0, omega_ratios=SMALL_GRID / GAMMA)
        assert report.passed
        assert report.max_abs_error == 0.0  # bitwise-identical inputs

    def test_damping_rescale_invariance(self):
        report = scaling_check(rates_at(0.8, 1.15), 2.0, omega_ratios=SMALL_GRID / GAMMA)
        assert report.passed
        assert report.max_rel_error <= 1e-8

    def test_negative_control(self):
        report = scaling_check(
            rates_at(1.0, 1.15), 2.0, omega_ratios=SMALL_GRID / GAMMA, preserve_pump_ratio=False
        )
        assert not report.passed
        assert report.max_rel_error > 1e-3

    def test_scale_validation(self):
        with pytest.raises(ValueError, match="scale"):
            scaling_check(rates_at(), 0.0)


class TestOutputs:
    def test_csv_deterministic(self):
        a = sweep_csv_text(coupling_sweep(rates_at(), [0.5, 1.0], omegas=SMALL_GRID))
        b = sweep_csv_text(coupling_sweep(rates_at(), [0.5, 1.0], omegas=SMALL_GRID))
        assert a == b

    def test_csv_layout(self, tmp_path):
        result = coupling_sweep(rates_at(), [0.5], omegas=SMALL_GRID)
        path = tmp_path / "sweep.csv"
        write_sweep_csv(result, str(path))
        lines = path.read_text().splitlines()
        header = lines[0].split(",")
        assert header[:6] == ["gamma_c_ratio", "omega_over_gamma", "S1", "S2", "S3", "S4"]
        assert tuple(header[6:]) == GAIN_COLUMNS
        assert len(lines) == 1 + len(SMALL_GRID)
        # 17-significant-digit serialization round-trips exactly
        value = lines[1].split(",")[2]
        assert float(value) == result.s_values[0, 0, 0]

    def test_nan_rows_for_gaps(self, tmp_path):
        result = pump_sweep(rates_at(), [1.45], omegas=SMALL_GRID)
        text = sweep_csv_text(result)
        row = text.splitlines()[1].split(",")
        assert row[2] == "nan"

    def test_json_sidecar(self, tmp_path):
        result = pump_sweep(rates_at(), [1.1, 1.45], omegas=SMALL_GRID)
        path = tmp_path / "sweep.json"
        write_sweep_json(result, str(path), version="test")
        payload = json.loads(path.read_text())
        assert payload["tool_version"] == "test"
        assert payload["axis_values"] == [1.1, 1.45]
        assert payload["points"][0]["stable"] is True
        assert payload["points"][1]["stable"] is False
        assert payload["metadata"]["unstable_points"] == [1.45]

    def test_parallel_matches_serial(self, monkeypatch):
        serial = sweep_csv_text(coupling_sweep(rates_at(), [0.4, 0.9], omegas=SMALL_GRID))
        monkeypatch.setenv("KERRCOMB_THREADS", "4")
        parallel = sweep_csv_text(coupling_sweep(rates_at(), [0.4, 0.9], omegas=SMALL_GRID))
        assert serial == parallel
