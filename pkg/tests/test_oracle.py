"""Independent validators: finite differences, Lyapunov, grid search."""

import numpy as np
import pytest

from kerrcomb import (
    QuadratureSpectrum,
    RateParams,
    UnstableModelError,
    grid_search_gains,
    linear_model,
    lyapunov_covariance,
    lyapunov_crosscheck,
    numeric_jacobian,
    optimize_gains,
    spectrum_integral,
    steady_state,
)
from kerrcomb.linearize import drift_matrix
from kerrcomb.oracle import damped_projector, validate_model
from kerrcomb.spectra import _quadrature_batch, _spectral_batch

from test_spectra import toy_model
from conftest import GAMMA, G, rates_at


class TestNumericJacobian:
    def test_tiny_coupling_is_pure_decay(self):
        r = RateParams.from_ratio(1e5, 1.0, 1e-30, epsilon=5e4)
        jac = numeric_jacobian(r, steady_state(r))
        np.testing.assert_allclose(jac, -r.gamma * np.eye(10), atol=1e-4)

    def test_matches_analytic_at_headline_point(self):
        r = rates_at(1.0, 1.15)
        ss = steady_state(r)
        analytic = drift_matrix(r, ss)
        numeric = numeric_jacobian(r, ss)
        assert np.abs(analytic - numeric).max() / np.abs(analytic).max() <= 1e-6

    def test_truncation_free_central_differences(self):
        # no drift row is more than quadratic in any single phase-space
        # variable, so coordinate-wise central differences carry no h**2
        # truncation term: the error stays at rounding level over four
        # decades of step size instead of growing quadratically
        r = rates_at(1.0, 1.3)
        ss = steady_state(r)
        analytic = drift_matrix(r, ss)
        scale = np.abs(analytic).max()

        def error(step_scale):
            base = np.array([ss.a_p, ss.a_a, ss.a_a, ss.a_b, ss.a_b] * 2, dtype=complex)
            step = step_scale * max(1.0, ss.a_p)
            from kerrcomb.linearize import drift_vector

            jac = np.zeros((10, 10), dtype=complex)
            for j in range(10):
                bump = np.zeros(10, dtype=complex)
                bump[j] = step
                jac[:, j] = (drift_vector(r, base + bump) - drift_vector(r, base - bump)) / (
                    2 * step
                )
            return np.abs(jac - analytic).max() / scale

        errors = [error(s) for s in (1e-6, 1e-4, 1e-2)]
        assert max(errors) < 1e-8
        # quadratic truncation growth from 1e-4 to 1e-2 would be 1e4x
        assert errors[2] < 100 * max(errors[1], 1e-15)


class TestLyapunovCovariance:
    def test_scalar_ornstein_uhlenbeck(self):
        d = 0.7 * GAMMA
        cov = lyapunov_covariance(-GAMMA * np.eye(10, dtype=complex), d * np.eye(10, dtype=complex))
        np.testing.assert_allclose(cov, d / (2 * GAMMA) * np.eye(10), rtol=1e-12)

    def test_zero_diffusion(self):
        cov = lyapunov_covariance(-GAMMA * np.eye(10, dtype=complex), np.zeros((10, 10), complex))
        np.testing.assert_allclose(cov, 0.0, atol=1e-300)

    def test_unstable_rejected(self):
        m = np.diag(np.concatenate([[0.1 * GAMMA], -GAMMA * np.ones(9)])).astype(complex)
        with pytest.raises(UnstableModelError, match="unstable"):
            lyapunov_covariance(m, np.eye(10, dtype=complex))

    def test_strictly_stable_residual(self):
        lm = linear_model(rates_at(1.0, 0.8))
        cov = lyapunov_covariance(lm.drift, lm.diffusion)
        residual = lm.drift @ cov + cov @ lm.drift.T + lm.diffusion
        assert np.abs(residual).max() <= 1e-10 * np.abs(lm.diffusion).max()

    def test_marginal_mode_residual_is_rank_one(self, headline_model):
        # above threshold one exact zero mode makes the equation inconsistent
        # in a single rank-one direction; everything else is solved exactly
        lm = headline_model
        cov = lyapunov_covariance(lm.drift, lm.diffusion)
        residual = lm.drift @ cov + cov @ lm.drift.T + lm.diffusion
        proj = damped_projector(lm.drift)
        projected = proj @ residual @ proj.T
        assert np.abs(projected).max() <= 1e-9 * np.abs(lm.diffusion).max()

    def test_projector_identity_when_stable(self):
        lm = linear_model(rates_at(1.0, 0.8))
        np.testing.assert_allclose(damped_projector(lm.drift), np.eye(10), atol=1e-12)


class TestSpectrumIntegral:
    def test_zero_diffusion(self):
        lm = toy_model(-GAMMA * np.eye(10), np.zeros((10, 10)))
        np.testing.assert_array_equal(spectrum_integral(lm, 50 * GAMMA, 1000), np.zeros((10, 10)))

    def test_scalar_convergence(self):
        d = 1.3 * GAMMA
        lm = toy_model(-GAMMA * np.eye(10), d * np.eye(10))
        for half_width in (50 * GAMMA, 200 * GAMMA):
            integral = spectrum_integral(lm, half_width, 40000)
            expected = d / (2 * GAMMA) * (2 / np.pi) * np.arctan(half_width / GAMMA)
            np.testing.assert_allclose(integral, expected * np.eye(10), rtol=1e-6)
        # wide window approaches the stationary variance d/(2 gamma)
        integral = spectrum_integral(lm, 1000 * GAMMA, 40000)
        np.testing.assert_allclose(integral, d / (2 * GAMMA) * np.eye(10), rtol=2e-3)

    def test_odd_point_count_bumped(self, headline_model):
        a = spectrum_integral(headline_model, 10 * GAMMA, 1001)
        b = spectrum_integral(headline_model, 10 * GAMMA, 1002)
        np.testing.assert_array_equal(a, b)

    def test_input_validation(self, headline_model):
        with pytest.raises(ValueError, match="half_width"):
            spectrum_integral(headline_model, 0.0, 100)
        with pytest.raises(ValueError, match="points"):
            spectrum_integral(headline_model, GAMMA, 1)


class TestLyapunovCrosscheck:
    def test_below_threshold_full_comparison(self):
        lm = linear_model(rates_at(1.0, 0.8))
        report = lyapunov_crosscheck(lm)
        assert report.passed
        assert report.max_rel_error <= 0.01
        # no marginal mode below threshold: also verify without projection
        cov = lyapunov_covariance(lm.drift, lm.diffusion)
        integral = spectrum_integral(lm, 200 * GAMMA, 20000)
        assert np.abs(integral - cov).max() / np.abs(cov).max() <= 0.01

    def test_above_threshold_damped_subspace(self, headline_model):
        report = lyapunov_crosscheck(headline_model)
        assert report.passed
        assert report.max_rel_error <= 0.01


class TestGridSearchGains:
    def test_vacuum(self):
        qs = QuadratureSpectrum(0.0, np.zeros((10, 10), complex))
        gains, value = grid_search_gains(qs, 1, GAMMA, gain_range=3.0, steps=7)
        assert value == pytest.approx(4.0, abs=1e-10)
        assert all(abs(v) < 1e-6 for v in gains.values())

    def test_agrees_with_closed_form(self, rng):
        # random operating points spanning pump, coupling and frequency
        worst = 0.0
        for _ in range(20):
            r = rates_at(float(rng.uniform(0.3, 1.0)), float(rng.uniform(1.02, 1.4)))
            lm = linear_model(r)
            ratio = float(rng.uniform(1e-3, 5.0))
            sq = _quadrature_batch(_spectral_batch(lm, np.array([ratio * r.gamma])))[0]
            qs = QuadratureSpectrum(ratio * r.gamma, sq)
            index = int(rng.integers(1, 5))
            _, closed = optimize_gains(qs, index, r.gammac)
            _, searched = grid_search_gains(qs, index, r.gammac)
            worst = max(worst, abs(closed - searched))
        assert worst <= 1e-6

    def test_nested_grids_non_increasing(self, headline_model):
        sq = _quadrature_batch(
            _spectral_batch(headline_model, np.array([0.5 * GAMMA]))
        )[0]
        qs = QuadratureSpectrum(0.5 * GAMMA, sq)
        values = [
            grid_search_gains(qs, 3, headline_model.rates.gammac, steps=steps)[1]
            for steps in (5, 9, 17)
        ]
        assert values[1] <= values[0] + 1e-9
        assert values[2] <= values[1] + 1e-9


class TestValidateModel:
    def test_all_pass_at_headline_point(self):
        reports = validate_model(rates_at(1.0, 1.15))
        names = [r.name for r in reports]
        assert "steady_state_check" in names
        assert "lyapunov_crosscheck" in names
        assert all(r.passed for r in reports), [r.row() for r in reports]

    def test_unstable_point_reported(self):
        reports = validate_model(rates_at(1.0, 1.6))
        by_name = {r.name: r for r in reports}
        assert not by_name["stability_check"].passed
        assert "lyapunov_crosscheck" not in by_name
