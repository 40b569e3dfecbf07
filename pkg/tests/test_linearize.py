"""Drift vector/matrix, diffusion matrix, noise factor and stability."""

import numpy as np
import pytest

from kerrcomb import (
    RateParams,
    SteadyState,
    diffusion_matrix,
    drift_matrix,
    drift_vector,
    linear_model,
    noise_factor,
    stability,
    steady_state,
    steady_state_residual,
)
from kerrcomb.linearize import jacobian_at
from kerrcomb.oracle import numeric_jacobian

from conftest import COUPLING_RATIOS, rates_at


def printed_blocks(rates, ss):
    """The drift-matrix blocks as printed entry by entry (regression data)."""
    g = rates.g
    gamma = rates.gamma
    ap, aa, ab = ss.a_p, ss.a_a, ss.a_b
    off = -g * aa * ab - 2 * g * ap * aa + 2 * g * aa * ab
    m1 = np.array(
        [
            [-gamma, off, off, -g * aa**2, -g * aa**2],
            [-off, -gamma, 0, -3 * g * ap * aa, 0],
            [-off, 0, -gamma, 0, -3 * g * ap * aa],
            [g * aa**2, 3 * g * ap * aa, 0, -gamma, 0],
            [g * aa**2, 0, 3 * g * ap * aa, 0, -gamma],
        ]
    )
    m2 = np.array(
        [
            [-2 * g * aa**2, -g * aa * ab, -g * aa * ab, g * aa**2, g * aa**2],
            [-g * aa * ab, -2 * g * ap * ab, g * ap**2, 0, g * aa * ap],
            [-g * aa * ab, g * ap**2, -2 * g * ap * ab, g * aa * ap, 0],
            [g * aa**2, 0, g * aa * ap, 0, 0],
            [g * aa**2, g * aa * ap, 0, 0, 0],
        ]
    )
    return m1, m2


def random_above_threshold(rng):
    gamma = float(rng.uniform(1e4, 1e7))
    g = float(rng.uniform(1e-6, 1e-2))
    return RateParams.from_ratio(
        gamma,
        float(rng.uniform(0.0, 1.0)),
        g,
        epsilon_ratio=float(rng.uniform(1.01, 1.4)),
    )


class TestDriftVector:
    def test_zero_state_leaves_only_pump_drive(self):
        r = rates_at(eps_ratio=1.15)
        f = drift_vector(r, np.zeros(10, dtype=complex))
        expected = np.zeros(10, dtype=complex)
        expected[0] = expected[5] = r.epsilon
        np.testing.assert_array_equal(f, expected)

    def test_linear_decay_limit(self):
        # g = 0 cannot be represented by RateParams (g > 0); a vanishingly
        # small g exposes the same linear-decay structure
        r = RateParams.from_ratio(1e5, 1.0, 1e-30, epsilon=2e5)
        state = np.zeros(10, dtype=complex)
        state[0] = state[5] = 3.0
        f = drift_vector(r, state)
        assert f[0] == pytest.approx(r.epsilon - r.gamma * 3.0, rel=1e-12)
        np.testing.assert_allclose(f[1:5], 0.0, atol=1e-12)

    def test_vanishes_at_steady_state(self):
        r = rates_at(eps_ratio=1.15)
        ss = steady_state(r)
        assert steady_state_residual(r, ss) <= 1e-10

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError, match="10-vector"):
            drift_vector(rates_at(), np.zeros(5))


class TestDriftMatrix:
    def test_below_threshold_structure(self):
        r = rates_at(eps_ratio=0.6)
        ss = steady_state(r)
        m = drift_matrix(r, ss)
        kappa = r.g * ss.a_p**2
        m1 = np.full((5, 5), 0.0)
        np.fill_diagonal(m1, -r.gamma)
        m2 = np.zeros((5, 5))
        m2[1, 2] = m2[2, 1] = kappa
        np.testing.assert_allclose(m[:5, :5], m1, atol=1e-9 * r.gamma)
        np.testing.assert_allclose(m[:5, 5:], m2, atol=1e-9 * r.gamma)

    def test_printed_entries_regression(self):
        r = rates_at(eps_ratio=1.15)
        ss = steady_state(r)
        m = drift_matrix(r, ss)
        m1, m2 = printed_blocks(r, ss)
        np.testing.assert_allclose(m[:5, :5], m1, rtol=1e-12, atol=1e-12 * r.gamma)
        np.testing.assert_allclose(m[:5, 5:], m2, rtol=1e-12, atol=1e-12 * r.gamma)
        # standout single entries
        assert m[3, 1] == pytest.approx(3 * r.g * ss.a_p * ss.a_a, rel=1e-12)
        assert m[0, 5] == pytest.approx(-2 * r.g * ss.a_a**2, rel=1e-12)
        assert m[1, 2] == pytest.approx(0.0, abs=1e-12 * r.gamma)

    def test_conjugate_block_structure(self, rng):
        for _ in range(5):
            r = random_above_threshold(rng)
            m = drift_matrix(r, steady_state(r))
            np.testing.assert_allclose(m[5:, 5:], m[:5, :5].conj(), rtol=1e-14)
            np.testing.assert_allclose(m[5:, :5], m[:5, 5:].conj(), rtol=1e-14)

    def test_matches_finite_differences(self, rng):
        for _ in range(50):
            r = random_above_threshold(rng)
            ss = steady_state(r)
            analytic = drift_matrix(r, ss)
            numeric = numeric_jacobian(r, ss)
            err = np.abs(analytic - numeric).max() / np.abs(analytic).max()
            assert err <= 1e-6

    def test_signal_idler_exchange(self):
        # swapping s1<->i1 and s2<->i2 (both halves) permutes M and D into themselves
        perm = np.array([0, 2, 1, 4, 3, 5, 7, 6, 9, 8])
        r = rates_at(eps_ratio=1.2)
        ss = steady_state(r)
        m = drift_matrix(r, ss)
        d = diffusion_matrix(r, ss)
        np.testing.assert_allclose(m[np.ix_(perm, perm)], m, rtol=1e-14)
        np.testing.assert_allclose(d[np.ix_(perm, perm)], d, rtol=1e-14)

    def test_jacobian_at_fluctuation_state(self, rng):
        # non-physical states (starred half independent) are differentiated too
        r = rates_at(eps_ratio=1.1)
        state = rng.standard_normal(10) + 1j * rng.standard_normal(10)
        state *= 1e4
        jac = jacobian_at(r, state)
        step = 1e-6 * 1e4
        for j in (0, 3, 7):
            bump = np.zeros(10, dtype=complex)
            bump[j] = step
            col = (drift_vector(r, state + bump) - drift_vector(r, state - bump)) / (2 * step)
            np.testing.assert_allclose(jac[:, j], col, rtol=1e-6, atol=1e-6 * r.gamma)


class TestDiffusionMatrix:
    def test_zero_without_pump(self):
        r = rates_at(eps_ratio=0.0)
        d = diffusion_matrix(r, steady_state(r))
        np.testing.assert_array_equal(d, np.zeros((10, 10)))

    def test_below_threshold_two_entries(self):
        r = rates_at(eps_ratio=0.7)
        ss = steady_state(r)
        d = diffusion_matrix(r, ss)
        expected = np.zeros((10, 10), dtype=complex)
        kappa = r.g * ss.a_p**2
        expected[1, 2] = expected[2, 1] = kappa
        expected[6, 7] = expected[7, 6] = kappa
        np.testing.assert_allclose(d, expected, rtol=1e-14)

    def test_symmetric(self, rng):
        for _ in range(10):
            r = random_above_threshold(rng)
            d = diffusion_matrix(r, steady_state(r))
            np.testing.assert_array_equal(d, d.T)


class TestNoiseFactor:
    def test_zero(self):
        b = noise_factor(np.zeros((10, 10), dtype=complex))
        np.testing.assert_array_equal(b, np.zeros((10, 10)))

    def test_identity(self):
        b = noise_factor(np.eye(10, dtype=complex))
        np.testing.assert_allclose(b @ b.T, np.eye(10), atol=1e-12)

    @pytest.mark.parametrize("ratio", COUPLING_RATIOS)
    def test_residual_at_reference_points(self, ratio):
        lm = linear_model(rates_at(ratio, 1.15))
        b = noise_factor(lm.diffusion)
        bound = 1e-10 * (1 + np.abs(lm.diffusion).max())
        assert np.abs(b @ b.T - lm.diffusion).max() <= bound

    def test_random_complex_symmetric(self, rng):
        a = rng.standard_normal((10, 10)) + 1j * rng.standard_normal((10, 10))
        d = a + a.T
        b = noise_factor(d)
        assert np.abs(b @ b.T - d).max() <= 1e-10 * (1 + np.abs(d).max())

    def test_rejects_asymmetric(self):
        d = np.zeros((10, 10), dtype=complex)
        d[0, 1] = 1.0
        with pytest.raises(ValueError, match="symmetric"):
            noise_factor(d)


class TestStability:
    def test_pure_decay(self):
        rep = stability(-7.0 * np.eye(10, dtype=complex), gamma=7.0)
        assert rep.stable
        assert rep.max_real_part == pytest.approx(-7.0, rel=1e-12)

    def test_eigenvalues_in_conjugate_pairs(self, headline_model):
        gamma = headline_model.rates.gamma
        rep = stability(headline_model.drift, gamma)
        eig = rep.eigenvalues
        for value in eig:
            assert np.abs(eig - np.conj(value)).min() <= 1e-8 * gamma

    def test_undamped_parametric_block_unstable(self):
        # inserting an above-threshold pump amplitude into the below-threshold
        # matrix form gives the textbook 2x2 instability g*A_p^2 > gamma
        r = rates_at(eps_ratio=1.1)
        fake = SteadyState(a_p=r.epsilon / r.gamma, a_a=0.0, a_b=0.0, above_threshold=False)
        m = drift_matrix(r, fake)
        rep = stability(m, r.gamma)
        assert not rep.stable
        assert rep.max_real_part == pytest.approx(r.g * fake.a_p**2 - r.gamma, rel=1e-9)

    @pytest.mark.parametrize("ratio", COUPLING_RATIOS)
    def test_reference_points_stable(self, ratio):
        lm = linear_model(rates_at(ratio, 1.15))
        rep = stability(lm.drift, lm.rates.gamma)
        assert rep.stable
        # the free-phase mode sits at numerical zero, all others well damped
        real_parts = np.sort(rep.eigenvalues.real)
        assert abs(real_parts[-1]) < 1e-12 * lm.rates.gamma
        assert real_parts[-2] < -0.3 * lm.rates.gamma

    def test_high_pump_instability(self):
        lm = linear_model(rates_at(1.0, 1.6))
        rep = stability(lm.drift, lm.rates.gamma)
        assert not rep.stable
        assert rep.max_real_part > 0.1 * lm.rates.gamma
