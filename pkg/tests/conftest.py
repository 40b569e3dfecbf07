import numpy as np
import pytest

from kerrcomb import RateParams, linear_model

# Headline device rates used throughout: gamma = 4.02e5/s, g = 2.21e-4/s.
GAMMA = 4.02e5
G = 2.21e-4

# Out-coupling fractions of the four reference operating points.
COUPLING_RATIOS = (0.34, 0.57, 0.8, 1.0)


def rates_at(coupling_ratio=1.0, eps_ratio=1.15, gamma=GAMMA, g=G) -> RateParams:
    return RateParams.from_ratio(gamma, coupling_ratio, g, epsilon_ratio=eps_ratio)


@pytest.fixture(scope="session")
def headline_model():
    """Linearized model at ideal coupling, pump at 1.15 times threshold."""
    return linear_model(rates_at(1.0, 1.15))


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
