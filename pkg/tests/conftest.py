import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from armagraph.designer import design_modified_error, design_wls
from armagraph.grid import DesignSpec, build_grid

settings.register_profile(
    "default", max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("fast", max_examples=10, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def example_spec():
    return DesignSpec()


@pytest.fixture(scope="session")
def example_grid(example_spec):
    return build_grid(example_spec)


@pytest.fixture(scope="session")
def example_design(example_spec):
    return design_wls(example_spec)


@pytest.fixture(scope="session")
def example_baseline(example_spec):
    return design_modified_error(example_spec)


@pytest.fixture
def rng():
    return np.random.default_rng(20211006)


def random_stable_alpha(rng, q, margin=0.2):
    """Denominator coefficients whose l1 norm keeps 1 + c_Q^T alpha >= margin."""
    alpha = rng.standard_normal(q)
    if q:
        alpha *= (1.0 - margin) * rng.uniform(0.1, 1.0) / np.sum(np.abs(alpha))
    return alpha
