import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_measure(rng, dim, k_max=8, mass=None):
    """Random discrete measure with 1..k_max atoms (used by several test modules)."""
    from minkprobe.measures import DiscreteSphericalMeasure

    k = int(rng.integers(1, k_max + 1))
    n = rng.normal(size=(k, dim))
    n /= np.linalg.norm(n, axis=1)[:, None]
    w = rng.uniform(0.05, 1.0, size=k)
    if mass is not None:
        w *= mass / w.sum()
    return DiscreteSphericalMeasure(n, w)
