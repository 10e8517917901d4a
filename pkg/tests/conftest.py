import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_su2(rng):
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    a, b, c, d = q
    return np.array([[a - 1j * d, -c - 1j * b], [c - 1j * b, a + 1j * d]])


def random_unitary2(rng):
    return np.exp(1j * rng.uniform(0, 2 * np.pi)) * random_su2(rng)
