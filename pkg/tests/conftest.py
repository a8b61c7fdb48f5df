import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "gnslab",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("gnslab")


@pytest.fixture
def gen():
    return np.random.default_rng(20240611)


def random_matrix(gen, n, m=None):
    m = n if m is None else m
    return gen.standard_normal((n, m)) + 1j * gen.standard_normal((n, m))
