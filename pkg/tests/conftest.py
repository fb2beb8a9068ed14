import numpy as np
import pytest

from hypack.geometry import HPoint


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_point(rng, m=2, max_radius=10.0):
    r = rng.uniform(0.0, max_radius)
    d = rng.standard_normal(m)
    return HPoint.from_polar(r, d / np.linalg.norm(d))


def random_unit(rng, m):
    d = rng.standard_normal(m)
    return d / np.linalg.norm(d)
