import numpy as np
import pytest

from smolgs.core import SplatCloud
from smolgs.fixtures import make_fixture


def random_cloud(rng: np.random.Generator, n: int, n_f: int = 8,
                 lo: float = -5.0, hi: float = 5.0) -> SplatCloud:
    xyz = rng.uniform(lo, hi, (n, 3))
    features = rng.normal(0.0, 1.0, (n, n_f))
    scales = rng.uniform(1e-3, 0.2, (n, 3))
    return SplatCloud(xyz, features, scales)


@pytest.fixture(scope="session")
def sphere_10k() -> SplatCloud:
    return make_fixture("sphere", 10_000, n_f=8, seed=1234)


@pytest.fixture(scope="session")
def sphere_small() -> SplatCloud:
    return make_fixture("sphere", 1_000, n_f=8, seed=99)
