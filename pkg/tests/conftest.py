import numpy as np
import pytest

from spdmeans import backends
from spdmeans.fixtures import spread4
from spdmeans.lab import SpdSampler, sample_spd


@pytest.fixture(scope="session", autouse=True)
def warm_backend():
    # keep JIT compilation out of individual tests and timing assertions
    backends.warmup()


@pytest.fixture(scope="session")
def spread():
    return spread4()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)


def random_spd_pairs(seed: int, count: int, dims=(2, 3, 4, 5, 6)):
    """Seeded SPD pairs cycling through the given dimensions."""
    pairs = []
    per_dim = count // len(dims) + 1
    for k, dim in enumerate(dims):
        mats = sample_spd(SpdSampler(seed=seed + k, dim=dim, count=2 * per_dim))
        pairs.extend(zip(mats[::2], mats[1::2]))
    return pairs[:count]
