"""Built-in matrix-tuple fixtures for the CLI, benchmarks, and tests.

All randomness flows from one seed, overridable with the SPDMEANS_SEED
environment variable.
"""

from __future__ import annotations

import os

import numpy as np

from .lab import SpdSampler, sample_spd
from .linalg import MatrixTuple, identity_spd, make_spd, mat_power

SEED_ENV = "SPDMEANS_SEED"
DEFAULT_SEED = 20260314


def fixture_seed(seed: int | None = None) -> int:
    if seed is not None:
        return seed
    return int(os.environ.get(SEED_ENV, DEFAULT_SEED))


def spread4() -> MatrixTuple:
    """Four well-separated 3x3 matrices, the standard 4-matrix benchmark tuple."""
    a = np.eye(3)
    b = np.diag([3.0, 4.0, 100.0])
    c = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]])
    d = np.array([[20.0, 0.0, -10.0], [0.0, 20.0, 0.0], [-10.0, 0.0, 20.0]])
    return MatrixTuple.from_arrays([a, b, c, d])


def powers_of_m(seed: int | None = None, dim: int = 6) -> MatrixTuple:
    """(M^-2, M, M^2, M^3) for a seeded random SPD M; their mean must be M."""
    sampler = SpdSampler(seed=fixture_seed(seed), dim=dim, lo=0.5, hi=2.0, count=1)
    m = sample_spd(sampler)[0]
    return MatrixTuple([mat_power(m, -2.0), m, mat_power(m, 2.0), mat_power(m, 3.0)])


def scalar_tuple(n: int = 4, dim: int = 3) -> MatrixTuple:
    """n copies of the identity; the fixed point of every mean iteration."""
    return MatrixTuple([identity_spd(dim) for _ in range(n)])


def close_set(n: int, seed: int | None = None, dim: int = 6) -> MatrixTuple:
    """n nearby 6x6 SPD matrices, mimicking measured-data benchmark sets."""
    rng = np.random.default_rng(fixture_seed(seed) + n)
    sampler = SpdSampler(seed=fixture_seed(seed), dim=dim, lo=0.5, hi=2.0, count=1)
    base = sample_spd(sampler)[0].values
    mats = []
    for _ in range(n):
        s = np.eye(dim) + 0.05 * rng.standard_normal((dim, dim))
        mats.append(make_spd(s @ base @ s.T, sym_tol=1e-9))
    return MatrixTuple(mats)


FIXTURE_BUILDERS = {
    "spread4": lambda seed: spread4(),
    "powers-of-M": lambda seed: powers_of_m(seed),
    "scalar": lambda seed: scalar_tuple(),
    "close4": lambda seed: close_set(4, seed),
    "close5": lambda seed: close_set(5, seed),
    "close6": lambda seed: close_set(6, seed),
}

FIXTURE_NAMES = tuple(FIXTURE_BUILDERS)


def get_fixture(name: str, seed: int | None = None) -> MatrixTuple:
    try:
        builder = FIXTURE_BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}")
    return builder(seed)
