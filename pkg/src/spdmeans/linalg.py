"""Validated SPD matrices and the primitive matrix functions behind every mean.

The two-matrix geometric mean ``sharp`` and the geodesic operator ``sharp_t``
are computed in the congruence-stable form

    A # B   = A^(1/2) (A^(-1/2) B A^(-1/2))^(1/2) A^(1/2)
    A #_t B = A^(1/2) (A^(-1/2) B A^(-1/2))^t     A^(1/2)

which agrees with the textbook form A (A^-1 B)^t but only ever takes roots of
symmetric matrices.  All spectral work happens in the selected kernel backend.

Operation counting follows the convention of the benchmark tables this
package reproduces: one ``sharp`` charges one square-root unit, one
``sharp_t`` with t = 1/p (integer p >= 2) charges one p-th-root unit, and
every other power is free.  Counters are plain mutable tallies confined to a
single computation; nothing here shares state otherwise.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from . import backends
from .errors import (
    DimensionMismatchError,
    InvalidOrderError,
    NotPositiveDefiniteError,
    NotSymmetricError,
)

if TYPE_CHECKING:  # pragma: no cover
    from .perm import Permutation

DEFAULT_SYM_TOL = 1e-12


class OpCounters:
    """Running tally of sqrt-type and p-th-root-type matrix function calls."""

    __slots__ = ("sqrt_count", "proot_count")

    def __init__(self, sqrt_count: int = 0, proot_count: int = 0):
        self.sqrt_count = sqrt_count
        self.proot_count = proot_count

    def add_sqrt(self) -> None:
        self.sqrt_count += 1

    def add_proot(self) -> None:
        self.proot_count += 1

    def snapshot(self) -> "OpCounters":
        return OpCounters(self.sqrt_count, self.proot_count)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OpCounters):
            return NotImplemented
        return (self.sqrt_count, self.proot_count) == (other.sqrt_count, other.proot_count)

    def __repr__(self) -> str:
        return f"OpCounters(sqrt_count={self.sqrt_count}, proot_count={self.proot_count})"


class SpdMatrix:
    """Immutable real symmetric positive definite matrix.

    Instances are produced by :func:`make_spd` (validating) or internally by
    trusted constructions; the wrapped array is read-only.
    """

    __slots__ = ("_values",)

    def __init__(self, values: np.ndarray):
        # Internal: assumes a validated, symmetrized float64 array.
        self._values = values

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dim(self) -> int:
        return self._values.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self._values.astype(dtype)
        return self._values

    def __repr__(self) -> str:
        return f"SpdMatrix(dim={self.dim})"

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._values)))

    def allclose(self, other: "SpdMatrix", rtol: float = 1e-12) -> bool:
        scale = max(self.max_abs(), other.max_abs(), np.finfo(float).tiny)
        return float(np.max(np.abs(self._values - other._values))) <= rtol * scale


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.flags.writeable = False
    return arr


def _trusted(arr: np.ndarray) -> SpdMatrix:
    # Fast path for results that are SPD by construction (spectral forms).
    return SpdMatrix(_freeze(arr))


def make_spd(raw, sym_tol: float = DEFAULT_SYM_TOL) -> SpdMatrix:
    """Validate and wrap a raw square array as an SPD matrix.

    Parameters
    ----------
    raw : array_like, shape (m, m)
        Candidate matrix. Symmetrized as (X + X^T)/2 after validation.
    sym_tol : float
        Relative symmetry tolerance; also scales the positive-definiteness
        threshold by the largest absolute entry.

    Raises
    ------
    NotSymmetricError
        If max |X - X^T| exceeds sym_tol times the largest absolute entry.
    NotPositiveDefiniteError
        If the smallest eigenvalue of the symmetrized matrix is not positive.
    """
    x = np.asarray(raw, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {x.shape}")
    scale = float(np.max(np.abs(x)))
    asym = float(np.max(np.abs(x - x.T)))
    if asym > sym_tol * max(scale, np.finfo(float).tiny):
        raise NotSymmetricError(
            f"asymmetry {asym:.3e} exceeds tolerance {sym_tol:.1e} * {scale:.3e}"
        )
    sym = 0.5 * (x + x.T)
    min_eig = float(np.linalg.eigvalsh(sym)[0])
    if min_eig <= sym_tol * max(scale, np.finfo(float).tiny):
        raise NotPositiveDefiniteError(f"smallest eigenvalue {min_eig:.3e} is not positive")
    return SpdMatrix(_freeze(sym))


def identity_spd(dim: int) -> SpdMatrix:
    return _trusted(np.eye(dim))


def diag_spd(entries: Sequence[float]) -> SpdMatrix:
    entries = np.asarray(entries, dtype=np.float64)
    if np.min(entries) <= 0:
        raise NotPositiveDefiniteError("diagonal entries must be positive")
    return _trusted(np.diag(entries))


class MatrixTuple:
    """Ordered tuple of n >= 2 SPD matrices of one common dimension."""

    __slots__ = ("items",)

    def __init__(self, items: Iterable[SpdMatrix]):
        items = tuple(items)
        if len(items) < 2:
            raise DimensionMismatchError("a matrix tuple needs at least 2 matrices")
        dim = items[0].dim
        for k, m in enumerate(items):
            if m.dim != dim:
                raise DimensionMismatchError(
                    f"matrix {k + 1} has dim {m.dim}, expected {dim}"
                )
        self.items = items

    @classmethod
    def from_arrays(cls, arrays, sym_tol: float = DEFAULT_SYM_TOL) -> "MatrixTuple":
        return cls(make_spd(a, sym_tol) for a in arrays)

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def dim(self) -> int:
        return self.items[0].dim

    def arrays(self) -> list[np.ndarray]:
        return [m.values for m in self.items]

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, k: int) -> SpdMatrix:
        return self.items[k]

    def __repr__(self) -> str:
        return f"MatrixTuple(n={self.n}, dim={self.dim})"

    def max_abs(self) -> float:
        return max(m.max_abs() for m in self.items)

    def is_scalar(self, tol: float = 1e-12) -> bool:
        """True if all entries agree within tol relative to the largest entry."""
        first = self.items[0].values
        scale = max(self.max_abs(), np.finfo(float).tiny)
        return all(
            float(np.max(np.abs(m.values - first))) <= tol * scale for m in self.items[1:]
        )

    def permuted(self, sigma: "Permutation") -> "MatrixTuple":
        """Tuple with component i equal to item sigma(i) (1-based)."""
        if sigma.degree != self.n:
            raise DimensionMismatchError(
                f"permutation degree {sigma.degree} != tuple size {self.n}"
            )
        return MatrixTuple(self.items[sigma(i) - 1] for i in range(1, self.n + 1))


# ---------------------------------------------------------------------------
# array-level primitives (used by the means' inner loops)


def _power_arr(a: np.ndarray, t: float) -> np.ndarray:
    return backends.active().spectral_power(a, float(t))


def _count_geodesic(counters: OpCounters | None, t: float) -> None:
    # t = 1/p for integer p >= 2 charges one p-th-root unit; other t are free.
    if counters is None or t <= 0.0:
        return
    p = round(1.0 / t)
    if p >= 2 and abs(p * t - 1.0) <= 1e-12:
        counters.add_proot()


def _sharp_arr(a: np.ndarray, b: np.ndarray, counters: OpCounters | None = None) -> np.ndarray:
    if counters is not None:
        counters.add_sqrt()
    return backends.active().geodesic(a, b, 0.5)


def _sharp_t_arr(
    a: np.ndarray, b: np.ndarray, t: float, counters: OpCounters | None = None
) -> np.ndarray:
    _count_geodesic(counters, t)
    return backends.active().geodesic(a, b, float(t))


# ---------------------------------------------------------------------------
# public operations


def mat_power(a: SpdMatrix, t: float) -> SpdMatrix:
    """Spectral power A^t = Q diag(lambda^t) Q^T; SPD for every real t."""
    return _trusted(_power_arr(a.values, t))


def mat_sqrt(a: SpdMatrix, counters: OpCounters | None = None) -> SpdMatrix:
    """Principal square root; charges one square-root unit."""
    if counters is not None:
        counters.add_sqrt()
    return _trusted(_power_arr(a.values, 0.5))


def mat_proot(a: SpdMatrix, p: int, counters: OpCounters | None = None) -> SpdMatrix:
    """Principal p-th root for integer p >= 2; charges one p-th-root unit."""
    if not isinstance(p, (int, np.integer)) or p < 2:
        raise InvalidOrderError(f"p-th root needs an integer p >= 2, got {p!r}")
    if counters is not None:
        counters.add_proot()
    return _trusted(_power_arr(a.values, 1.0 / p))


def _check_same_dim(a: SpdMatrix, b: SpdMatrix) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")


def sharp(a: SpdMatrix, b: SpdMatrix, counters: OpCounters | None = None) -> SpdMatrix:
    """Two-matrix geometric mean A # B.

    The unique SPD solution interpolating A and B halfway along the
    Riemannian geodesic; symmetric in its arguments and congruence
    invariant.  Charges exactly one square-root unit.
    """
    _check_same_dim(a, b)
    return _trusted(_sharp_arr(a.values, b.values, counters))


def sharp_t(
    a: SpdMatrix, b: SpdMatrix, t: float, counters: OpCounters | None = None
) -> SpdMatrix:
    """Geodesic point A #_t B; t = 0 gives A, t = 1 gives B, t = 1/2 gives A # B.

    Charges one p-th-root unit when t = 1/p for an integer p >= 2, nothing
    otherwise.
    """
    _check_same_dim(a, b)
    return _trusted(_sharp_t_arr(a.values, b.values, t, counters))
