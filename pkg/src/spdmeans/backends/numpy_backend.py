"""Pure-numpy reference kernels.

Every kernel takes and returns float64 C-contiguous square arrays and
symmetrizes its output to suppress round-off drift.
"""

import numpy as np

name = "numpy"


def spectral_power(a: np.ndarray, t: float) -> np.ndarray:
    """Spectral power Q diag(w**t) Q^T of a symmetric matrix, symmetrized."""
    w, q = np.linalg.eigh(a)
    out = (q * w**t) @ q.T
    return 0.5 * (out + out.T)


def geodesic(a: np.ndarray, b: np.ndarray, t: float) -> np.ndarray:
    """Point a^(1/2) (a^(-1/2) b a^(-1/2))^t a^(1/2), symmetrized.

    Congruence-stable form of the geodesic from a to b; t = 0.5 is the
    two-matrix geometric mean.
    """
    w, q = np.linalg.eigh(a)
    s = np.sqrt(w)
    root = (q * s) @ q.T
    inv_root = (q / s) @ q.T
    mid = inv_root @ b @ inv_root
    mid = 0.5 * (mid + mid.T)
    w2, q2 = np.linalg.eigh(mid)
    out = root @ ((q2 * w2**t) @ q2.T) @ root
    return 0.5 * (out + out.T)


def tuple_residual(prev: np.ndarray, cur: np.ndarray) -> float:
    """Max absolute entrywise difference between two stacked tuples."""
    return float(np.max(np.abs(prev - cur)))
