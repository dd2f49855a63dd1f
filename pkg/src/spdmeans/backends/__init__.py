"""Kernel backend selection.

The hot kernels (spectral powers and geodesic points of small dense SPD
matrices) exist twice: a numba-compiled version and a pure-numpy fallback.
The environment variable SPDMEANS_BACKEND picks one at import time:

    SPDMEANS_BACKEND=numba   force numba (raises if unavailable)
    SPDMEANS_BACKEND=numpy   force the pure-numpy path

Unset, numba is used when it imports cleanly, numpy otherwise.  The active
backend can also be swapped programmatically, which the backend benchmark
uses to time both in one process.
"""

from __future__ import annotations

import contextlib
import os
import warnings

from . import numpy_backend

_ENV_VAR = "SPDMEANS_BACKEND"


def _load_numba_backend():
    from . import numba_backend

    return numba_backend


def _initial_backend():
    choice = os.environ.get(_ENV_VAR, "").strip().lower()
    if choice == "numpy":
        return numpy_backend
    if choice == "numba":
        return _load_numba_backend()
    if choice:
        raise ValueError(f"unknown {_ENV_VAR} value {choice!r}; use 'numba' or 'numpy'")
    try:
        return _load_numba_backend()
    except ImportError as exc:  # pragma: no cover - depends on environment
        warnings.warn(f"numba unavailable ({exc}); falling back to numpy kernels")
        return numpy_backend


_active = _initial_backend()


def active():
    """The module providing the currently selected kernels."""
    return _active


def backend_name() -> str:
    return _active.name


def use_backend(name: str) -> None:
    """Switch kernels at runtime ('numba' or 'numpy')."""
    global _active
    if name == "numpy":
        _active = numpy_backend
    elif name == "numba":
        _active = _load_numba_backend()
    else:
        raise ValueError(f"unknown backend {name!r}")


@contextlib.contextmanager
def temporary_backend(name: str):
    previous = _active.name
    use_backend(name)
    try:
        yield
    finally:
        use_backend(previous)


def warmup() -> None:
    """Trigger JIT compilation of the active backend, if it has any."""
    hook = getattr(_active, "warmup", None)
    if hook is not None:
        hook()
