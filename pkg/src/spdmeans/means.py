"""Mean constructors built from geodesic steps and limit iterations.

Four families are provided, all reducing to ``sharp`` at n = 2:

* ``alm_mean``     - iterate "replace each matrix by the mean of the others";
  converges linearly.
* ``bmp_mean``     - same recursion but each component is pulled a 1/n
  fraction back toward the matrix it replaces; converges cubically.
* ``palfia_mean``  - circular pairwise means; cheap, but only invariant
  under the dihedral group, not all permutations.
* ``new_mean4``    - composes the three pair-bracketings of four matrices
  and takes a single 3-matrix mean of them, so only one limit process runs;
  ``new_mean_recursive`` extends it to n > 4 via the cubic recursion.

Every iteration stops when successive tuples differ by less than ``tol`` in
max absolute entry.  Non-convergence is reported, not raised: the last
iterate comes back with ``converged=False`` so benchmarks can record it.
"""

from __future__ import annotations

import dataclasses
import enum
from typing import Callable

import numpy as np

from . import backends
from .linalg import (
    MatrixTuple,
    OpCounters,
    SpdMatrix,
    _sharp_arr,
    _sharp_t_arr,
    _trusted,
)


class MeanKind(enum.Enum):
    ALM = "alm"
    BMP = "bmp"
    PALFIA = "palfia"
    NEW = "new"


@dataclasses.dataclass(frozen=True)
class IterationConfig:
    """Stopping criterion and iteration caps.

    ``bmp_anchor`` selects the target of the 1/n pull-back in the cubic
    recursion: "current" (the iterate, the form whose limit is a scalar
    tuple) or "initial" (the starting matrix; kept for experiments, known
    not to converge to a common matrix).
    """

    tol: float = 1e-13
    max_iter: int = 200
    bmp_anchor: str = "current"

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.bmp_anchor not in ("current", "initial"):
            raise ValueError("bmp_anchor must be 'current' or 'initial'")


DEFAULT_CONFIG = IterationConfig()


@dataclasses.dataclass
class IterationReport:
    """Bookkeeping for one mean computation.

    ``outer_iters`` counts applications of the top-level tuple map;
    ``inner_iter_log`` collects the iteration counts of every nested limit
    process, in execution order.
    """

    outer_iters: int
    inner_iter_log: list[int]
    counters: OpCounters
    final_residual: float
    converged: bool

    @property
    def inner_avg(self) -> float:
        if not self.inner_iter_log:
            return 0.0
        return sum(self.inner_iter_log) / len(self.inner_iter_log)

    @property
    def inner_total(self) -> int:
        return sum(self.inner_iter_log)


class _RunState:
    __slots__ = ("counters", "inner_log", "all_converged")

    def __init__(self, counters: OpCounters):
        self.counters = counters
        self.inner_log: list[int] = []
        self.all_converged = True


def _iterate(step, arrs: list[np.ndarray], cfg: IterationConfig):
    """Apply step until successive tuples agree within cfg.tol (max-entry)."""
    residual_fn = backends.active().tuple_residual
    cur = list(arrs)
    residual = float("inf")
    for k in range(1, cfg.max_iter + 1):
        nxt = step(cur)
        residual = float(residual_fn(np.stack(cur), np.stack(nxt)))
        cur = nxt
        if residual < cfg.tol:
            return cur, k, residual, True
    return cur, cfg.max_iter, residual, False


def _record_nested(st: _RunState, iters: int, ok: bool) -> None:
    st.all_converged = st.all_converged and ok
    if iters > 0:
        st.inner_log.append(iters)


def _alm_arrays(arrs, cfg, st):
    n = len(arrs)
    if n == 2:
        return _sharp_arr(arrs[0], arrs[1], st.counters), 0, 0.0, True

    def step(cur):
        out = []
        for i in range(n):
            rest = cur[:i] + cur[i + 1 :]
            if n - 1 == 2:
                out.append(_sharp_arr(rest[0], rest[1], st.counters))
            else:
                g, iters, _, ok = _alm_arrays(rest, cfg, st)
                _record_nested(st, iters, ok)
                out.append(g)
        return out

    final, iters, res, ok = _iterate(step, list(arrs), cfg)
    return final[0], iters, res, ok


def _bmp_arrays(arrs, cfg, st):
    n = len(arrs)
    if n == 2:
        return _sharp_arr(arrs[0], arrs[1], st.counters), 0, 0.0, True
    initial = list(arrs)
    pull = 1.0 / n

    def step(cur):
        out = []
        for i in range(n):
            rest = cur[:i] + cur[i + 1 :]
            if n - 1 == 2:
                g = _sharp_arr(rest[0], rest[1], st.counters)
            else:
                g, iters, _, ok = _bmp_arrays(rest, cfg, st)
                _record_nested(st, iters, ok)
            anchor = initial[i] if cfg.bmp_anchor == "initial" else cur[i]
            out.append(_sharp_t_arr(g, anchor, pull, st.counters))
        return out

    final, iters, res, ok = _iterate(step, list(arrs), cfg)
    return final[0], iters, res, ok


def _palfia_arrays(arrs, cfg, st):
    n = len(arrs)

    def step(cur):
        return [_sharp_arr(cur[i], cur[(i + 1) % n], st.counters) for i in range(n)]

    final, iters, res, ok = _iterate(step, list(arrs), cfg)
    return final[0], iters, res, ok


def _new4_arrays(arrs, cfg, st, inner: MeanKind):
    a, b, c, d = arrs
    cnt = st.counters
    brackets = [
        _sharp_arr(_sharp_arr(a, b, cnt), _sharp_arr(c, d, cnt), cnt),
        _sharp_arr(_sharp_arr(a, c, cnt), _sharp_arr(b, d, cnt), cnt),
        _sharp_arr(_sharp_arr(a, d, cnt), _sharp_arr(b, c, cnt), cnt),
    ]
    inner_fn = _alm_arrays if inner is MeanKind.ALM else _bmp_arrays
    g, iters, res, ok = inner_fn(brackets, cfg, st)
    _record_nested(st, iters, ok)
    # the single limit process is the inner one: no outer iterations here
    return g, 0, res, ok


def _new_arrays(arrs, cfg, st, inner: MeanKind):
    n = len(arrs)
    if n == 2:
        return _sharp_arr(arrs[0], arrs[1], st.counters), 0, 0.0, True
    if n == 3:
        return _bmp_arrays(arrs, cfg, st)
    if n == 4:
        return _new4_arrays(arrs, cfg, st, inner)
    initial = list(arrs)
    pull = 1.0 / n

    def step(cur):
        out = []
        for i in range(n):
            rest = cur[:i] + cur[i + 1 :]
            g, iters, _, ok = _new_arrays(rest, cfg, st, inner)
            _record_nested(st, iters, ok)
            anchor = initial[i] if cfg.bmp_anchor == "initial" else cur[i]
            out.append(_sharp_t_arr(g, anchor, pull, st.counters))
        return out

    final, iters, res, ok = _iterate(step, list(arrs), cfg)
    return final[0], iters, res, ok


def _run(fn, tup: MatrixTuple, cfg, counters, *extra):
    cfg = cfg or DEFAULT_CONFIG
    st = _RunState(counters if counters is not None else OpCounters())
    arr, outer, res, ok = fn(tup.arrays(), cfg, st, *extra)
    report = IterationReport(
        outer_iters=outer,
        inner_iter_log=st.inner_log,
        counters=st.counters.snapshot(),
        final_residual=res,
        converged=ok and st.all_converged,
    )
    return _trusted(arr), report


def alm_mean(
    tup: MatrixTuple,
    cfg: IterationConfig | None = None,
    counters: OpCounters | None = None,
) -> tuple[SpdMatrix, IterationReport]:
    """Mean of n matrices by iterating means of each (n-1)-subtuple."""
    return _run(_alm_arrays, tup, cfg, counters)


def bmp_mean(
    tup: MatrixTuple,
    cfg: IterationConfig | None = None,
    counters: OpCounters | None = None,
) -> tuple[SpdMatrix, IterationReport]:
    """Cubically convergent variant: subtuple mean pulled 1/n toward each matrix."""
    return _run(_bmp_arrays, tup, cfg, counters)


def palfia_mean(
    tup: MatrixTuple,
    cfg: IterationConfig | None = None,
    counters: OpCounters | None = None,
) -> tuple[SpdMatrix, IterationReport]:
    """Circular pairwise-mean iteration; a quasi-mean, not permutation invariant."""
    return _run(_palfia_arrays, tup, cfg, counters)


def new_mean4(
    a: SpdMatrix,
    b: SpdMatrix,
    c: SpdMatrix,
    d: SpdMatrix,
    inner: MeanKind = MeanKind.BMP,
    cfg: IterationConfig | None = None,
    counters: OpCounters | None = None,
) -> tuple[SpdMatrix, IterationReport]:
    """Composed four-matrix mean: one 3-matrix mean of the three pair-bracketings.

    Computes G3((a#b)#(c#d), (a#c)#(b#d), (a#d)#(b#c)) with G3 the selected
    inner mean (cubic by default), so exactly one limit process runs.
    """
    if inner not in (MeanKind.ALM, MeanKind.BMP):
        raise ValueError("inner mean must be ALM or BMP")
    tup = MatrixTuple([a, b, c, d])
    return _run(_new4_arrays, tup, cfg, counters, inner)


def new_mean_recursive(
    tup: MatrixTuple,
    cfg: IterationConfig | None = None,
    counters: OpCounters | None = None,
    inner: MeanKind = MeanKind.BMP,
) -> tuple[SpdMatrix, IterationReport]:
    """Composed mean at n = 4, cubic recursion over it for n >= 5."""
    if inner not in (MeanKind.ALM, MeanKind.BMP):
        raise ValueError("inner mean must be ALM or BMP")
    return _run(_new_arrays, tup, cfg, counters, inner)


def mean_by_kind(
    kind: MeanKind,
    tup: MatrixTuple,
    cfg: IterationConfig | None = None,
    counters: OpCounters | None = None,
    inner: MeanKind = MeanKind.BMP,
) -> tuple[SpdMatrix, IterationReport]:
    if kind is MeanKind.ALM:
        return alm_mean(tup, cfg, counters)
    if kind is MeanKind.BMP:
        return bmp_mean(tup, cfg, counters)
    if kind is MeanKind.PALFIA:
        return palfia_mean(tup, cfg, counters)
    if kind is MeanKind.NEW:
        return new_mean_recursive(tup, cfg, counters, inner)
    raise ValueError(f"unknown mean kind {kind!r}")


# ---------------------------------------------------------------------------
# tuple maps and the generic limit engine (public form)


def limit_iterate(
    step: Callable[[MatrixTuple], MatrixTuple],
    start: MatrixTuple,
    cfg: IterationConfig | None = None,
    counters: OpCounters | None = None,
) -> tuple[SpdMatrix, IterationReport]:
    """Iterate a tuple map to its scalar-tuple limit.

    Applies ``step`` until the max absolute entrywise difference between
    successive tuples drops below ``cfg.tol``, then returns the first item
    of the final tuple.  If ``cfg.max_iter`` is reached the last iterate is
    returned with ``converged=False`` in the report.
    """
    cfg = cfg or DEFAULT_CONFIG
    snapshot_src = counters if counters is not None else OpCounters()

    def array_step(arrs):
        out = step(MatrixTuple(_trusted(a) for a in arrs))
        return [m.values for m in out]

    final, iters, res, ok = _iterate(array_step, start.arrays(), cfg)
    report = IterationReport(
        outer_iters=iters,
        inner_iter_log=[],
        counters=snapshot_src.snapshot(),
        final_residual=res,
        converged=ok,
    )
    return _trusted(final[0]), report


def palfia_step(tup: MatrixTuple, counters: OpCounters | None = None) -> MatrixTuple:
    """One circular-mean update: component i becomes item_i # item_(i+1 mod n)."""
    arrs = tup.arrays()
    n = len(arrs)
    return MatrixTuple(
        _trusted(_sharp_arr(arrs[i], arrs[(i + 1) % n], counters)) for i in range(n)
    )


def alm_step(
    tup: MatrixTuple,
    cfg: IterationConfig | None = None,
    counters: OpCounters | None = None,
) -> MatrixTuple:
    """One linear-recursion update: component i becomes the mean of the others."""
    cfg = cfg or DEFAULT_CONFIG
    st = _RunState(counters if counters is not None else OpCounters())
    arrs = tup.arrays()
    n = len(arrs)
    out = []
    for i in range(n):
        rest = arrs[:i] + arrs[i + 1 :]
        if len(rest) == 2:
            out.append(_sharp_arr(rest[0], rest[1], st.counters))
        else:
            g, _, _, _ = _alm_arrays(rest, cfg, st)
            out.append(g)
    return MatrixTuple(_trusted(a) for a in out)


def bmp_step(
    tup: MatrixTuple,
    cfg: IterationConfig | None = None,
    counters: OpCounters | None = None,
) -> MatrixTuple:
    """One cubic-recursion update on the given tuple."""
    cfg = cfg or DEFAULT_CONFIG
    st = _RunState(counters if counters is not None else OpCounters())
    arrs = tup.arrays()
    n = len(arrs)
    out = []
    for i in range(n):
        rest = arrs[:i] + arrs[i + 1 :]
        if len(rest) == 2:
            g = _sharp_arr(rest[0], rest[1], st.counters)
        else:
            g, _, _, _ = _bmp_arrays(rest, cfg, st)
        out.append(_sharp_t_arr(g, arrs[i], 1.0 / n, st.counters))
    return MatrixTuple(_trusted(a) for a in out)
