"""Empirical verification: the ten mean axioms, stabilizer estimation, map symmetry.

Everything here samples reproducibly from a seeded generator, evaluates a
mean (a :class:`MeanKind`, an expression tree, or any callable on matrix
tuples) and reports violations relative to the scale of the data.  The
tolerances below are the pass thresholds used by the acceptance suite.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DegreeTooLargeError, NotAGroupError, UnsupportedPropertyError
from .expr import Expr, eval_expr, exponent_vector, expr_arity, reductive_stabilizer
from .linalg import MatrixTuple, SpdMatrix, make_spd, mat_power
from .means import DEFAULT_CONFIG, IterationConfig, MeanKind, mean_by_kind
from .perm import PermGroup, Permutation, _all_permutations

MeanLike = Union[MeanKind, Expr, Callable[[MatrixTuple], SpdMatrix]]

PROPERTY_IDS = ("P1", "P1'", "P2", "P2'", "P3", "P4", "P5", "P6", "P7", "P8", "P9", "P10")

# pass thresholds (relative to data scale; semidefinite checks bound the
# allowed negative eigenvalue by tol * norm)
PROPERTY_TOLERANCES = {
    "P1": 1e-10,
    "P1'": 1e-12,
    "P2": 1e-9,
    "P2'": 1e-9,
    "P3": 1e-10,
    "P4": 1e-9,
    "P5": 1e-6,
    "P6": 1e-9,
    "P7": 1e-9,
    "P8": 1e-9,
    "P9": 1e-9,
    "P10": 1e-9,
}

_TINY = np.finfo(float).tiny


@dataclasses.dataclass(frozen=True)
class SpdSampler:
    """Reproducible SPD sampler: orthogonal basis times log-uniform spectrum."""

    seed: int
    dim: int = 3
    lo: float = 0.2
    hi: float = 5.0
    count: int = 20

    def __post_init__(self):
        if self.lo <= 0 or self.hi < self.lo:
            raise ValueError("need 0 < lo <= hi")
        if self.count < 1:
            raise ValueError("count must be positive")


def _random_orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def _sample_arrays(rng: np.random.Generator, s: SpdSampler, count: int) -> list[np.ndarray]:
    out = []
    for _ in range(count):
        q = _random_orthogonal(rng, s.dim)
        lam = np.exp(rng.uniform(np.log(s.lo), np.log(s.hi), size=s.dim))
        out.append((q * lam) @ q.T)
    return out


def sample_spd(s: SpdSampler) -> list[SpdMatrix]:
    """Draw ``s.count`` validated SPD matrices, identical for identical seeds."""
    rng = np.random.default_rng(s.seed)
    return [make_spd(a) for a in _sample_arrays(rng, s, s.count)]


def sample_tuples(s: SpdSampler, n: int, k: int | None = None) -> list[MatrixTuple]:
    """k tuples of n matrices each (k defaults to the sampler count)."""
    k = s.count if k is None else k
    rng = np.random.default_rng(s.seed)
    arrays = _sample_arrays(rng, s, n * k)
    return [
        MatrixTuple(make_spd(a) for a in arrays[j * n : (j + 1) * n]) for j in range(k)
    ]


@dataclasses.dataclass
class PropertyReport:
    prop: str
    samples: int
    max_violation: float
    tol: float
    witness: str | None = None  # offending permutation, for the sweep checks

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol


@dataclasses.dataclass
class StabilizerEstimate:
    degree: int
    survivors: PermGroup
    sample_count: int
    tol: float


def _as_evaluator(mean: MeanLike, cfg: IterationConfig, n: int):
    """Normalize a mean-like object to (callable, exponent weights)."""
    if isinstance(mean, MeanKind):
        kind = mean
        return (lambda tup: mean_by_kind(kind, tup, cfg)[0]), np.full(n, 1.0 / n)
    if callable(mean):
        # bare callables are assumed to be symmetric means (uniform exponents)
        return mean, np.full(n, 1.0 / n)
    if expr_arity(mean) > n:
        raise ValueError(f"expression needs {expr_arity(mean)} inputs, tuple has {n}")
    weights = exponent_vector(mean, n)
    return (lambda tup: eval_expr(mean, tup, cfg)), weights


def _rel_diff(x: np.ndarray, y: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(x))), float(np.max(np.abs(y))), _TINY)
    return float(np.max(np.abs(x - y))) / scale


def _neg_eig_violation(diff: np.ndarray, scale: float) -> float:
    min_eig = float(np.linalg.eigvalsh(0.5 * (diff + diff.T))[0])
    return max(0.0, -min_eig) / max(scale, _TINY)


def _psd_bump(rng: np.random.Generator, dim: int, scale: float) -> np.ndarray:
    g = rng.standard_normal((dim, dim))
    bump = g @ g.T
    return bump * (scale / max(float(np.max(np.abs(bump))), _TINY))


def check_property(
    mean: MeanLike,
    prop: str,
    sampler: SpdSampler,
    n: int,
    tol: float | None = None,
    cfg: IterationConfig | None = None,
    base_tuples: Sequence[MatrixTuple] | None = None,
) -> PropertyReport:
    """Run one axiom's protocol over seeded samples and report the worst violation.

    ``base_tuples`` substitutes explicit tuples (e.g. from a file) for the
    sampled ones; auxiliary randomness (scalings, bumps, congruences) still
    flows from the sampler seed.
    """
    if prop not in PROPERTY_IDS:
        raise UnsupportedPropertyError(f"unknown property {prop!r}")
    cfg = cfg or DEFAULT_CONFIG
    tol = PROPERTY_TOLERANCES[prop] if tol is None else tol
    evaluate, weights = _as_evaluator(mean, cfg, n)
    if prop == "P10" and not np.allclose(weights, 1.0 / n, atol=1e-12):
        raise UnsupportedPropertyError(
            "the mean-inequality check requires uniform exponents (a symmetric mean)"
        )

    rng = np.random.default_rng(sampler.seed + 0x5BD)
    if base_tuples is None:
        tuples = sample_tuples(sampler, n)
    else:
        tuples = list(base_tuples)
    k = len(tuples)
    dim = tuples[0].dim

    violations: list[float] = []

    if prop in ("P1", "P1'"):
        for _ in range(k):
            if prop == "P1'":
                a = _sample_arrays(rng, dataclasses.replace(sampler, dim=dim), 1)[0]
                tup = MatrixTuple.from_arrays([a] * n)
                expected = tup[0].values
            else:
                q = _random_orthogonal(rng, dim)
                lams = np.exp(
                    rng.uniform(np.log(sampler.lo), np.log(sampler.hi), size=(n, dim))
                )
                tup = MatrixTuple.from_arrays([(q * lam) @ q.T for lam in lams])
                expected = (q * np.prod(lams.T**weights, axis=1)) @ q.T
            violations.append(_rel_diff(evaluate(tup).values, expected))

    elif prop in ("P2", "P2'"):
        for tup in tuples:
            if prop == "P2'":
                alphas = np.full(n, float(np.exp(rng.uniform(np.log(0.25), np.log(4.0)))))
            else:
                alphas = np.exp(rng.uniform(np.log(0.25), np.log(4.0), size=n))
            scaled = MatrixTuple.from_arrays(
                [alpha * m.values for alpha, m in zip(alphas, tup)]
            )
            factor = float(np.prod(alphas**weights))
            violations.append(_rel_diff(evaluate(scaled).values, factor * evaluate(tup).values))

    elif prop == "P3":
        perms = list(_all_permutations(n)) if n <= 5 else _random_permutations(rng, n, 100)
        witness = None
        worst_seen = -1.0
        for tup in tuples:
            base = evaluate(tup).values
            for p in perms:
                v = _rel_diff(evaluate(tup.permuted(p)).values, base)
                if v > worst_seen:
                    worst_seen, witness = v, p.cycle_string()
            violations.append(worst_seen)
        return PropertyReport(
            prop=prop, samples=k, max_violation=max(violations), tol=tol, witness=witness
        )

    elif prop == "P4":
        for tup in tuples:
            base = evaluate(tup).values
            bumped = MatrixTuple.from_arrays(
                [
                    m.values + _psd_bump(rng, dim, 0.2 * m.max_abs())
                    for m in tup
                ]
            )
            other = evaluate(bumped).values
            scale = max(float(np.max(np.abs(base))), float(np.max(np.abs(other))))
            violations.append(_neg_eig_violation(other - base, scale))

    elif prop == "P5":
        for tup in tuples:
            base = evaluate(tup).values
            bumps = [_psd_bump(rng, dim, 0.5 * m.max_abs()) for m in tup]
            last = np.inf
            for k_exp in (2, 6, 10, 14, 18, 22, 26):
                eps = 2.0**-k_exp
                seq = MatrixTuple.from_arrays(
                    [m.values + eps * p for m, p in zip(tup, bumps)]
                )
                last = _rel_diff(evaluate(seq).values, base)
            violations.append(last)

    elif prop == "P6":
        for tup in tuples:
            s = _random_congruence(rng, dim)
            mapped = MatrixTuple.from_arrays([s.T @ m.values @ s for m in tup])
            violations.append(
                _rel_diff(evaluate(mapped).values, s.T @ evaluate(tup).values @ s)
            )

    elif prop == "P7":
        others = sample_tuples(
            dataclasses.replace(sampler, seed=sampler.seed + 0xC0), n, k
        )
        for tup, other in zip(tuples, others):
            lam = float(rng.uniform(0.2, 0.8))
            mixed = MatrixTuple.from_arrays(
                [lam * a.values + (1 - lam) * b.values for a, b in zip(tup, other)]
            )
            combo = lam * evaluate(tup).values + (1 - lam) * evaluate(other).values
            mixed_val = evaluate(mixed).values
            scale = max(float(np.max(np.abs(mixed_val))), float(np.max(np.abs(combo))))
            violations.append(_neg_eig_violation(mixed_val - combo, scale))

    elif prop == "P8":
        for tup in tuples:
            inverted = MatrixTuple(mat_power(m, -1.0) for m in tup)
            lhs = evaluate(inverted).values
            rhs = mat_power(evaluate(tup), -1.0).values
            violations.append(_rel_diff(lhs, rhs))

    elif prop == "P9":
        for tup in tuples:
            target = float(
                np.prod([np.linalg.det(m.values) ** w for m, w in zip(tup, weights)])
            )
            det = float(np.linalg.det(evaluate(tup).values))
            violations.append(abs(det - target) / max(abs(target), _TINY))

    elif prop == "P10":
        for tup in tuples:
            g = evaluate(tup).values
            arith = sum(m.values for m in tup) / n
            harm = np.linalg.inv(sum(np.linalg.inv(m.values) for m in tup) / n)
            scale = float(np.max(np.abs(arith)))
            violations.append(
                max(
                    _neg_eig_violation(arith - g, scale),
                    _neg_eig_violation(g - harm, scale),
                )
            )

    return PropertyReport(prop=prop, samples=k, max_violation=max(violations), tol=tol)


def _random_permutations(rng: np.random.Generator, n: int, count: int) -> list[Permutation]:
    return [
        Permutation(rng.permutation(np.arange(1, n + 1)).tolist()) for _ in range(count)
    ]


def _random_congruence(rng: np.random.Generator, dim: int) -> np.ndarray:
    # singular values in [0.1, 10]: condition number at most 100
    u = _random_orthogonal(rng, dim)
    v = _random_orthogonal(rng, dim)
    sv = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=dim))
    return (u * sv) @ v.T


def estimate_stabilizer(
    mean: MeanLike,
    n: int,
    sampler: SpdSampler,
    tol: float = 1e-8,
    cfg: IterationConfig | None = None,
) -> StabilizerEstimate:
    """Permutations that never move the value across seeded samples.

    Survivors are the sigma with max-entry difference between Q(tuple) and
    Q(permuted tuple) at most tol times the largest sampled value, over all
    samples.  The survivor set must pass an exact subgroup check, otherwise
    the tolerance is misconfigured and NotAGroupError is raised.
    """
    if n > 6:
        raise DegreeTooLargeError("stabilizer estimation sweeps Sym(n); n <= 6 required")
    cfg = cfg or DEFAULT_CONFIG
    evaluate, _ = _as_evaluator(mean, cfg, n)
    tuples = sample_tuples(sampler, n)
    base_values = [evaluate(tup).values for tup in tuples]
    scale = max(max(float(np.max(np.abs(v))) for v in base_values), _TINY)

    survivors = []
    for sigma in _all_permutations(n):
        if all(
            float(np.max(np.abs(evaluate(tup.permuted(sigma)).values - base))) <= tol * scale
            for tup, base in zip(tuples, base_values)
        ):
            survivors.append(sigma)

    group = PermGroup(n, survivors)
    if not group.is_group():
        raise NotAGroupError(
            f"{len(survivors)} survivors fail closure; adjust the equality tolerance"
        )
    return StabilizerEstimate(degree=n, survivors=group, sample_count=len(tuples), tol=tol)


def map_preserves_group(
    step: Callable[[MatrixTuple], MatrixTuple],
    group: PermGroup,
    tuples: Sequence[MatrixTuple],
    tol: float = 1e-11,
) -> dict[Permutation, Permutation]:
    """For each h in the group, the tau with step(A permuted by h) = step(A) permuted by tau.

    Returns the h -> tau mapping; a missing h means no tau in the group
    matched on every test tuple, i.e. the map does not preserve the group.
    """
    outputs = [step(tup) for tup in tuples]
    scale = max(
        max(float(np.max(np.abs(m.values))) for m in out) for out in outputs
    )
    mapping: dict[Permutation, Permutation] = {}
    for h in group.elements:
        for tau in group.elements:
            if all(
                _tuples_close(step(tup.permuted(h)), out.permuted(tau), tol * scale)
                for tup, out in zip(tuples, outputs)
            ):
                mapping[h] = tau
                break
    return mapping


def _tuples_close(a: MatrixTuple, b: MatrixTuple, atol: float) -> bool:
    return all(
        float(np.max(np.abs(x.values - y.values))) <= atol for x, y in zip(a, b)
    )


__all__ = [
    "SpdSampler",
    "PropertyReport",
    "StabilizerEstimate",
    "PROPERTY_IDS",
    "PROPERTY_TOLERANCES",
    "sample_spd",
    "sample_tuples",
    "check_property",
    "estimate_stabilizer",
    "map_preserves_group",
    "reductive_stabilizer",
]
