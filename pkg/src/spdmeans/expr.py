"""Quasi-mean expression trees: evaluation, permutation action, stabilizers.

An expression is a tree over 1-based inputs A1..An with geodesic nodes
(``#`` and ``#_t``), spectral powers, and named mean nodes applied to child
expressions.  Two symbolic services sit on top:

* ``permute_expr`` realizes the right action (Q sigma)(A) = Q(A_sigma(1), ...),
* ``reductive_stabilizer`` computes the group of permutations provably fixing
  the expression using only the declared symmetries of its building blocks
  (symmetry of ``#``, full symmetry of the named means, dihedral symmetry of
  the circular mean), with the coset-action machinery for composed forms.

Numerical stabilizer estimation lives in the lab module; everything here is
exact.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import ExprParseError, MalformedCompositionError
from .linalg import MatrixTuple, OpCounters, SpdMatrix, mat_power, sharp, sharp_t
from .means import IterationConfig, MeanKind, mean_by_kind
from .perm import (
    CosetTransversal,
    PermGroup,
    Permutation,
    _all_permutations,
    dihedral_group,
    preimage_of,
    symmetric_group,
    trivial_group,
)


@dataclasses.dataclass(frozen=True)
class Input:
    index: int  # 1-based


@dataclasses.dataclass(frozen=True)
class Sharp:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class SharpT:
    left: "Expr"
    right: "Expr"
    t: float


@dataclasses.dataclass(frozen=True)
class Power:
    child: "Expr"
    t: float


@dataclasses.dataclass(frozen=True)
class Named:
    kind: MeanKind
    children: tuple["Expr", ...]


@dataclasses.dataclass(frozen=True)
class Permuted:
    child: "Expr"
    sigma: Permutation


Expr = Union[Input, Sharp, SharpT, Power, Named, Permuted]


def expr_arity(e: Expr) -> int:
    """Smallest n the expression can be evaluated on (max input index)."""
    if isinstance(e, Input):
        return e.index
    if isinstance(e, (Sharp, SharpT)):
        return max(expr_arity(e.left), expr_arity(e.right))
    if isinstance(e, Power):
        return expr_arity(e.child)
    if isinstance(e, Named):
        return max(expr_arity(c) for c in e.children)
    if isinstance(e, Permuted):
        return e.sigma.degree
    raise TypeError(f"not an expression node: {e!r}")


def eval_expr(
    e: Expr,
    tup: MatrixTuple,
    cfg: IterationConfig | None = None,
    counters: OpCounters | None = None,
    inner: MeanKind = MeanKind.BMP,
) -> SpdMatrix:
    """Evaluate the expression on a matrix tuple."""
    if isinstance(e, Input):
        if e.index > tup.n:
            raise MalformedCompositionError(f"input A{e.index} exceeds tuple size {tup.n}")
        return tup[e.index - 1]
    if isinstance(e, Sharp):
        return sharp(
            eval_expr(e.left, tup, cfg, counters, inner),
            eval_expr(e.right, tup, cfg, counters, inner),
            counters,
        )
    if isinstance(e, SharpT):
        return sharp_t(
            eval_expr(e.left, tup, cfg, counters, inner),
            eval_expr(e.right, tup, cfg, counters, inner),
            e.t,
            counters,
        )
    if isinstance(e, Power):
        return mat_power(eval_expr(e.child, tup, cfg, counters, inner), e.t)
    if isinstance(e, Named):
        values = MatrixTuple(
            eval_expr(c, tup, cfg, counters, inner) for c in e.children
        )
        result, _ = mean_by_kind(e.kind, values, cfg, counters, inner)
        return result
    if isinstance(e, Permuted):
        return eval_expr(e.child, tup.permuted(e.sigma), cfg, counters, inner)
    raise TypeError(f"not an expression node: {e!r}")


def permute_expr(e: Expr, sigma: Permutation) -> Expr:
    """Relabel inputs i -> sigma(i); eval(permute_expr(e, s), A) == eval(e, A permuted by s)."""
    if isinstance(e, Input):
        return Input(sigma(e.index))
    if isinstance(e, Sharp):
        return Sharp(permute_expr(e.left, sigma), permute_expr(e.right, sigma))
    if isinstance(e, SharpT):
        return SharpT(permute_expr(e.left, sigma), permute_expr(e.right, sigma), e.t)
    if isinstance(e, Power):
        return Power(permute_expr(e.child, sigma), e.t)
    if isinstance(e, Named):
        return Named(e.kind, tuple(permute_expr(c, sigma) for c in e.children))
    if isinstance(e, Permuted):
        return Permuted(e.child, e.sigma * sigma)
    raise TypeError(f"not an expression node: {e!r}")


def resolve(e: Expr) -> Expr:
    """Fold Permuted nodes into plain input relabelings."""
    if isinstance(e, Permuted):
        return permute_expr(resolve(e.child), e.sigma)
    if isinstance(e, Sharp):
        return Sharp(resolve(e.left), resolve(e.right))
    if isinstance(e, SharpT):
        return SharpT(resolve(e.left), resolve(e.right), e.t)
    if isinstance(e, Power):
        return Power(resolve(e.child), e.t)
    if isinstance(e, Named):
        return Named(e.kind, tuple(resolve(c) for c in e.children))
    return e


def exponent_vector(e: Expr, n: int) -> np.ndarray:
    """Weights w with Q(diag tuple) = prod_i A_i^(w_i) on commuting inputs."""
    if isinstance(e, Input):
        w = np.zeros(n)
        w[e.index - 1] = 1.0
        return w
    if isinstance(e, Sharp):
        return 0.5 * (exponent_vector(e.left, n) + exponent_vector(e.right, n))
    if isinstance(e, SharpT):
        return (1.0 - e.t) * exponent_vector(e.left, n) + e.t * exponent_vector(e.right, n)
    if isinstance(e, Power):
        return e.t * exponent_vector(e.child, n)
    if isinstance(e, Named):
        stacked = np.stack([exponent_vector(c, n) for c in e.children])
        return stacked.mean(axis=0)
    if isinstance(e, Permuted):
        return exponent_vector(resolve(e), n)
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# canonical forms under the declared symmetries, and reductive stabilizers


def _dihedral_orderings(k: int):
    """All rotations and reflections of the index tuple (0, ..., k-1)."""
    base = list(range(k))
    for r in range(k):
        rot = base[r:] + base[:r]
        yield tuple(rot)
        yield tuple(reversed(rot))


def _canonical(e: Expr):
    if isinstance(e, Input):
        return ("i", e.index)
    if isinstance(e, Sharp):
        kids = sorted((_canonical(e.left), _canonical(e.right)), key=repr)
        return ("s", kids[0], kids[1])
    if isinstance(e, SharpT):
        a = ("t", e.t, _canonical(e.left), _canonical(e.right))
        b = ("t", 1.0 - e.t, _canonical(e.right), _canonical(e.left))
        return min(a, b, key=repr)
    if isinstance(e, Power):
        return ("p", e.t, _canonical(e.child))
    if isinstance(e, Named):
        kids = [_canonical(c) for c in e.children]
        if e.kind is MeanKind.PALFIA:
            # only dihedral reorderings are declared symmetries
            best = min(
                (tuple(kids[i] for i in order) for order in _dihedral_orderings(len(kids))),
                key=repr,
            )
        else:
            best = tuple(sorted(kids, key=repr))
        return ("n", e.kind.value, best)
    raise TypeError(f"resolve() the expression first: {e!r}")


def canonical_key(e: Expr):
    """Hashable form invariant under the declared symmetries of each node."""
    return _canonical(resolve(e))


def _sweep_stabilizer(e: Expr, n: int) -> PermGroup:
    base = canonical_key(e)
    survivors = [
        sigma for sigma in _all_permutations(n) if canonical_key(permute_expr(e, sigma)) == base
    ]
    return PermGroup(n, survivors)


def _contains_named(e: Expr) -> bool:
    if isinstance(e, Named):
        return True
    if isinstance(e, (Sharp, SharpT)):
        return _contains_named(e.left) or _contains_named(e.right)
    if isinstance(e, Power):
        return _contains_named(e.child)
    if isinstance(e, Permuted):
        return _contains_named(e.child)
    return False


def named_stabilizer(kind: MeanKind, arity: int) -> PermGroup:
    """The declared symmetry group of a named mean of the given arity."""
    if arity < 2:
        return trivial_group(arity)
    if kind is MeanKind.PALFIA:
        return dihedral_group(arity) if arity >= 3 else symmetric_group(arity)
    return symmetric_group(arity)


def reductive_stabilizer(e: Expr, n: int | None = None) -> PermGroup:
    """Permutations provably fixing the expression, from declared symmetries only.

    For a plain geodesic/power tree this is an exact sweep of Sym(n) against
    the canonical form.  For a named mean over permuted copies of one base
    expression, the composed form is analyzed through the action on the
    cosets of the base expression's stabilizer: the result is the largest
    G <= Sym(n) whose induced coset action lands in the outer mean's
    stabilizer.

    Raises MalformedCompositionError when a named node is not such a
    composition (children not copies of one base, cosets missing, or named
    nodes nested below other nodes).
    """
    e = resolve(e)
    n = n if n is not None else expr_arity(e)
    if not _contains_named(e):
        return _sweep_stabilizer(e, n)
    if not isinstance(e, Named):
        raise MalformedCompositionError(
            "named means may only appear as the outermost node of a composed form"
        )
    if any(_contains_named(c) for c in e.children):
        raise MalformedCompositionError("nested named means are not in composed form")

    base = e.children[0]
    h = _sweep_stabilizer(base, n)
    r = math.factorial(n) // h.order
    if len(e.children) != r:
        raise MalformedCompositionError(
            f"composed form needs one child per coset: expected {r}, got {len(e.children)}"
        )

    # locate each child's coset of h via a relabeling of the base expression
    reps: list[Permutation] = []
    seen_keys = set()
    for child in e.children:
        child_key = canonical_key(child)
        found = None
        for sigma in _all_permutations(n):
            if canonical_key(permute_expr(base, sigma)) == child_key:
                found = sigma
                break
        if found is None:
            raise MalformedCompositionError(
                "child expression is not a permuted copy of the first child"
            )
        coset_key = min((p * found).image for p in h.elements)
        if coset_key in seen_keys:
            raise MalformedCompositionError("two children lie in the same coset")
        seen_keys.add(coset_key)
        reps.append(Permutation(coset_key))

    transversal = CosetTransversal(h, reps)
    return preimage_of(transversal, named_stabilizer(e.kind, r))


# ---------------------------------------------------------------------------
# prebuilt trees


def bracket4(i: int, j: int, k: int, l: int) -> Expr:
    """(Ai # Aj) # (Ak # Al)."""
    return Sharp(Sharp(Input(i), Input(j)), Sharp(Input(k), Input(l)))


def weighted_sharp3() -> Expr:
    """(A1^(4/3) # A2^(4/3)) # A3^(2/3); exponents balance to 1/3 each."""
    return Sharp(
        Sharp(Power(Input(1), 4.0 / 3.0), Power(Input(2), 4.0 / 3.0)),
        Power(Input(3), 2.0 / 3.0),
    )


def composed_mean4_expr(inner: MeanKind = MeanKind.BMP) -> Expr:
    """The composed four-matrix mean: inner 3-mean over the three bracketings."""
    return Named(inner, (bracket4(1, 2, 3, 4), bracket4(1, 3, 2, 4), bracket4(1, 4, 2, 3)))


def mean_expr(kind: MeanKind, n: int) -> Expr:
    """The named n-matrix mean applied to the raw inputs."""
    return Named(kind, tuple(Input(i) for i in range(1, n + 1)))


# ---------------------------------------------------------------------------
# text grammar:  expr := term (('#' ['^{t}']) term)*   (left-associative)
#                term := atom ['^{t}']
#                atom := A<digits> | name '(' expr {',' expr} ')' | '(' expr ')'
#                t    := int | int/int | decimal


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, pos: int | None = None):
        raise ExprParseError(message, self.text, self.pos if pos is None else pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> Expr:
        e = self.parse_expr()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error("unexpected trailing input")
        return e

    def parse_expr(self) -> Expr:
        left = self.parse_term()
        while self.peek() == "#":
            self.pos += 1
            t = 0.5
            explicit = False
            if self.peek() == "^":
                self.pos += 1
                t = self.parse_braced_number()
                explicit = True
            right = self.parse_term()
            left = SharpT(left, right, t) if explicit else Sharp(left, right)
        return left

    def parse_term(self) -> Expr:
        atom = self.parse_atom()
        if self.peek() == "^":
            self.pos += 1
            t = self.parse_braced_number()
            return Power(atom, t)
        return atom

    def parse_braced_number(self) -> float:
        self.expect("{")
        start = self.pos
        depth_end = self.text.find("}", self.pos)
        if depth_end < 0:
            self.error("unclosed '{'", start)
        body = self.text[start:depth_end].strip()
        self.pos = depth_end + 1
        try:
            if "/" in body:
                return float(Fraction(body.replace(" ", "")))
            return float(body)
        except (ValueError, ZeroDivisionError):
            self.error(f"bad exponent {body!r}", start)

    def parse_atom(self) -> Expr:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            e = self.parse_expr()
            self.expect(")")
            return e
        if not ch.isalpha():
            self.error("expected an input, a mean call, or '('")
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalpha():
            self.pos += 1
        letters = self.text[start : self.pos]
        digit_start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        digits = self.text[digit_start : self.pos]
        if letters == "A":
            if not digits:
                self.error("input needs an index, like A1", start)
            return Input(int(digits))
        kind_map = {"alm": MeanKind.ALM, "bmp": MeanKind.BMP,
                    "palfia": MeanKind.PALFIA, "new": MeanKind.NEW}
        kind = kind_map.get(letters.lower())
        if kind is None:
            self.error(f"unknown name {letters!r}", start)
        if not digits:
            self.error("mean call needs an arity, like bmp3(...)", start)
        arity = int(digits)
        self.expect("(")
        children = [self.parse_expr()]
        while self.peek() == ",":
            self.pos += 1
            children.append(self.parse_expr())
        self.expect(")")
        if len(children) != arity:
            self.error(
                f"{letters}{arity} expects {arity} arguments, got {len(children)}", start
            )
        return Named(kind, tuple(children))


def parse_expr(text: str) -> Expr:
    """Parse the CLI expression grammar; raises ExprParseError with position."""
    return _Parser(text).parse()


def expr_to_str(e: Expr) -> str:
    """Round-trippable rendering in the CLI grammar."""
    if isinstance(e, Input):
        return f"A{e.index}"
    if isinstance(e, Sharp):
        return f"({expr_to_str(e.left)}#{expr_to_str(e.right)})"
    if isinstance(e, SharpT):
        return f"({expr_to_str(e.left)}#^{{{_fmt_t(e.t)}}}{expr_to_str(e.right)})"
    if isinstance(e, Power):
        return f"{expr_to_str(e.child)}^{{{_fmt_t(e.t)}}}"
    if isinstance(e, Named):
        args = ",".join(expr_to_str(c) for c in e.children)
        return f"{e.kind.value}{len(e.children)}({args})"
    if isinstance(e, Permuted):
        return expr_to_str(resolve(e))
    raise TypeError(f"not an expression node: {e!r}")


def _fmt_t(t: float) -> str:
    frac = Fraction(t).limit_denominator(1000)
    if abs(float(frac) - t) < 1e-12:
        return f"{frac.numerator}/{frac.denominator}" if frac.denominator != 1 else str(frac.numerator)
    return repr(t)
