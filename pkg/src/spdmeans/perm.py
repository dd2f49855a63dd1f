"""Exact finite permutation groups: Sym/Alt/Di, cosets, induced coset actions.

Conventions, fixed once and used everywhere:

* points are 1-based; a ``Permutation`` stores the image tuple (sigma(1), ..., sigma(n));
* ``a * b`` applies a first, then b, so products in coset formulas read left
  to right (as in standard permutation-group texts), and the coset action
  ``induced_action`` is a group homomorphism with respect to ``*``;
* ``compose(a, b)`` is plain function composition a(b(.)), i.e. ``b * a``;
* right cosets are H*sigma = {h * sigma : h in H}.

Groups are stored as explicit element sets; degrees are capped at 8 where a
full enumeration of Sym(n) is required.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Iterator, Sequence

from .errors import (
    DegreeMismatchError,
    DegreeTooLargeError,
    UnsupportedDegreeError,
)

ENUMERATION_DEGREE_CAP = 8


class Permutation:
    """A permutation of {1, ..., n}, stored as its image tuple."""

    __slots__ = ("image",)

    def __init__(self, image: Sequence[int]):
        image = tuple(int(i) for i in image)
        n = len(image)
        if sorted(image) != list(range(1, n + 1)):
            raise ValueError(f"not a bijection on 1..{n}: {image}")
        self.image = image

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], degree: int) -> "Permutation":
        """Product of the given cycles as function composition.

        Chained cycles act like composed functions: the rightmost cycle is
        applied first, matching the usual (1 3)(2 4)-style notation.
        """
        result = cls.identity(degree)
        for cycle in cycles:
            image = list(range(1, degree + 1))
            for a, b in zip(cycle, cycle[1:]):
                if not 1 <= a <= degree:
                    raise DegreeMismatchError(f"cycle point {a} out of range 1..{degree}")
                image[a - 1] = b
            if cycle:
                if not 1 <= cycle[-1] <= degree:
                    raise DegreeMismatchError(
                        f"cycle point {cycle[-1]} out of range 1..{degree}"
                    )
                image[cycle[-1] - 1] = cycle[0]
            result = Permutation(image) * result
        return result

    @property
    def degree(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Apply self first, then other."""
        if self.degree != other.degree:
            raise DegreeMismatchError(f"degrees {self.degree} != {other.degree}")
        return Permutation(tuple(other.image[i - 1] for i in self.image))

    def inverse(self) -> "Permutation":
        image = [0] * self.degree
        for i, j in enumerate(self.image, start=1):
            image[j - 1] = i
        return Permutation(image)

    def is_identity(self) -> bool:
        return self.image == tuple(range(1, self.degree + 1))

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycles of length >= 2, each starting at its minimum."""
        seen = set()
        out = []
        for start in range(1, self.degree + 1):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            j = self(start)
            while j != start:
                cycle.append(j)
                seen.add(j)
                j = self(j)
            if len(cycle) > 1:
                out.append(tuple(cycle))
        return out

    def is_even(self) -> bool:
        return sum(len(c) - 1 for c in self.cycles()) % 2 == 0

    def cycle_string(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + " ".join(str(i) for i in c) + ")" for c in cycles)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.image == other.image

    def __hash__(self) -> int:
        return hash(self.image)

    def __lt__(self, other: "Permutation") -> bool:
        return self.image < other.image

    def __repr__(self) -> str:
        return f"Permutation{self.image}"


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Function composition: compose(a, b)(i) = a(b(i))."""
    return b * a


def parse_permutation(text: str, degree: int) -> Permutation:
    """Parse cycle notation like "(1 2 3 4)(5 6)"; "()" is the identity.

    Chained cycles multiply by function composition (rightmost applied
    first); commas and spaces both separate points.
    """
    stripped = text.replace(",", " ").strip()
    if stripped in ("()", ""):
        return Permutation.identity(degree)
    cycles: list[list[int]] = []
    pos = 0
    while pos < len(stripped):
        ch = stripped[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch != "(":
            raise ValueError(f"expected '(' at position {pos} in {text!r}")
        end = stripped.find(")", pos)
        if end < 0:
            raise ValueError(f"unclosed cycle in {text!r}")
        body = stripped[pos + 1 : end].split()
        try:
            cycle = [int(tok) for tok in body]
        except ValueError:
            raise ValueError(f"non-integer point in cycle {stripped[pos:end + 1]!r}")
        if len(set(cycle)) != len(cycle):
            raise ValueError(f"repeated point in cycle {stripped[pos:end + 1]!r}")
        if cycle:
            cycles.append(cycle)
        pos = end + 1
    return Permutation.from_cycles(cycles, degree)


class PermGroup:
    """A subgroup of Sym(n) stored as an explicit element set."""

    __slots__ = ("degree", "elements", "generators", "_sorted")

    def __init__(
        self,
        degree: int,
        elements: Iterable[Permutation],
        generators: Sequence[Permutation] = (),
    ):
        self.degree = degree
        self.elements = frozenset(elements)
        self.generators = tuple(generators)
        self._sorted: tuple[Permutation, ...] | None = None
        if not self.elements:
            raise ValueError("a group needs at least the identity")
        for p in self.elements:
            if p.degree != degree:
                raise DegreeMismatchError(f"element degree {p.degree} != {degree}")

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, p: Permutation) -> bool:
        return p in self.elements

    def __iter__(self) -> Iterator[Permutation]:
        if self._sorted is None:
            self._sorted = tuple(sorted(self.elements))
        return iter(self._sorted)

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PermGroup):
            return NotImplemented
        return self.degree == other.degree and self.elements == other.elements

    def __hash__(self) -> int:
        return hash((self.degree, self.elements))

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self.order})"

    def is_group(self) -> bool:
        """Exact closure/identity/inverse check."""
        if Permutation.identity(self.degree) not in self.elements:
            return False
        for p in self.elements:
            if p.inverse() not in self.elements:
                return False
        return all(a * b in self.elements for a in self.elements for b in self.elements)

    def small_generating_set(self) -> tuple[Permutation, ...]:
        """A greedy (not minimal) generating set, for display."""
        if self.generators and generate(self.degree, self.generators).order == self.order:
            return self.generators
        gens: list[Permutation] = []
        covered = {Permutation.identity(self.degree)}
        for p in sorted(self.elements):
            if p in covered:
                continue
            gens.append(p)
            covered = generate(self.degree, gens).elements
            if len(covered) == self.order:
                break
        return tuple(gens)


def generate(degree: int, gens: Sequence[Permutation]) -> PermGroup:
    """Smallest subgroup of Sym(degree) containing gens (breadth-first closure)."""
    for g in gens:
        if g.degree != degree:
            raise DegreeMismatchError(f"generator degree {g.degree} != {degree}")
    identity = Permutation.identity(degree)
    elements = {identity}
    frontier = [identity]
    gen_list = list(gens)
    while frontier:
        nxt = []
        for p in frontier:
            for g in gen_list:
                q = p * g
                if q not in elements:
                    elements.add(q)
                    nxt.append(q)
        frontier = nxt
    return PermGroup(degree, elements, gens)


def _all_permutations(n: int) -> Iterator[Permutation]:
    if n > ENUMERATION_DEGREE_CAP:
        raise DegreeTooLargeError(
            f"full enumeration of Sym({n}) exceeds the cap of {ENUMERATION_DEGREE_CAP}"
        )
    for image in itertools.permutations(range(1, n + 1)):
        yield Permutation(image)


def symmetric_group(n: int) -> PermGroup:
    if n < 2:
        raise UnsupportedDegreeError("Sym(n) needs n >= 2")
    gens = [Permutation.from_cycles([[1, 2]], n)]
    if n > 2:
        gens.append(Permutation.from_cycles([list(range(1, n + 1))], n))
    return PermGroup(n, _all_permutations(n), gens)


def alternating_group(n: int) -> PermGroup:
    if n < 2:
        raise UnsupportedDegreeError("Alt(n) needs n >= 2")
    elements = [p for p in _all_permutations(n) if p.is_even()]
    gens = [p for p in sorted(elements) if not p.is_identity()][:1]
    if n >= 4:
        gens = [
            Permutation.from_cycles([[1, 2, 3]], n),
            Permutation.from_cycles([list(range(1, n + 1)) if n % 2 else list(range(2, n + 1))], n),
        ]
    return PermGroup(n, elements, gens)


def dihedral_group(n: int) -> PermGroup:
    """Di(n) <= Sym(n): rotation (1 2 ... n) and the mirror fixing point 1."""
    if n < 3:
        raise UnsupportedDegreeError("Di(n) needs n >= 3")
    rotation = Permutation.from_cycles([list(range(1, n + 1))], n)
    mirror = Permutation([1] + [n + 2 - k for k in range(2, n + 1)])
    group = generate(n, [rotation, mirror])
    assert group.order == 2 * n
    return group


def trivial_group(n: int) -> PermGroup:
    return PermGroup(n, [Permutation.identity(n)])


def named_group(kind: str, n: int) -> PermGroup:
    builders = {
        "sym": symmetric_group,
        "alt": alternating_group,
        "dihedral": dihedral_group,
    }
    if kind not in builders:
        raise UnsupportedDegreeError(f"unknown group kind {kind!r}; use sym|alt|dihedral")
    return builders[kind](n)


def is_subgroup(a: PermGroup, b: PermGroup) -> bool:
    if a.degree != b.degree:
        raise DegreeMismatchError(f"degrees {a.degree} != {b.degree}")
    return a.elements <= b.elements


def is_normal(h: PermGroup, g: PermGroup) -> bool:
    """True when g x g^-1 stays in h for conjugating generators of g."""
    if not is_subgroup(h, g):
        return False
    conjugators = g.generators or tuple(g.elements)
    for c in conjugators:
        c_inv = c.inverse()
        for x in h.elements:
            if c * x * c_inv not in h.elements:
                return False
    return True


# ---------------------------------------------------------------------------
# right cosets and the induced action on the coset space


class CosetTransversal:
    """Representatives of the right cosets H*sigma of H in Sym(n), identity first.

    The ordering of the representatives fixes the indexing of the coset
    space, hence the induced action; the action itself does not depend on
    which element of each coset represents it.
    """

    __slots__ = ("subgroup", "reps", "_index_by_key")

    def __init__(self, subgroup: PermGroup, reps: Sequence[Permutation]):
        self.subgroup = subgroup
        self.reps = tuple(reps)
        n = subgroup.degree
        expected = math.factorial(n) // subgroup.order
        if len(self.reps) != expected:
            raise ValueError(f"need {expected} representatives, got {len(self.reps)}")
        if not self.reps[0].is_identity():
            raise ValueError("first representative must be the identity")
        self._index_by_key = {}
        for idx, rep in enumerate(self.reps):
            key = self.coset_key(rep)
            if key in self._index_by_key:
                raise ValueError(f"representatives {idx + 1} and "
                                 f"{self._index_by_key[key] + 1} share a coset")
            self._index_by_key[key] = idx

    @property
    def degree(self) -> int:
        return self.subgroup.degree

    @property
    def index(self) -> int:
        return len(self.reps)

    def coset_key(self, x: Permutation) -> tuple[int, ...]:
        """Lexicographically smallest image tuple in the coset H*x."""
        return min((h * x).image for h in self.subgroup.elements)

    def coset_index(self, x: Permutation) -> int:
        """0-based index of the coset containing x."""
        return self._index_by_key[self.coset_key(x)]


def right_transversal(h: PermGroup) -> CosetTransversal:
    """Canonical transversal: lexicographic minimum of each coset, sorted."""
    keys = sorted({min((p * q).image for p in h.elements) for q in _all_permutations(h.degree)})
    return CosetTransversal(h, [Permutation(k) for k in keys])


def transversal_from_reps(h: PermGroup, reps: Sequence[Permutation]) -> CosetTransversal:
    """Transversal with caller-chosen representatives (validated)."""
    return CosetTransversal(h, reps)


def induced_action(t: CosetTransversal, sigma: Permutation) -> Permutation:
    """The permutation tau of the coset space with H*rep_i*sigma = H*rep_tau(i)."""
    if sigma.degree != t.degree:
        raise DegreeMismatchError(f"degrees {sigma.degree} != {t.degree}")
    return Permutation(tuple(t.coset_index(rep * sigma) + 1 for rep in t.reps))


def homomorphism_image(t: CosetTransversal, g: PermGroup) -> PermGroup:
    """The image {induced_action(t, x) : x in g} as a group of degree t.index."""
    if g.degree != t.degree:
        raise DegreeMismatchError(f"degrees {g.degree} != {t.degree}")
    image = {induced_action(t, x) for x in g.elements}
    gens = tuple(induced_action(t, x) for x in g.generators)
    return PermGroup(t.index, image, gens)


def preimage_of(t: CosetTransversal, s: PermGroup) -> PermGroup:
    """Largest G <= Sym(n) with induced_action(t, G) inside s (elementwise filter)."""
    if s.degree != t.index:
        raise DegreeMismatchError(f"target degree {s.degree} != coset count {t.index}")
    n = t.degree
    elements = [p for p in _all_permutations(n) if induced_action(t, p) in s]
    return PermGroup(n, elements)


def kernel_of(t: CosetTransversal) -> PermGroup:
    return preimage_of(t, trivial_group(t.index))


def check_homomorphism(t: CosetTransversal, pairs: Iterable[tuple[Permutation, Permutation]]) -> bool:
    """Exact check that induced_action(a * b) == induced_action(a) * induced_action(b)."""
    for a, b in pairs:
        if induced_action(t, a * b) != induced_action(t, a) * induced_action(t, b):
            return False
    return True


def match_named_group(g: PermGroup) -> str | None:
    """Name g if it equals (or is conjugate to) Sym, Alt or Di of its degree."""
    n = g.degree
    candidates: list[tuple[str, PermGroup]] = []
    if n >= 2:
        candidates.append((f"Sym({n})", symmetric_group(n)))
        candidates.append((f"Alt({n})", alternating_group(n)))
    if n >= 3:
        candidates.append((f"Di({n})", dihedral_group(n)))
    for name, known in candidates:
        if g == known:
            return name
    if n <= 6:
        for name, known in candidates:
            if known.order != g.order:
                continue
            for c in _all_permutations(n):
                c_inv = c.inverse()
                if frozenset(c_inv * x * c for x in known.elements) == g.elements:
                    return f"{name} conjugate"
    return None
