"""Elementary conditional-independence structures and their axiom systems.

A relation ``i _||_ j | K`` is stored with ``i < j`` and ``K`` as a bitmask, so
symmetry (SG1) holds by construction.  Nodes are 0-based in the API and
1-based in the text format.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from ._sets import check_n, full, mask_of, members, submasks


@dataclass(frozen=True, order=True)
class CIRelation:
    """Elementary relation ``i _||_ j | cond`` with ``cond`` a bitmask."""

    i: int
    j: int
    cond: int = 0

    def __post_init__(self):
        i, j, cond = self.i, self.j, self.cond
        if i == j:
            raise ValueError(f"CI relation needs distinct nodes, got {i} and {j}")
        if i < 0 or j < 0 or cond < 0:
            raise ValueError("node indices must be non-negative")
        if cond >> i & 1 or cond >> j & 1:
            raise ValueError("conditioning set must not contain i or j")
        if i > j:
            object.__setattr__(self, "i", j)
            object.__setattr__(self, "j", i)

    @classmethod
    def of(cls, i: int, j: int, cond: Iterable[int] = ()) -> "CIRelation":
        return cls(i, j, mask_of(cond))

    def canonical(self) -> "CIRelation":
        return self

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.i, self.j, self.cond)

    def to_text(self) -> str:
        base = f"{self.i + 1} _||_ {self.j + 1}"
        if not self.cond:
            return base
        return base + " | " + " ".join(str(v + 1) for v in members(self.cond))

    def __str__(self) -> str:
        return self.to_text()


def all_triples(n: int) -> Iterator[CIRelation]:
    """Every elementary triple on ``n`` nodes, in canonical order."""
    for i, j in itertools.combinations(range(n), 2):
        rest = full(n) & ~(1 << i) & ~(1 << j)
        for cond in sorted(submasks(rest)):
            yield CIRelation(i, j, cond)


def n_triples(n: int) -> int:
    return n * (n - 1) // 2 * (1 << max(n - 2, 0)) if n >= 2 else 0


@dataclass(frozen=True)
class CIStructure:
    """A finite set of elementary CI relations on ``n`` nodes."""

    n: int
    relations: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        check_n(self.n)
        rels = frozenset(self.relations)
        for r in rels:
            if not isinstance(r, CIRelation):
                raise TypeError(f"expected CIRelation, got {type(r).__name__}")
            if r.j >= self.n or r.cond >> self.n:
                raise ValueError(f"relation {r} out of range for n={self.n}")
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "_keys", frozenset(r.key for r in rels))

    @classmethod
    def from_triples(cls, n: int, triples: Iterable) -> "CIStructure":
        """Build from ``(i, j, cond)`` tuples where ``cond`` is an iterable of nodes."""
        return cls(n, frozenset(CIRelation.of(i, j, k) for i, j, k in triples))

    def holds(self, i: int, j: int, cond: int) -> bool:
        if i > j:
            i, j = j, i
        return (i, j, cond) in self._keys

    def __contains__(self, rel: CIRelation) -> bool:
        return rel.key in self._keys

    def __len__(self) -> int:
        return len(self.relations)

    def __iter__(self) -> Iterator[CIRelation]:
        return iter(sorted(self.relations))

    def dependencies(self) -> frozenset:
        """Complement of the relation set over all elementary triples."""
        return frozenset(r for r in all_triples(self.n) if r.key not in self._keys)

    def intersection(self, other: "CIStructure") -> "CIStructure":
        _same_n(self, other)
        return CIStructure(self.n, self.relations & other.relations)

    def to_text(self) -> str:
        lines = [f"# n={self.n}"]
        lines += [r.to_text() for r in self]
        return "\n".join(lines) + "\n"


def _same_n(a: CIStructure, b: CIStructure) -> None:
    if a.n != b.n:
        raise ValueError(f"ground set sizes differ: {a.n} vs {b.n}")


def ci_equal(a: CIStructure, b: CIStructure) -> bool:
    _same_n(a, b)
    return a.relations == b.relations


# -- axioms ---------------------------------------------------------------

def _contexts(n: int) -> Iterator[tuple[int, int, int, int]]:
    """Ordered distinct (i, j, k) with every L avoiding them."""
    for i, j, k in itertools.permutations(range(n), 3):
        rest = full(n) & ~(1 << i | 1 << j | 1 << k)
        for L in submasks(rest):
            yield i, j, k, L


def _fmt(i: int, j: int, L: int) -> str:
    return str(CIRelation(i, j, L))


def _sg2(c: CIStructure, i, j, k, L) -> Optional[str]:
    h = c.holds
    jL, kL = L | 1 << j, L | 1 << k
    if h(i, j, L) and h(i, k, jL) and not (h(i, k, L) and h(i, j, kL)):
        return f"SG2: {_fmt(i, j, L)} and {_fmt(i, k, jL)} but not both {_fmt(i, k, L)} and {_fmt(i, j, kL)}"
    return None


def _int(c: CIStructure, i, j, k, L) -> Optional[str]:
    h = c.holds
    jL, kL = L | 1 << j, L | 1 << k
    if h(i, j, kL) and h(i, k, jL) and not (h(i, j, L) and h(i, k, L)):
        return f"INT: {_fmt(i, j, kL)} and {_fmt(i, k, jL)} but not both {_fmt(i, j, L)} and {_fmt(i, k, L)}"
    return None


def _g1(c: CIStructure, i, j, k, L) -> Optional[str]:
    h = c.holds
    jL, kL = L | 1 << j, L | 1 << k
    if h(i, j, L) and h(i, k, L) and not (h(i, j, kL) and h(i, k, jL)):
        return f"G1: {_fmt(i, j, L)} and {_fmt(i, k, L)} but not both {_fmt(i, j, kL)} and {_fmt(i, k, jL)}"
    return None


def _g2(c: CIStructure, i, j, k, L) -> Optional[str]:
    h = c.holds
    kL = L | 1 << k
    if h(i, j, L) and h(i, j, kL) and not (h(i, k, L) or h(j, k, L)):
        return f"G2: {_fmt(i, j, L)} and {_fmt(i, j, kL)} but neither {_fmt(i, k, L)} nor {_fmt(j, k, L)}"
    return None


_AXIOMS = {
    "semigraphoid": (_sg2,),
    "graphoid": (_sg2, _int),
    "gaussoid": (_sg2, _int, _g1, _g2),
}


def find_violation(c: CIStructure, axioms: str = "semigraphoid") -> Optional[str]:
    """First violated axiom instance, or None.

    ``axioms`` is one of ``semigraphoid``, ``graphoid``, ``gaussoid`` or
    ``mss-monotone``.
    """
    if axioms == "mss-monotone":
        return mss_monotonicity_violation(c)
    try:
        checks = _AXIOMS[axioms]
    except KeyError:
        raise ValueError(f"unknown axiom system {axioms!r}") from None
    # run the cheaper systems first so the reported witness is the most basic one
    for check in checks:
        for ctx in _contexts(c.n):
            msg = check(c, *ctx)
            if msg:
                return msg
    return None


def is_semigraphoid(c: CIStructure) -> bool:
    return find_violation(c, "semigraphoid") is None


def is_graphoid(c: CIStructure) -> bool:
    return find_violation(c, "graphoid") is None


def is_gaussoid(c: CIStructure) -> bool:
    return find_violation(c, "gaussoid") is None


def mss_monotonicity_violation(c: CIStructure) -> Optional[str]:
    """Witness that ``i _||_ j | K`` holds but ``i _||_ j | Kk`` fails, or None.

    Upward closure of every relation is necessary for a structure to come from a
    Minkowski sum of standard simplices.
    """
    for r in sorted(c.relations):
        rest = full(c.n) & ~(1 << r.i | 1 << r.j | r.cond)
        for k in members(rest):
            if not c.holds(r.i, r.j, r.cond | 1 << k):
                bigger = CIRelation(r.i, r.j, r.cond | 1 << k)
                return f"MSS: {r} holds but {bigger} does not"
    return None


def is_mss_monotone(c: CIStructure) -> bool:
    return mss_monotonicity_violation(c) is None


# -- text format ----------------------------------------------------------

_REL = re.compile(r"^\s*(\d+)\s*_\|\|_\s*(\d+)\s*(?:\|\s*([\d\s]*))?$")
_HDR = re.compile(r"^\s*#\s*n\s*=\s*(\d+)\s*$")


class CIParseError(ValueError):
    pass


def parse_ci_text(text: str, n: Optional[int] = None) -> CIStructure:
    """Parse ``i _||_ j | k1 k2`` lines (1-based).

    The ground set size comes from ``n``, else a ``# n=...`` header, else the
    largest index mentioned.
    """
    triples = []
    header_n = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        m = _HDR.match(line)
        if m:
            header_n = int(m.group(1))
            continue
        if line.startswith("#"):
            continue
        m = _REL.match(line)
        if not m:
            raise CIParseError(f"line {lineno}: not an elementary CI relation: {raw!r}")
        i, j = int(m.group(1)) - 1, int(m.group(2)) - 1
        cond = [int(t) - 1 for t in (m.group(3) or "").split()]
        if min([i, j] + cond) < 0:
            raise CIParseError(f"line {lineno}: indices are 1-based")
        triples.append((lineno, i, j, cond))
    size = n if n is not None else header_n
    if size is None:
        size = 1 + max((max([i, j] + cond) for _, i, j, cond in triples), default=-1)
    rels = set()
    for lineno, i, j, cond in triples:
        if max([i, j] + cond) >= size:
            raise CIParseError(f"line {lineno}: index out of range for n={size}")
        if len(set(cond)) != len(cond) or i in cond or j in cond or i == j:
            raise CIParseError(f"line {lineno}: sets must be disjoint and i != j")
        rels.add(CIRelation.of(i, j, cond))
    return CIStructure(size, frozenset(rels))


def describe(c: CIStructure) -> list[str]:
    return [r.to_text() for r in c]


__all__ = [
    "CIRelation", "CIStructure", "CIParseError", "all_triples", "n_triples",
    "ci_equal", "find_violation", "is_semigraphoid", "is_graphoid",
    "is_gaussoid", "is_mss_monotone", "mss_monotonicity_violation",
    "parse_ci_text", "describe",
]
