"""Matroids of simple Bayes-ball paths and Minkowski sums of their polytopes.

A path ``t1 c11 .. c1m t2 c21 .. t_{d+1}`` is cut into groups of consecutive
treks with the canyons between them.  A group with ``m`` canyons carries the
uniform matroid of rank ``m + 1`` on its ``m + 2`` blocks, and consecutive
groups share their trek.  Nodes on a block are parallel; nodes off the path
are loops.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from ._sets import check_bound, full, members
from .ci import CIRelation, CIStructure, all_triples
from .graphs import (
    CANYON,
    MixedGraph,
    TrekCanyonDecomposition,
    find_bayes_ball_path,
    separation_ci,
    simplify_path,
)
from .linalg import rank as matrix_rank
from .setfunction import SetFunction, _kappa, sum_functions, zero

LOOP = -1
MAX_MSMP_N = 8


@dataclass(frozen=True)
class PathMatroid:
    """Matroid on ``range(n)`` induced by a trek/canyon decomposition.

    ``block_of[v]`` is the block index of node ``v`` or ``LOOP``;
    ``groups[k]`` lists the block indices of group ``k`` in path order;
    ``points[b]`` is the homogenised realisation column of block ``b``.
    """

    n: int
    block_of: tuple
    blocks: tuple
    groups: tuple
    points: tuple

    def node_column(self, v: int) -> tuple:
        b = self.block_of[v]
        if b == LOOP:
            return (Fraction(0),) * len(self.points[0])
        return self.points[b]

    def realization(self) -> list[list[Fraction]]:
        """Matrix with one column per node (rows = homogenising row + coordinates)."""
        cols = [self.node_column(v) for v in range(self.n)]
        return [list(row) for row in zip(*cols)]

    def loops(self) -> int:
        return sum(1 << v for v in range(self.n) if self.block_of[v] == LOOP)

    def parallel_classes(self) -> list[list[int]]:
        return [sorted(v for v in range(self.n) if self.block_of[v] == b)
                for b in range(len(self.blocks))]

    def _blocks_of(self, S: int) -> set[int]:
        return {self.block_of[v] for v in members(S)} - {LOOP}

    def rank(self, S: int) -> int:
        """Rank via exact matrix rank of the realisation columns."""
        blocks = sorted(self._blocks_of(S))
        if not blocks:
            return 0
        cols = [self.points[b] for b in blocks]
        return matrix_rank([list(row) for row in zip(*cols)])

    def closure_blocks(self, blocks: set[int]) -> set[int]:
        """Smallest block set closed under the group rule: a group containing all
        but one of its blocks must contain that one too."""
        out = set(blocks)
        changed = True
        while changed:
            changed = False
            for grp in self.groups:
                missing = [b for b in grp if b not in out]
                if len(missing) == 1:
                    out.add(missing[0])
                    changed = True
        return out

    def closure(self, S: int) -> int:
        """Span of ``S`` as a node set (contains every loop)."""
        cl = self.closure_blocks(self._blocks_of(S))
        return sum(1 << v for v in range(self.n) if self.block_of[v] in cl or self.block_of[v] == LOOP)

    def closure_rank(self, S: int) -> int:
        """Rank from the flat conditions: grow an independent set greedily."""
        indep: set[int] = set()
        for b in sorted(self._blocks_of(S)):
            if b not in self.closure_blocks(indep):
                indep.add(b)
        return len(indep)

    def rank_function(self) -> SetFunction:
        return SetFunction.from_callable(self.n, self.rank)

    def bases(self) -> list[int]:
        r = self.rank(full(self.n))
        return [m for m in range(1 << self.n) if bin(m).count("1") == r and self.rank(m) == r]


def matroid_from_path(d: TrekCanyonDecomposition, n: int) -> PathMatroid:
    """Realise the matroid of a simple path by chained moment-curve blocks.

    Group ``k`` with ``m`` canyons places its ``s``-th block at
    ``(s, s**2, .., s**m)`` in its own coordinates; earlier groups' coordinates
    take the value of their last trek and later ones are zero.
    """
    blocks = d.blocks
    if not blocks or blocks[0][0] == CANYON or blocks[-1][0] == CANYON:
        raise ValueError("decomposition must start and end with a trek")
    block_of = [LOOP] * n
    for b, (_, nodes) in enumerate(blocks):
        for v in nodes:
            if not 0 <= v < n:
                raise ValueError(f"node {v} out of range")
            if block_of[v] != LOOP:
                raise ValueError(f"node {v} appears in two blocks")
            block_of[v] = b
    trek_idx = [b for b, (kind, _) in enumerate(blocks) if kind != CANYON]
    groups = []
    for lo, hi in zip(trek_idx, trek_idx[1:]):
        if hi == lo + 1:
            raise ValueError("two treks with no canyon between them")
        groups.append(tuple(range(lo, hi + 1)))
    sizes = [len(g) - 2 for g in groups]
    dim = sum(sizes)
    points: list[Optional[tuple]] = [None] * len(blocks)

    def point(k: int, s: int) -> tuple:
        coords = []
        for q, m in enumerate(sizes):
            t = m + 1 if q < k else (s if q == k else 0)
            coords.extend(Fraction(t) ** p for p in range(1, m + 1))
        return (Fraction(1), *coords)

    if not groups:
        points[0] = (Fraction(1),)
    for k, grp in enumerate(groups):
        for s, b in enumerate(grp):
            p = point(k, s)
            assert points[b] is None or points[b] == p
            points[b] = p
    assert all(len(p) == dim + 1 for p in points)
    return PathMatroid(n, tuple(block_of), tuple(blocks), tuple(groups), tuple(points))


# -- matroids as set functions --------------------------------------------------

def _rank_of(m: Union[PathMatroid, SetFunction]):
    if isinstance(m, PathMatroid):
        return m.n, m.rank
    return m.n, m


def matroid_semigraphoid(m: Union[PathMatroid, SetFunction]) -> CIStructure:
    """Independence relations of a matroid: every triple except the dependences
    ``rank(K) + 1 = rank(Ki) = rank(Kj) = rank(Kij)``."""
    n, r = _rank_of(m)
    rels = []
    for rel in all_triples(n):
        K = rel.cond
        Ki, Kj = K | 1 << rel.i, K | 1 << rel.j
        rk = r(K)
        if not (rk + 1 == r(Ki) == r(Kj) == r(Ki | Kj)):
            rels.append(rel)
    return CIStructure(n, frozenset(rels))


def matroid_polytope_setfunction(m: PathMatroid) -> SetFunction:
    return m.rank_function()


def is_matroid_rank(r: SetFunction) -> bool:
    """Integer valued, zero on the empty set, unit increase and submodular."""
    n = r.n
    v = r.values
    if any(x.denominator != 1 for x in v) or v[0] != 0:
        return False
    for A in range(1 << n):
        for a in range(n):
            if not A >> a & 1 and v[A | 1 << a] - v[A] not in (0, 1):
                return False
    for rel in all_triples(n):
        K = rel.cond
        Ki, Kj = K | 1 << rel.i, K | 1 << rel.j
        if v[Ki] + v[Kj] < v[Ki | Kj] + v[K]:
            return False
    return True


def is_connected(r: SetFunction) -> bool:
    """A matroid is connected when its ground set has no proper separator."""
    return r.n > 0 and _kappa(r, full(r.n)) == 1


def enumerate_matroids(n: int) -> list[SetFunction]:
    """Rank functions of all matroids on ``range(n)``, by backtracking over values."""
    check_bound(n, 5, "enumerate_matroids")
    size = 1 << n
    vals = [0] * size
    out = []

    def ok(A: int) -> bool:
        for a in members(A):
            d = vals[A] - vals[A & ~(1 << a)]
            if d not in (0, 1):
                return False
        # submodularity for every pair i, j in A with K = A - i - j
        for i, j in itertools.combinations(members(A), 2):
            K = A & ~(1 << i | 1 << j)
            if vals[K | 1 << i] + vals[K | 1 << j] < vals[A] + vals[K]:
                return False
        return True

    def fill(A: int) -> None:
        if A == size:
            out.append(SetFunction(n, tuple(vals)))
            return
        top = A.bit_length() - 1
        base = vals[A & ~(1 << top)]
        for x in (base, base + 1):
            vals[A] = x
            if ok(A):
                fill(A + 1)
        vals[A] = 0

    fill(1)
    return out


# -- MSMP builder ---------------------------------------------------------------

@dataclass(frozen=True)
class MSMPSummand:
    relation: CIRelation
    decomposition: TrekCanyonDecomposition
    matroid: PathMatroid


def msmp_summands(g: MixedGraph) -> list[MSMPSummand]:
    """One path matroid per elementary dependence of ``g``, in canonical order."""
    check_bound(g.n, MAX_MSMP_N, "msmp_associahedron")
    sep = separation_ci(g)
    out = []
    for rel in all_triples(g.n):
        if sep.holds(rel.i, rel.j, rel.cond):
            continue
        p = find_bayes_ball_path(g, rel.i, rel.j, rel.cond)
        assert p is not None, f"no path for dependence {rel}"
        d = simplify_path(g, p)
        out.append(MSMPSummand(rel, d, matroid_from_path(d, g.n)))
    return out


def msmp_associahedron(g: MixedGraph) -> SetFunction:
    """Sum of the distinct rank functions of the path matroids of ``g``.

    Its semigraphoid equals the separation semigraphoid of ``g``.
    """
    ranks = {}
    for s in msmp_summands(g):
        r = s.matroid.rank_function()
        ranks.setdefault(r.values, r)
    if not ranks:
        return zero(g.n)
    return sum_functions(ranks[k] for k in sorted(ranks))


def matroid_to_json(m: PathMatroid) -> dict:
    return {
        "n": m.n,
        "rank": m.rank(full(m.n)),
        "loops": [v + 1 for v in members(m.loops())],
        "parallel_classes": [[v + 1 for v in c] for c in m.parallel_classes()],
        "blocks": [{"kind": kind, "nodes": [v + 1 for v in nodes]} for kind, nodes in m.blocks],
        "groups": [list(g) for g in m.groups],
        "realization": [[str(x) for x in row] for row in m.realization()],
    }


__all__ = [
    "PathMatroid", "MSMPSummand", "LOOP", "matroid_from_path", "matroid_semigraphoid",
    "matroid_polytope_setfunction", "is_matroid_rank", "is_connected",
    "enumerate_matroids", "msmp_summands", "msmp_associahedron", "matroid_to_json",
]
