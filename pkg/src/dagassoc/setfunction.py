"""Submodular set functions and the combinatorics of their base polytopes.

Two value kinds are supported.  ``rational`` stores ``w(A)`` directly.  ``log``
stores a positive rational ``d(A)`` and means ``w(A) = log d(A)``; every linear
relation among values is then decided as a multiplicative relation among the
``d(A)``, so no floating point enters any equality test.

For a log-kind function a greedy vertex coordinate ``x_i = log r`` is stored as
the ratio ``r``.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from ._sets import check_bound, check_n, full, members, submasks
from .ci import CIRelation, CIStructure, all_triples
from .linalg import rank as matrix_rank

RATIONAL = "rational"
LOG = "log"

MAX_CLASSES_N = 9
MAX_INCIDENCE_N = 7


class NotSubmodularError(ValueError):
    pass


@dataclass(frozen=True)
class SetFunction:
    """Exact function on subsets of ``range(n)``, indexed by bitmask."""

    n: int
    values: tuple
    kind: str = RATIONAL

    def __post_init__(self):
        check_n(self.n)
        if self.kind not in (RATIONAL, LOG):
            raise ValueError(f"unknown value kind {self.kind!r}")
        vals = tuple(Fraction(v) for v in self.values)
        if len(vals) != 1 << self.n:
            raise ValueError(f"need {1 << self.n} values, got {len(vals)}")
        if self.kind == RATIONAL and vals[0] != 0:
            raise ValueError("value of the empty set must be 0")
        if self.kind == LOG:
            if vals[0] != 1:
                raise ValueError("log kind: d(empty set) must be 1")
            if any(v <= 0 for v in vals):
                raise ValueError("log kind: all d(A) must be positive")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, n: int, f: Callable[[int], object], kind: str = RATIONAL) -> "SetFunction":
        return cls(n, tuple(f(m) for m in range(1 << n)), kind)

    def __call__(self, mask: int) -> Fraction:
        return self.values[mask]

    def approx(self, mask: int) -> float:
        """Float value of ``w(mask)``; for log kind this is ``log d``."""
        v = self.values[mask]
        return math.log(v) if self.kind == LOG else float(v)

    # combining ------------------------------------------------------------
    def __add__(self, other: "SetFunction") -> "SetFunction":
        if not isinstance(other, SetFunction):
            return NotImplemented
        if self.n != other.n:
            raise ValueError("set functions have different ground sets")
        if self.kind != other.kind:
            raise ValueError("cannot add set functions of different value kinds")
        if self.kind == LOG:
            vals = tuple(a * b for a, b in zip(self.values, other.values))
        else:
            vals = tuple(a + b for a, b in zip(self.values, other.values))
        return SetFunction(self.n, vals, self.kind)

    def scale(self, c: int) -> "SetFunction":
        if c < 0:
            raise ValueError("scaling must be non-negative")
        if self.kind == LOG:
            return SetFunction(self.n, tuple(v ** c for v in self.values), LOG)
        return SetFunction(self.n, tuple(v * c for v in self.values), RATIONAL)

    def to_rational(self) -> "SetFunction":
        if self.kind != RATIONAL:
            raise ValueError("log-kind values are not rational")
        return self


def zero(n: int, kind: str = RATIONAL) -> SetFunction:
    return SetFunction(n, (Fraction(int(kind == LOG)),) * (1 << n), kind)


def modular(n: int, weights: Optional[Sequence] = None) -> SetFunction:
    w = [Fraction(1)] * n if weights is None else [Fraction(x) for x in weights]
    return SetFunction.from_callable(n, lambda m: sum((w[i] for i in members(m)), Fraction(0)))


def simplex(n: int, I: int) -> SetFunction:
    """Function of the standard simplex on ``I``: 1 on sets meeting ``I``."""
    return SetFunction.from_callable(n, lambda m: int(bool(m & I)))


def permutohedron(n: int) -> SetFunction:
    """Sum of the simplex functions of every nonempty subset."""
    out = zero(n)
    for I in range(1, 1 << n):
        out = out + simplex(n, I)
    return out


def sum_functions(ws: Iterable[SetFunction]) -> SetFunction:
    ws = list(ws)
    if not ws:
        raise ValueError("empty sum")
    out = ws[0]
    for w in ws[1:]:
        out = out + w
    return out


def dual_flip(w: SetFunction) -> SetFunction:
    """``w'(S) = w([n] minus S) - w([n])``."""
    top = full(w.n)
    if w.kind == LOG:
        d = w.values[top]
        return SetFunction(w.n, tuple(w.values[top & ~m] / d for m in range(1 << w.n)), LOG)
    return SetFunction(w.n, tuple(w.values[top & ~m] - w.values[top] for m in range(1 << w.n)))


# -- exact comparisons ---------------------------------------------------------

def _sign(w: SetFunction, plus: Sequence[int], minus: Sequence[int]) -> int:
    """Sign of ``sum w(plus) - sum w(minus)``."""
    v = w.values
    if w.kind == LOG:
        a = math.prod((v[m] for m in plus), start=Fraction(1))
        b = math.prod((v[m] for m in minus), start=Fraction(1))
    else:
        a = sum((v[m] for m in plus), Fraction(0))
        b = sum((v[m] for m in minus), Fraction(0))
    return (a > b) - (a < b)


def _elementary_sign(w: SetFunction, i: int, j: int, K: int) -> int:
    Ki, Kj = K | 1 << i, K | 1 << j
    return _sign(w, (Ki, Kj), (Ki | Kj, K))


def submodularity_violation(w: SetFunction) -> Optional[CIRelation]:
    for r in all_triples(w.n):
        if _elementary_sign(w, r.i, r.j, r.cond) < 0:
            return r
    return None


def is_submodular(w: SetFunction) -> bool:
    return submodularity_violation(w) is None


def _require_submodular(w: SetFunction) -> None:
    bad = submodularity_violation(w)
    if bad is not None:
        raise NotSubmodularError(f"not submodular: elementary inequality fails at {bad}")


def semigraphoid_of(w: SetFunction) -> CIStructure:
    """Relations ``i _||_ j | K`` at which the elementary inequality is tight."""
    _require_submodular(w)
    rels = frozenset(r for r in all_triples(w.n) if _elementary_sign(w, r.i, r.j, r.cond) == 0)
    return CIStructure(w.n, rels)


def is_monotone(w: SetFunction) -> bool:
    return all(_sign(w, (m | 1 << i,), (m,)) >= 0
               for m in range(1 << w.n) for i in range(w.n) if not m >> i & 1)


# -- greedy vertices and the coarsened fan ---------------------------------------

def _check_perm(pi: Sequence[int], n: int) -> None:
    if sorted(pi) != list(range(n)):
        raise ValueError(f"not a permutation of range({n}): {pi}")


def _greedy(w: SetFunction, pi: Sequence[int]) -> tuple:
    v = w.values
    x = [None] * w.n
    prev = 0
    for a in pi:
        cur = prev | 1 << a
        x[a] = v[cur] / v[prev] if w.kind == LOG else v[cur] - v[prev]
        prev = cur
    return tuple(x)


def greedy_vertex(w: SetFunction, pi: Sequence[int]) -> tuple:
    """Vertex of the base polytope maximising any functional ordered like ``pi``.

    ``pi[0]`` is the largest coordinate direction.  Log-kind coordinates are
    returned as ratios (``x_i = log`` of the entry).
    """
    _check_perm(pi, w.n)
    _require_submodular(w)
    return _greedy(w, pi)


def vertex_approx(w: SetFunction, x: tuple) -> tuple[float, ...]:
    return tuple(math.log(c) if w.kind == LOG else float(c) for c in x)


@dataclass(frozen=True)
class PermutohedronSummary:
    """Partition of all permutations by greedy vertex.

    ``classes[k]`` lists permutations in lexicographic order and shares the
    vertex ``class_vertex[k]``; classes are sorted by their first permutation.
    """

    n: int
    classes: tuple
    class_vertex: tuple
    removed_walls: CIStructure
    facet_tight_sets: tuple

    def class_of(self, pi: Sequence[int]) -> int:
        pi = tuple(pi)
        for k, cls in enumerate(self.classes):
            if pi in cls:
                return k
        raise KeyError(pi)

    def multi_classes(self) -> list[tuple]:
        return [c for c in self.classes if len(c) > 1]

    def partition(self) -> frozenset:
        return frozenset(frozenset(c) for c in self.classes)


def permutation_classes(w: SetFunction) -> PermutohedronSummary:
    check_bound(w.n, MAX_CLASSES_N, "permutation_classes")
    sg = semigraphoid_of(w)
    groups: dict[tuple, list] = defaultdict(list)
    for pi in itertools.permutations(range(w.n)):
        groups[_greedy(w, pi)].append(pi)
    ordered = sorted(groups.items(), key=lambda kv: kv[1][0])
    return PermutohedronSummary(
        n=w.n,
        classes=tuple(tuple(ps) for _, ps in ordered),
        class_vertex=tuple(x for x, _ in ordered),
        removed_walls=sg,
        facet_tight_sets=tuple(facet_tight_sets(w)),
    )


def classes_by_walls(n: int, ci: CIStructure) -> frozenset:
    """Permutation classes obtained by deleting the walls listed in ``ci``.

    The wall between ``(..K..|i j|..)`` and ``(..K..|j i|..)`` is deleted when
    ``i _||_ j | K`` is in ``ci``; classes are the connected components.
    """
    check_bound(n, MAX_CLASSES_N, "classes_by_walls")
    perms = list(itertools.permutations(range(n)))
    index = {p: k for k, p in enumerate(perms)}
    parent = list(range(len(perms)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for p in perms:
        K = 0
        for k in range(n - 1):
            i, j = p[k], p[k + 1]
            if i < j and ci.holds(i, j, K):
                q = p[:k] + (j, i) + p[k + 2:]
                parent[find(index[p])] = find(index[q])
            K |= 1 << i
    comps: dict[int, list] = defaultdict(list)
    for p in perms:
        comps[find(index[p])].append(p)
    return frozenset(frozenset(c) for c in comps.values())


def class_poset(perms: Iterable[Sequence[int]], n: int) -> set[tuple[int, int]]:
    """Cover relations ``(a, b)``: ``a`` precedes ``b`` in every listed permutation.

    This is the transitive reduction of the common order.
    """
    perms = [tuple(p) for p in perms]
    pos = [{v: k for k, v in enumerate(p)} for p in perms]
    rel = {(a, b) for a in range(n) for b in range(n)
           if a != b and all(q[a] < q[b] for q in pos)}
    return {(a, b) for a, b in rel
            if not any((a, c) in rel and (c, b) in rel for c in range(n))}


# -- H-representation, dimension and facets --------------------------------------

def h_representation(w: SetFunction) -> tuple[list[tuple[int, Fraction]], tuple[int, Fraction]]:
    """Inequalities ``sum_{i in I} x_i <= w(I)`` for nonempty proper ``I`` and the
    equality on the full set.  Log-kind bounds are the stored ``d(I)``."""
    top = full(w.n)
    ineqs = [(I, w.values[I]) for I in range(1, top)]
    return ineqs, (top, w.values[top])


def satisfies_h(w: SetFunction, x: tuple) -> bool:
    """Whether the point ``x`` (kind representation) lies in the base polytope."""
    def total(I):
        parts = [x[i] for i in members(I)]
        return math.prod(parts, start=Fraction(1)) if w.kind == LOG else sum(parts, Fraction(0))
    top = full(w.n)
    if total(top) != w.values[top]:
        return False
    return all(total(I) <= w.values[I] for I in range(1, top))


def is_tight(w: SetFunction, x: tuple, I: int) -> bool:
    parts = [x[i] for i in members(I)]
    s = math.prod(parts, start=Fraction(1)) if w.kind == LOG else sum(parts, Fraction(0))
    return s == w.values[I]


def _kappa(w: SetFunction, ground: int, base: int = 0) -> int:
    """Number of connected components of the minor on ``ground`` after
    contracting ``base`` (``ground`` and ``base`` disjoint)."""
    if ground == 0:
        return 0
    seps = [S for S in submasks(ground)
            if _sign(w, (S | base, (ground & ~S) | base), (ground | base, base)) == 0]
    comps = 0
    covered = 0
    for i in members(ground):
        if covered >> i & 1:
            continue
        atom = ground
        for S in seps:
            if S >> i & 1:
                atom &= S
        covered |= atom
        comps += 1
    return comps


def dimension(w: SetFunction) -> int:
    """Dimension of the base polytope: ``n`` minus the number of components."""
    return w.n - _kappa(w, full(w.n))


def facet_tight_sets(w: SetFunction) -> list[int]:
    """Nonempty proper ``I`` whose inequality is tight on a facet.

    The face maximising ``1_I`` is the product of the restriction to ``I`` and
    the contraction by ``I``; it is a facet exactly when the component counts
    add up to one more than those of ``w``.
    """
    top = full(w.n)
    k = _kappa(w, top)
    return [I for I in range(1, top)
            if _kappa(w, I) + _kappa(w, top & ~I, I) == k + 1]


@dataclass(frozen=True)
class FacetIncidence:
    """Vertex/facet incidence of a base polytope.

    ``matrix[v][f]`` is 1 when vertex ``v`` lies on facet ``f``; ``facets[f]`` is
    one defining set ``I`` for that facet.
    """

    vertices: tuple
    facets: tuple
    matrix: tuple
    dim: int
    degrees: tuple
    exact: bool

    @property
    def is_simple(self) -> bool:
        return all(d == self.dim for d in self.degrees)

    @property
    def f_vector(self) -> tuple[int, int]:
        """Vertex and facet counts."""
        return (len(self.vertices), len(self.facets))

    @property
    def n_edges(self) -> int:
        return sum(self.degrees) // 2


def _affine_rank(points: Sequence[Sequence[Fraction]]) -> int:
    if not points:
        return -1
    p0 = points[0]
    return matrix_rank([[a - b for a, b in zip(p, p0)] for p in points[1:]]) if len(points) > 1 else 0


def _degrees(nv: int, facet_vertex_masks: Sequence[int]) -> tuple[int, ...]:
    """Vertex degrees in the edge graph: ``u, v`` are adjacent when the facets
    containing both meet in exactly ``{u, v}``."""
    on = [[f for f, fm in enumerate(facet_vertex_masks) if fm >> v & 1] for v in range(nv)]
    everything = (1 << nv) - 1
    deg = [0] * nv
    for u in range(nv):
        fu = set(on[u])
        for v in range(u + 1, nv):
            common = everything
            for f in on[v]:
                if f in fu:
                    common &= facet_vertex_masks[f]
            if common == (1 << u | 1 << v):
                deg[u] += 1
                deg[v] += 1
    return tuple(deg)


def _incidence_from_columns(vertices, columns, dim, exact) -> FacetIncidence:
    """Keep the maximal distinct proper columns as facets."""
    nv = len(vertices)
    everything = (1 << nv) - 1
    cols: dict[int, int] = {}
    for I, mask in columns:
        if mask and mask != everything and mask not in cols:
            cols[mask] = I
    masks = [m for m in cols if not any(m != o and m & o == m for o in cols)]
    masks.sort(key=lambda m: cols[m])
    matrix = tuple(tuple(int(m >> v & 1) for m in masks) for v in range(nv))
    return FacetIncidence(
        vertices=tuple(vertices),
        facets=tuple(cols[m] for m in masks),
        matrix=matrix,
        dim=dim,
        degrees=_degrees(nv, masks),
        exact=exact,
    )


def facet_incidence(w: SetFunction) -> FacetIncidence:
    """Exact vertex/facet incidence for rational-kind functions.

    A facet is an inequality whose tight vertices have affine rank one less than
    the polytope.  Log-kind input is routed to :func:`float_incidence_heuristic`.
    """
    if w.kind == LOG:
        return float_incidence_heuristic(w)
    check_bound(w.n, MAX_INCIDENCE_N, "facet_incidence")
    _require_submodular(w)
    verts = sorted({_greedy(w, pi) for pi in itertools.permutations(range(w.n))})
    dim = _affine_rank(verts)
    columns = []
    for I in range(1, full(w.n)):
        tight = [k for k, x in enumerate(verts) if is_tight(w, x, I)]
        if _affine_rank([verts[k] for k in tight]) == dim - 1:
            columns.append((I, sum(1 << k for k in tight)))
    return _incidence_from_columns(verts, columns, dim, exact=True)


def float_incidence_heuristic(w: SetFunction, round_bits: int = 52, zero_bits: int = 35) -> FacetIncidence:
    """Incidence from rounded values, in the style of a floating-point pipeline.

    Values ``w(A)`` (``log d(A)`` for log kind) are rounded to multiples of
    ``2**-round_bits``; greedy candidates are computed exactly from the rounded
    function, and slacks below ``2**-zero_bits`` in absolute value count as
    tight.  Identical rows and columns are merged and only maximal proper
    columns are kept.
    """
    check_bound(w.n, MAX_INCIDENCE_N, "float_incidence_heuristic")
    scale = 1 << round_bits
    r = [Fraction(round(w.approx(m) * scale), scale) for m in range(1 << w.n)]
    r[0] = Fraction(0)
    rounded = SetFunction(w.n, tuple(r), RATIONAL)
    cands = sorted({_greedy(rounded, pi) for pi in itertools.permutations(range(w.n))})
    eps = Fraction(1, 1 << zero_bits)
    top = full(w.n)
    rows: dict[tuple, tuple] = {}
    for x in cands:
        row = tuple(int(abs(r[I] - sum((x[i] for i in members(I)), Fraction(0))) < eps)
                    for I in range(1, top))
        rows.setdefault(row, x)
    uniq = list(rows)
    nv = len(uniq)
    columns = [(I, sum(1 << v for v in range(nv) if uniq[v][c]))
               for c, I in enumerate(range(1, top))]
    verts = [rows[u] for u in uniq]
    dim = _approx_dim(rounded, eps)
    return _incidence_from_columns(verts, columns, dim, exact=False)


def _approx_dim(w: SetFunction, eps: Fraction) -> int:
    top = full(w.n)
    v = w.values
    seps = [S for S in submasks(top) if abs(v[S] + v[top & ~S] - v[top]) < eps]
    comps, covered = 0, 0
    for i in range(w.n):
        if covered >> i & 1:
            continue
        atom = top
        for S in seps:
            if S >> i & 1:
                atom &= S
        covered |= atom
        comps += 1
    return w.n - comps


# -- JSON -------------------------------------------------------------------------

def _key(mask: int) -> str:
    return ",".join(str(i + 1) for i in members(mask))


def setfunction_to_json(w: SetFunction) -> dict:
    return {"n": w.n, "kind": w.kind,
            "values": {_key(m): str(w.values[m]) for m in range(1, 1 << w.n)}}


def setfunction_from_json(obj: dict) -> SetFunction:
    try:
        n = int(obj["n"])
        kind = obj.get("kind", RATIONAL)
        check_n(n)
        vals = [Fraction(int(kind == LOG))] * (1 << n)
        seen = set()
        for k, s in obj["values"].items():
            idx = [int(t) - 1 for t in k.split(",") if t.strip()] if k.strip() else []
            if any(not 0 <= i < n for i in idx):
                raise ValueError(f"subset {k!r} out of range")
            m = sum(1 << i for i in set(idx))
            vals[m] = Fraction(s)
            seen.add(m)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed set function JSON: {exc}") from exc
    missing = [m for m in range(1, 1 << n) if m not in seen]
    if missing:
        raise ValueError(f"set function JSON is missing {len(missing)} subsets, e.g. {{{_key(missing[0])}}}")
    return SetFunction(n, tuple(vals), kind)


def describe_value(w: SetFunction, mask: int) -> dict:
    """Exact value plus, for log kind, a marked decimal approximation."""
    if w.kind == LOG:
        return {"det": str(w.values[mask]), "approx_log": round(w.approx(mask), 12)}
    return {"value": str(w.values[mask])}


__all__ = [
    "SetFunction", "PermutohedronSummary", "FacetIncidence", "NotSubmodularError",
    "RATIONAL", "LOG", "zero", "modular", "simplex", "permutohedron", "sum_functions",
    "dual_flip", "is_submodular", "semigraphoid_of", "greedy_vertex",
    "permutation_classes", "classes_by_walls", "class_poset", "h_representation",
    "satisfies_h", "dimension", "facet_tight_sets", "facet_incidence",
    "float_incidence_heuristic", "setfunction_to_json", "setfunction_from_json",
]
