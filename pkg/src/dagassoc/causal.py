"""Ordering-based causal search over minimal I-maps.

A permutation ``pi`` is written ``(pi[0]|pi[1]|...)``; the minimal I-map
``G_pi`` has an edge ``pi[a] -> pi[b]`` (``a < b``) unless the oracle declares
``pi[a] _||_ pi[b]`` given everything before ``pi[b]``.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Optional, Sequence

import numpy as np

from ._sets import check_bound, members
from .ci import CIStructure
from .graphs import (
    Edge,
    MixedGraph,
    d_separated,
    essential_graph,
    is_topological_order,
    m_separated,
    require_dag,
    topological_order,
)
from .gaussian import gaussian_ci

MAX_EXHAUSTIVE_N = 7


# -- oracles ---------------------------------------------------------------------

class CIOracle:
    """Answers ``i _||_ j | K`` queries (True means independent); answers are cached."""

    backend = "abstract"
    deterministic = True

    def __init__(self, n: int):
        self.n = n
        self._cache: dict[tuple[int, int, int], bool] = {}
        self._imaps: dict[tuple, MixedGraph] = {}

    def query(self, i: int, j: int, K: int) -> bool:
        if i > j:
            i, j = j, i
        key = (i, j, K)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = bool(self._query(i, j, K))
        return hit

    def _query(self, i: int, j: int, K: int) -> bool:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n})"


class DSepOracle(CIOracle):
    backend = "dag-dsep"

    def __init__(self, g: MixedGraph):
        require_dag(g)
        super().__init__(g.n)
        self.graph = g

    def _query(self, i, j, K):
        return d_separated(self.graph, i, j, K)


class MSepOracle(CIOracle):
    backend = "lmg-msep"

    def __init__(self, g: MixedGraph):
        super().__init__(g.n)
        self.graph = g

    def _query(self, i, j, K):
        return m_separated(self.graph, i, j, K)


class GaussianExactOracle(CIOracle):
    backend = "gaussian-exact"

    def __init__(self, sigma):
        super().__init__(len(sigma))
        self.sigma = sigma

    def _query(self, i, j, K):
        return gaussian_ci(self.sigma, i, j, K)


class ExplicitOracle(CIOracle):
    backend = "explicit-list"

    def __init__(self, ci: CIStructure):
        super().__init__(ci.n)
        self.ci = ci

    def _query(self, i, j, K):
        return self.ci.holds(i, j, K)


class FisherZOracle(CIOracle):
    """Partial-correlation test on data (rows are samples).

    Independence is declared when the two-sided Fisher z p-value exceeds
    ``alpha``.  The answers depend on the sample, so this backend is not exact.
    """

    backend = "gaussian-sample"
    deterministic = False

    def __init__(self, data, alpha: float = 0.01):
        x = np.asarray(data, dtype=float)
        if x.ndim != 2 or x.shape[0] < 4:
            raise ValueError("data must be a 2-d array with at least 4 rows")
        if not 0 < alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        super().__init__(x.shape[1])
        self.n_samples = x.shape[0]
        self.alpha = alpha
        self.corr = np.corrcoef(x, rowvar=False)

    def pvalue(self, i: int, j: int, K: int) -> float:
        idx = [i, j] + members(K)
        dof = self.n_samples - len(idx) - 1
        if dof <= 0:
            return 1.0
        prec = np.linalg.pinv(self.corr[np.ix_(idx, idx)])
        r = -prec[0, 1] / math.sqrt(prec[0, 0] * prec[1, 1])
        r = min(max(r, -1 + 1e-12), 1 - 1e-12)
        z = math.sqrt(dof) * math.atanh(r)
        return 2 * (1 - NormalDist().cdf(abs(z)))

    def _query(self, i, j, K):
        return self.pvalue(i, j, K) > self.alpha


def sample_gaussian(sigma, n_samples: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    cov = np.array([[float(x) for x in row] for row in sigma])
    return rng.multivariate_normal(np.zeros(len(cov)), cov, size=n_samples)


# -- minimal I-maps ----------------------------------------------------------------

def _check_perm(pi: Sequence[int], n: int) -> tuple:
    pi = tuple(pi)
    if sorted(pi) != list(range(n)):
        raise ValueError(f"not a permutation of range({n}): {pi}")
    return pi


def minimal_imap(o: CIOracle, pi: Sequence[int]) -> MixedGraph:
    pi = _check_perm(pi, o.n)
    g = o._imaps.get(pi)
    if g is None:
        arcs = []
        prefix = 0
        for b in range(o.n):
            for a in range(b):
                K = prefix & ~(1 << pi[a])
                if not o.query(pi[a], pi[b], K):
                    arcs.append((pi[a], pi[b]))
            prefix |= 1 << pi[b]
        g = o._imaps[pi] = MixedGraph(o.n, tuple(Edge(a, b) for a, b in arcs))
    return g


def covered_edges(g: MixedGraph) -> set[tuple[int, int]]:
    """Edges ``i -> j`` with ``pa(i) = pa(j) - {i}``."""
    require_dag(g)
    return {(a, b) for a, b in g.arcs() if g.parents(a) == g.parents(b) & ~(1 << a)}


def same_vertex(o: CIOracle, pi: Sequence[int], tau: Sequence[int]) -> bool:
    return minimal_imap(o, pi) == minimal_imap(o, tau)


def topological_orders(g: MixedGraph) -> list[tuple]:
    return [p for p in itertools.permutations(range(g.n)) if is_topological_order(g, p)]


def skeleton_subset(g: MixedGraph, h: MixedGraph) -> bool:
    return g.skeleton() <= h.skeleton()


# -- greedy search -----------------------------------------------------------------

@dataclass
class SPResult:
    dag: MixedGraph
    essential: MixedGraph
    pi: tuple
    n_edges: int
    log: list = field(default_factory=list)

    def log_lines(self) -> str:
        return "".join(json.dumps(entry, sort_keys=True) + "\n" for entry in self.log)


def _flip_permutation(pi: tuple, a: int, b: int, g: MixedGraph, rule: str) -> tuple:
    """Order after reversing the covered edge ``a -> b``.

    ``minimal``: move ``b`` to just before ``a``.  ``toposort``: smallest-label
    topological order of the flipped DAG.
    """
    if rule == "minimal":
        rest = [v for v in pi if v != b]
        k = rest.index(a)
        return tuple(rest[:k] + [b] + rest[k:])
    if rule == "toposort":
        edges = [Edge(b, a) if (e.a, e.b) == (a, b) else e for e in g.edges]
        return tuple(topological_order(MixedGraph(g.n, tuple(edges))))
    raise ValueError(f"unknown permutation update {rule!r}")


def _walk(o: CIOracle, pi0: tuple, rng: random.Random, moves, max_steps: int,
          plateau_budget: int, restart: int, log: list) -> tuple:
    pi = pi0
    g = minimal_imap(o, pi)
    cur = g.num_edges()
    log.append({"restart": restart, "step": 0, "move": None, "edges": cur, "accepted": True,
                "pi": [v + 1 for v in pi]})
    stale = 0
    for step in range(1, max_steps + 1):
        if stale >= plateau_budget:
            break
        proposal = moves(pi, g, cur)
        if proposal is None:
            break
        move, new_pi = proposal
        new_g = minimal_imap(o, new_pi)
        ne = new_g.num_edges()
        accepted = ne <= cur
        log.append({"restart": restart, "step": step, "move": [v + 1 for v in move],
                    "edges": ne, "accepted": accepted})
        stale = 0 if ne < cur else stale + 1
        if accepted:
            pi, g, cur = new_pi, new_g, ne
    return pi, g


def _search(o: CIOracle, pi0, moves_factory, max_steps, plateau_budget, seed, restarts) -> SPResult:
    rng = random.Random(seed)
    start = _check_perm(range(o.n) if pi0 is None else pi0, o.n)
    best = None
    log: list = []
    for r in range(max(1, restarts)):
        if r > 0:
            start = tuple(rng.sample(range(o.n), o.n))
        pi, g = _walk(o, start, rng, moves_factory(rng), max_steps, plateau_budget, r, log)
        if best is None or g.num_edges() < best[1].num_edges():
            best = (pi, g)
    pi, g = best
    return SPResult(g, essential_graph(g), pi, g.num_edges(), log)


def greedy_sp_permutohedron(o: CIOracle, pi0: Optional[Sequence[int]] = None, max_steps: int = 1000,
                            plateau_budget: int = 50, seed: int = 0, restarts: int = 1) -> SPResult:
    """Random walk over adjacent transpositions that never increases the edge count.

    Each step picks uniformly among the neighbours whose minimal I-map is at
    least as sparse; the walk stops when there is none, after ``max_steps``, or
    after ``plateau_budget`` consecutive steps without a strict improvement.
    """

    def factory(rng):
        def moves(pi, g, cur):
            options = []
            for k in range(o.n - 1):
                q = pi[:k] + (pi[k + 1], pi[k]) + pi[k + 2:]
                if minimal_imap(o, q).num_edges() <= cur:
                    options.append(((pi[k], pi[k + 1]), q))
            return rng.choice(options) if options else None
        return moves

    return _search(o, pi0, factory, max_steps, plateau_budget, seed, restarts)


def greedy_sp_covered(o: CIOracle, pi0: Optional[Sequence[int]] = None, max_steps: int = 1000,
                      plateau_budget: int = 50, seed: int = 0, restarts: int = 1,
                      perm_update: str = "minimal") -> SPResult:
    """Covered-edge reversals on the current minimal I-map.

    A uniformly chosen covered edge ``a -> b`` is reversed, the order is updated
    (see ``perm_update``) and the new I-map is accepted when it is at least as
    sparse.  Stopping rules match :func:`greedy_sp_permutohedron`; a DAG without
    covered edges also stops the walk.
    """

    def factory(rng):
        def moves(pi, g, cur):
            cov = sorted(covered_edges(g))
            if not cov:
                return None
            a, b = rng.choice(cov)
            return (a, b), _flip_permutation(pi, a, b, g, perm_update)
        return moves

    return _search(o, pi0, factory, max_steps, plateau_budget, seed, restarts)


@dataclass(frozen=True)
class ExhaustiveResult:
    min_edges: int
    essential_graphs: tuple
    permutations: tuple


def exhaustive_sp(o: CIOracle) -> ExhaustiveResult:
    """Minimal I-maps of all permutations; the sparsest ones' essential graphs."""
    check_bound(o.n, MAX_EXHAUSTIVE_N, "exhaustive_sp")
    best = None
    argmin: list = []
    for pi in itertools.permutations(range(o.n)):
        ne = minimal_imap(o, pi).num_edges()
        if best is None or ne < best:
            best, argmin = ne, [pi]
        elif ne == best:
            argmin.append(pi)
    ess = {}
    for pi in argmin:
        e = essential_graph(minimal_imap(o, pi))
        ess.setdefault(e.edges, e)
    return ExhaustiveResult(best, tuple(ess[k] for k in sorted(ess)), tuple(argmin))


def oracle_ci(o: CIOracle) -> CIStructure:
    from .ci import all_triples

    return CIStructure(o.n, frozenset(r for r in all_triples(o.n) if o.query(r.i, r.j, r.cond)))


__all__ = [
    "CIOracle", "DSepOracle", "MSepOracle", "GaussianExactOracle", "ExplicitOracle",
    "FisherZOracle", "sample_gaussian", "minimal_imap", "covered_edges", "same_vertex",
    "topological_orders", "skeleton_subset", "SPResult", "ExhaustiveResult",
    "greedy_sp_permutohedron", "greedy_sp_covered", "exhaustive_sp", "oracle_ci",
]
