"""Mixed graphs, separation oracles, Bayes-ball paths and their trek/canyon structure.

Nodes are ``0..n-1``.  A DAG is a :class:`MixedGraph` whose edges are all
directed and acyclic; an undirected graph has only undirected edges.  Node sets
passed to the oracles are bitmasks.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from ._sets import check_n, members

DIRECTED = "directed"
UNDIRECTED = "undirected"
BIDIRECTED = "bidirected"
KINDS = (DIRECTED, UNDIRECTED, BIDIRECTED)


class GraphError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Edge:
    """An edge ``a -> b``, ``a -- b`` or ``a <-> b``.

    Symmetric kinds are stored with ``a < b``.
    """

    a: int
    b: int
    kind: str = DIRECTED

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GraphError(f"unknown edge kind {self.kind!r}")
        if self.a == self.b:
            raise GraphError(f"loop at node {self.a}")
        if self.kind != DIRECTED and self.a > self.b:
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    def other(self, v: int) -> int:
        return self.b if v == self.a else self.a

    def head_at(self, v: int) -> bool:
        """Whether the edge has an arrowhead at endpoint ``v``."""
        if self.kind == BIDIRECTED:
            return True
        if self.kind == UNDIRECTED:
            return False
        return v == self.b

    def points_to(self, v: int) -> bool:
        """True for a directed edge whose head is ``v``."""
        return self.kind == DIRECTED and self.b == v

    def symbol(self, u: int) -> str:
        """Drawing of the edge when traversed from ``u``."""
        if self.kind == UNDIRECTED:
            return "--"
        if self.kind == BIDIRECTED:
            return "<->"
        return "->" if self.a == u else "<-"


@dataclass(frozen=True)
class MixedGraph:
    """Node set ``range(n)`` with a multiset of edges."""

    n: int
    edges: tuple = ()

    def __post_init__(self):
        check_n(self.n)
        edges = tuple(sorted(self.edges))
        for e in edges:
            if not isinstance(e, Edge):
                raise TypeError(f"expected Edge, got {type(e).__name__}")
            if max(e.a, e.b) >= self.n or min(e.a, e.b) < 0:
                raise GraphError(f"edge {e} out of range for n={self.n}")
        object.__setattr__(self, "edges", edges)
        inc: list[list] = [[] for _ in range(self.n)]
        for e in edges:
            inc[e.a].append(e)
            inc[e.b].append(e)
        object.__setattr__(self, "_incident", tuple(tuple(x) for x in inc))

    # -- construction -------------------------------------------------
    @classmethod
    def dag(cls, n: int, arcs: Iterable[tuple[int, int]]) -> "MixedGraph":
        g = cls(n, tuple(Edge(a, b, DIRECTED) for a, b in arcs))
        if not g.is_dag():
            raise GraphError("directed edges contain a cycle")
        return g

    @classmethod
    def undirected(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "MixedGraph":
        return cls(n, tuple(Edge(a, b, UNDIRECTED) for a, b in pairs))

    @classmethod
    def one_based(cls, n: int, arcs: Iterable[tuple], kind: str = DIRECTED) -> "MixedGraph":
        """Convenience for graphs written with nodes ``1..n``."""
        return cls(n, tuple(Edge(a - 1, b - 1, kind) for a, b in arcs))

    # -- queries -------------------------------------------------------
    def incident(self, v: int) -> tuple:
        return self._incident[v]

    def is_dag(self) -> bool:
        return all(e.kind == DIRECTED for e in self.edges) and self._acyclic()

    def is_undirected(self) -> bool:
        return all(e.kind == UNDIRECTED for e in self.edges)

    def _acyclic(self) -> bool:
        return topological_order(self, strict=False) is not None

    def arcs(self) -> set[tuple[int, int]]:
        return {(e.a, e.b) for e in self.edges if e.kind == DIRECTED}

    def parents(self, v: int) -> int:
        m = 0
        for e in self._incident[v]:
            if e.kind == DIRECTED and e.b == v:
                m |= 1 << e.a
        return m

    def children(self, v: int) -> int:
        m = 0
        for e in self._incident[v]:
            if e.kind == DIRECTED and e.a == v:
                m |= 1 << e.b
        return m

    def skeleton(self) -> frozenset:
        return frozenset(frozenset((e.a, e.b)) for e in self.edges)

    def adjacent(self, u: int, v: int) -> bool:
        return any(e.other(u) == v for e in self._incident[u])

    def num_edges(self) -> int:
        return len(self.edges)

    def describe(self, one_based: bool = True) -> str:
        off = 1 if one_based else 0
        parts = []
        for e in self.edges:
            parts.append(f"{e.a + off}{e.symbol(e.a)}{e.b + off}")
        return ", ".join(parts) if parts else "(no edges)"

    def __str__(self) -> str:
        return f"MixedGraph(n={self.n}: {self.describe()})"


def require_dag(g: MixedGraph) -> None:
    if not g.is_dag():
        raise GraphError("a DAG is required (directed edges only, no cycles)")


def topological_order(g: MixedGraph, strict: bool = True) -> Optional[list[int]]:
    """Kahn's algorithm on the directed edges, smallest label first.

    Returns None on a directed cycle (or raises when ``strict``).
    """
    indeg = [0] * g.n
    for a, b in ((e.a, e.b) for e in g.edges if e.kind == DIRECTED):
        indeg[b] += 1
    ready = [v for v in range(g.n) if indeg[v] == 0]
    order = []
    while ready:
        ready.sort()
        v = ready.pop(0)
        order.append(v)
        for w in members(g.children(v)):
            # multiset edges: count every parallel arc
            for e in g.incident(v):
                if e.kind == DIRECTED and e.a == v and e.b == w:
                    indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    if len(order) != g.n:
        if strict:
            raise GraphError("graph has a directed cycle")
        return None
    return order


def is_topological_order(g: MixedGraph, pi: Sequence[int]) -> bool:
    pos = {v: k for k, v in enumerate(pi)}
    return all(pos[a] < pos[b] for a, b in g.arcs())


def moral_graph(g: MixedGraph) -> MixedGraph:
    """Skeleton plus an undirected edge between every pair of co-parents."""
    require_dag(g)
    pairs = {tuple(sorted((e.a, e.b))) for e in g.edges}
    for v in range(g.n):
        for a, b in itertools.combinations(members(g.parents(v)), 2):
            pairs.add((a, b))
    return MixedGraph.undirected(g.n, sorted(pairs))


def ancestors(g: MixedGraph, K: int) -> int:
    """Nodes with a directed path of positive length into ``K``.

    Members of ``K`` are included only when they are ancestors of some node of
    ``K`` themselves.
    """
    out = 0
    stack = members(K)
    while stack:
        v = stack.pop()
        for e in g.incident(v):
            if e.kind == DIRECTED and e.b == v and not out >> e.a & 1:
                out |= 1 << e.a
                stack.append(e.a)
    return out


def descendants(g: MixedGraph, v: int) -> int:
    out = 0
    stack = [v]
    while stack:
        u = stack.pop()
        for e in g.incident(u):
            if e.kind == DIRECTED and e.a == u and not out >> e.b & 1:
                out |= 1 << e.b
                stack.append(e.b)
    return out


def _check_query(g: MixedGraph, i: int, j: int, K: int) -> None:
    if i == j:
        raise ValueError("separation query needs distinct endpoints")
    if not (0 <= i < g.n and 0 <= j < g.n) or K >> g.n:
        raise ValueError("query out of range")
    if K >> i & 1 or K >> j & 1:
        raise ValueError("endpoints must not be in the conditioning set")


# -- separation oracles -----------------------------------------------------

def _bayes_ball_states(g: MixedGraph, i: int, K: int):
    """BFS over (node, arrived-with-arrowhead) states; colliders must lie in K.

    Yields the predecessor map; this is walk semantics, which for DAGs is
    equivalent to d-separation.
    """
    start = (i, None)
    pred = {start: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        v, arrow_in = state
        for e in g.incident(v):
            if arrow_in is not None:
                collider = arrow_in and e.head_at(v)
                if collider != bool(K >> v & 1):
                    continue
            w = e.other(v)
            nxt = (w, e.head_at(w))
            if nxt not in pred:
                pred[nxt] = (state, e)
                queue.append(nxt)
    return pred


def d_separated(g: MixedGraph, i: int, j: int, K: int) -> bool:
    """Whether ``K`` d-separates ``i`` and ``j`` in the DAG ``g`` (Bayes-ball)."""
    require_dag(g)
    _check_query(g, i, j, K)
    pred = _bayes_ball_states(g, i, K)
    return not ((j, True) in pred or (j, False) in pred)


def _m_connecting_path(g: MixedGraph, i: int, j: int, K: int) -> Optional[tuple[list, list]]:
    """DFS for a path without repeated nodes whose colliders lie in K or an(K)
    and whose non-colliders avoid K."""
    ok_collider = K | ancestors(g, K)
    nodes = [i]
    edges: list[Edge] = []

    def extend(v: int, e_in: Optional[Edge], used: int) -> bool:
        for e in g.incident(v):
            w = e.other(v)
            if used >> w & 1:
                continue
            if e_in is not None:
                if e_in.head_at(v) and e.head_at(v):
                    if not ok_collider >> v & 1:
                        continue
                elif K >> v & 1:
                    continue
            nodes.append(w)
            edges.append(e)
            if w == j or extend(w, e, used | 1 << w):
                return True
            nodes.pop()
            edges.pop()
        return False

    if extend(i, None, 1 << i):
        return nodes, edges
    return None


def m_separated(g: MixedGraph, i: int, j: int, K: int) -> bool:
    """m-separation in a loopless mixed graph.

    Connection requires a path with distinct nodes whose colliders lie in
    ``K`` or its ancestors and whose other internal nodes lie outside ``K``.
    A node is a collider when both incident path edges have an arrowhead at it.
    """
    _check_query(g, i, j, K)
    return _m_connecting_path(g, i, j, K) is None


def separated(g: MixedGraph, i: int, j: int, K: int) -> bool:
    """d-separation for DAGs, m-separation otherwise."""
    if g.is_dag():
        return d_separated(g, i, j, K)
    return m_separated(g, i, j, K)


def separation_ci(g: MixedGraph):
    """The CIStructure of all elementary separation statements of ``g``."""
    from .ci import CIStructure, all_triples

    oracle = d_separated if g.is_dag() else m_separated
    rels = frozenset(r for r in all_triples(g.n) if oracle(g, r.i, r.j, r.cond))
    return CIStructure(g.n, rels)


# -- Bayes-ball paths ---------------------------------------------------------

@dataclass(frozen=True)
class BayesBallPath:
    """A walk ``nodes[0] .. nodes[-1]`` with ``edges[k]`` joining ``nodes[k]`` and ``nodes[k+1]``."""

    nodes: tuple
    edges: tuple
    given: int

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(self.nodes) != len(self.edges) + 1:
            raise ValueError("a path needs one more node than edges")
        for k, e in enumerate(self.edges):
            if {e.a, e.b} != {self.nodes[k], self.nodes[k + 1]}:
                raise ValueError(f"edge {e} does not join {self.nodes[k]} and {self.nodes[k + 1]}")

    @property
    def source(self) -> int:
        return self.nodes[0]

    @property
    def target(self) -> int:
        return self.nodes[-1]

    def is_collider(self, k: int) -> bool:
        if k == 0 or k == len(self.nodes) - 1:
            return False
        v = self.nodes[k]
        return self.edges[k - 1].head_at(v) and self.edges[k].head_at(v)

    def render(self, one_based: bool = True) -> str:
        off = 1 if one_based else 0
        out = [str(self.nodes[0] + off)]
        for k, e in enumerate(self.edges):
            out.append(e.symbol(self.nodes[k]))
            out.append(str(self.nodes[k + 1] + off))
        return " ".join(out)


def path_from_nodes(g: MixedGraph, nodes: Sequence[int], given: int) -> BayesBallPath:
    """Attach edges of ``g`` to a node sequence.

    When several edges join a pair, a directed one is preferred, then the first
    in sorted order.
    """
    edges = []
    for u, v in zip(nodes, nodes[1:]):
        cands = [e for e in g.incident(u) if e.other(u) == v]
        if not cands:
            raise GraphError(f"nodes {u} and {v} are not adjacent")
        cands.sort(key=lambda e: (e.kind != DIRECTED, e))
        edges.append(cands[0])
    return BayesBallPath(tuple(nodes), tuple(edges), given)


def _semantics(g: MixedGraph) -> str:
    return "dag" if g.is_dag() else "lmg"


def validate_path(g: MixedGraph, p: BayesBallPath) -> None:
    """Raise ValueError unless ``p`` is a Bayes-ball path of ``g`` given ``p.given``.

    For DAGs colliders must be in the conditioning set; for mixed graphs they may
    also be ancestors of it.
    """
    K = p.given
    edge_set = set(g.edges)
    for e in p.edges:
        if e not in edge_set:
            raise ValueError(f"edge {e} is not in the graph")
    if K >> p.source & 1 or K >> p.target & 1:
        raise ValueError("endpoints must lie outside the conditioning set")
    ok_collider = K if _semantics(g) == "dag" else K | ancestors(g, K)
    for k in range(1, len(p.nodes) - 1):
        v = p.nodes[k]
        if p.is_collider(k):
            if not ok_collider >> v & 1:
                raise ValueError(f"collider {v} at position {k} is not allowed given the conditioning set")
        elif K >> v & 1:
            raise ValueError(f"non-collider {v} at position {k} is in the conditioning set")


def is_bayes_ball_path(g: MixedGraph, p: BayesBallPath) -> bool:
    try:
        validate_path(g, p)
    except ValueError:
        return False
    return True


def _descent_to(g: MixedGraph, v: int, K: int, allowed: Optional[set] = None) -> Optional[list[Edge]]:
    """Shortest directed path from ``v`` to a node of ``K``, as a list of edges."""
    if K >> v & 1:
        return []
    pred: dict[int, Optional[Edge]] = {v: None}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for e in g.incident(u):
            if e.kind != DIRECTED or e.a != u or e.b in pred:
                continue
            if allowed is not None and e not in allowed:
                continue
            pred[e.b] = e
            if K >> e.b & 1:
                out = []
                w = e.b
                while pred[w] is not None:
                    out.append(pred[w])
                    w = pred[w].a
                return out[::-1]
            queue.append(e.b)
    return None


def find_bayes_ball_path(g: MixedGraph, i: int, j: int, K: int) -> Optional[BayesBallPath]:
    """Some Bayes-ball path from ``i`` to ``j`` given ``K``, or None if separated.

    Every collider of the returned walk lies in ``K``: detours from a collider
    down to ``K`` and back are written out explicitly.
    """
    _check_query(g, i, j, K)
    if g.is_dag():
        pred = _bayes_ball_states(g, i, K)
        end = next((s for s in pred if s[0] == j), None)
        if end is None:
            return None
        nodes, edges = [], []
        state = end
        while pred[state] is not None:
            prev, e = pred[state]
            nodes.append(state[0])
            edges.append(e)
            state = prev
        nodes.append(i)
        return BayesBallPath(tuple(nodes[::-1]), tuple(edges[::-1]), K)

    found = _m_connecting_path(g, i, j, K)
    if found is None:
        return None
    nodes, edges = found
    out_nodes, out_edges = [nodes[0]], []
    for k in range(1, len(nodes)):
        v = nodes[k - 1]
        if k - 1 > 0 and edges[k - 2].head_at(v) and edges[k - 1].head_at(v) and not K >> v & 1:
            down = _descent_to(g, v, K)
            assert down is not None, "collider outside an(K)"
            for e in down:
                out_edges.append(e)
                out_nodes.append(e.b)
            for e in reversed(down):
                out_edges.append(e)
                out_nodes.append(e.a)
        out_edges.append(edges[k - 1])
        out_nodes.append(nodes[k])
    return BayesBallPath(tuple(out_nodes), tuple(out_edges), K)


# -- treks and canyons -----------------------------------------------------

TREK = "trek"
CANYON = "canyon"


@dataclass(frozen=True)
class TrekCanyonDecomposition:
    """Blocks of a simple Bayes-ball path, alternating treks and canyons.

    Each block is ``(kind, nodes)``; canyon nodes run from the top down to the
    collider at the bottom.
    """

    blocks: tuple
    path: BayesBallPath

    @property
    def treks(self) -> list[tuple]:
        return [nodes for kind, nodes in self.blocks if kind == TREK]

    @property
    def canyons(self) -> list[tuple]:
        return [nodes for kind, nodes in self.blocks if kind == CANYON]

    def groups(self) -> list[list[tuple]]:
        """Runs ``t_k, c_k1, ..., c_km, t_{k+1}`` between consecutive treks."""
        out, cur = [], None
        for kind, nodes in self.blocks:
            if kind == TREK:
                if cur is not None:
                    cur.append(nodes)
                    out.append(cur)
                cur = [nodes]
            else:
                cur.append(nodes)
        return out

    def render(self, one_based: bool = True) -> str:
        off = 1 if one_based else 0
        parts = []
        for kind, nodes in self.blocks:
            txt = " ".join(str(v + off) for v in nodes)
            parts.append(f"[{txt}]" if kind == TREK else f"<{txt}>")
        return " ".join(parts)


def decompose(p: BayesBallPath) -> TrekCanyonDecomposition:
    """Split a path into maximal canyons around its colliders and treks between them.

    Raises ValueError when the path is not simple.
    """
    nodes, edges = p.nodes, p.edges
    last = len(nodes) - 1
    spans = []
    for k in range(1, last):
        if not p.is_collider(k):
            continue
        r = 0
        while (k - r - 1 >= 0 and k + r + 1 <= last
               and nodes[k - r - 1] == nodes[k + r + 1]
               and edges[k - r - 1].points_to(nodes[k - r])
               and edges[k + r].points_to(nodes[k + r])):
            r += 1
        spans.append((k - r, k, k + r))
    blocks = []
    pos = 0
    for lo, mid, hi in spans:
        if lo < pos or lo == 0 or hi == last:
            raise ValueError("canyons overlap or touch an endpoint; path is not simple")
        if lo > pos:
            blocks.append((TREK, tuple(nodes[pos:lo])))
        elif blocks and blocks[-1][0] == CANYON:
            pass
        blocks.append((CANYON, tuple(nodes[lo:mid + 1])))
        pos = hi + 1
    blocks.append((TREK, tuple(nodes[pos:])))
    seen: set[int] = set()
    for kind, bnodes in blocks:
        if len(set(bnodes)) != len(bnodes) or seen & set(bnodes):
            raise ValueError("a node repeats outside its own canyon; path is not simple")
        seen |= set(bnodes)
    return TrekCanyonDecomposition(tuple(blocks), p)


def validate_decomposition(g: MixedGraph, d: TrekCanyonDecomposition) -> None:
    """Check the structural conditions the matroid construction relies on."""
    p = d.path
    validate_path(g, p)
    blocks = d.blocks
    if blocks[0][0] != TREK or blocks[-1][0] != TREK:
        raise ValueError("decomposition must start and end with a trek")
    dag = _semantics(g) == "dag"
    for a, b in zip(blocks, blocks[1:]):
        if a[0] == TREK and b[0] == TREK:
            raise ValueError("two treks without a canyon between them")
        if dag and a[0] == CANYON and b[0] == CANYON:
            raise ValueError("consecutive canyons in a DAG path")
    # locate the edges joining consecutive blocks
    idx = 0
    for (ka, na), (kb, nb) in zip(blocks, blocks[1:]):
        idx += len(na) if ka == TREK else 2 * len(na) - 1
        e = p.edges[idx - 1]
        top_b = nb[0]
        if kb == CANYON and not e.head_at(top_b):
            raise ValueError(f"edge into canyon at {top_b} has no arrowhead there")
        if ka == CANYON and not e.head_at(na[0]):
            raise ValueError(f"edge out of canyon at {na[0]} has no arrowhead there")
        if ka == CANYON and kb == CANYON and e.kind != BIDIRECTED:
            raise ValueError("consecutive canyons must be joined by a bidirected edge")


def is_simple(p: BayesBallPath) -> bool:
    try:
        decompose(p)
    except ValueError:
        return False
    return True


def _search_simple(g: MixedGraph, i: int, j: int, K: int,
                   allowed: Optional[set]) -> Optional[BayesBallPath]:
    """Shortest simple Bayes-ball path with explicit, node-disjoint canyons.

    Iterative deepening on walk length; ``allowed`` restricts the usable edge
    instances.  Collider tops outside ``K`` descend along directed edges to a
    node of ``K``.
    """
    def usable(e: Edge) -> bool:
        return allowed is None or e in allowed

    def descents(v: int, used: int, budget: int) -> Iterator[list[Edge]]:
        # simple directed paths v -> ... -> k in K, internal nodes outside K
        stack = [(v, [], used)]
        while stack:
            u, path, u_used = stack.pop()
            if 2 * len(path) > budget:
                continue
            if path and K >> u & 1:
                yield path
                continue
            for e in reversed(g.incident(u)):
                if e.kind == DIRECTED and e.a == u and usable(e) and not u_used >> e.b & 1:
                    stack.append((e.b, path + [e], u_used | 1 << e.b))

    def step(v: int, e_in: Optional[Edge], used: int, budget: int,
             nodes: tuple, edges: tuple) -> Optional[tuple]:
        for e in g.incident(v):
            if not usable(e):
                continue
            w = e.other(v)
            if used >> w & 1 or budget < 1:
                continue
            options: list[list[Edge]]
            if e_in is None:
                options = [[]]
            elif e_in.head_at(v) and e.head_at(v):
                if K >> v & 1:
                    options = [[]]
                else:
                    # the canyon must reach the conditioning set, otherwise the
                    # path matroid does not certify the dependence
                    options = list(descents(v, used | 1 << w | 1 << j, budget - 1))
            else:
                if K >> v & 1:
                    continue
                options = [[]]
            for down in options:
                cost = 1 + 2 * len(down)
                if cost > budget:
                    continue
                d_used = used
                d_nodes, d_edges = nodes, edges
                for de in down:
                    d_used |= 1 << de.b
                    d_nodes += (de.b,)
                    d_edges += (de,)
                for de in reversed(down):
                    d_nodes += (de.a,)
                    d_edges += (de,)
                if w == j:
                    return d_nodes + (w,), d_edges + (e,)
                found = step(w, e, d_used | 1 << w, budget - cost, d_nodes + (w,), d_edges + (e,))
                if found:
                    return found
        return None

    limit = 2 * g.n + 1
    for budget in range(1, limit + 1):
        found = step(i, None, 1 << i, budget, (i,), ())
        if found:
            return BayesBallPath(found[0], found[1], K)
    return None


def simplify_path(g: MixedGraph, p: BayesBallPath) -> TrekCanyonDecomposition:
    """A simple Bayes-ball path between the same endpoints given the same set.

    The result uses only edges of ``p`` whenever that is possible, and is the
    shortest such walk; the decomposition satisfies the alternation conditions
    needed by the path matroid.
    """
    validate_path(g, p)
    if is_simple(p):
        d = decompose(p)
        try:
            validate_decomposition(g, d)
            return d
        except ValueError:
            pass
    found = _search_simple(g, p.source, p.target, p.given, set(p.edges))
    if found is None:
        found = _search_simple(g, p.source, p.target, p.given, None)
    if found is None:
        raise GraphError("no simple Bayes-ball path exists")
    d = decompose(found)
    validate_decomposition(g, d)
    return d


# -- Markov equivalence -------------------------------------------------------

def v_structures(g: MixedGraph) -> set[tuple[int, int, int]]:
    require_dag(g)
    out = set()
    for k in range(g.n):
        for a, b in itertools.combinations(members(g.parents(k)), 2):
            if not g.adjacent(a, b):
                out.add((a, b, k))
    return out


def markov_equivalent(g1: MixedGraph, g2: MixedGraph) -> bool:
    if g1.n != g2.n:
        raise ValueError("graphs have different node counts")
    return g1.skeleton() == g2.skeleton() and v_structures(g1) == v_structures(g2)


def essential_graph(g: MixedGraph) -> MixedGraph:
    """Essential graph (CPDAG): V-structures plus Meek's orientation rules."""
    require_dag(g)
    n = g.n
    adj = [[False] * n for _ in range(n)]
    for e in g.edges:
        adj[e.a][e.b] = adj[e.b][e.a] = True
    directed = set()
    for a, b, k in v_structures(g):
        directed.add((a, k))
        directed.add((b, k))
    undirected = {frozenset((e.a, e.b)) for e in g.edges} - {frozenset(d) for d in directed}

    def und(a, b):
        return frozenset((a, b)) in undirected

    def orient(a, b):
        undirected.discard(frozenset((a, b)))
        directed.add((a, b))

    changed = True
    while changed:
        changed = False
        for pair in sorted(undirected, key=sorted):
            if pair not in undirected:
                continue
            x, y = sorted(pair)
            for a, b in ((x, y), (y, x)):
                if _meek_orients(a, b, n, adj, directed, und):
                    orient(a, b)
                    changed = True
                    break
    edges = [Edge(a, b, DIRECTED) for a, b in directed]
    edges += [Edge(*sorted(p), UNDIRECTED) for p in undirected]
    return MixedGraph(n, tuple(edges))


def _meek_orients(a, b, n, adj, directed, und) -> bool:
    """Whether one of Meek's rules R1-R4 forces the undirected edge a--b to a->b."""
    for c in range(n):
        # R1: c -> a -- b with c, b non-adjacent
        if (c, a) in directed and not adj[c][b] and c != b:
            return True
        # R2: a -> c -> b
        if (a, c) in directed and (c, b) in directed:
            return True
    # R3: a -- c -> b and a -- d -> b, c and d non-adjacent
    cs = [c for c in range(n) if und(a, c) and (c, b) in directed]
    for c, d in itertools.combinations(cs, 2):
        if not adj[c][d]:
            return True
    # R4: a -- c -> d -> b with c, b non-adjacent and a adjacent to d
    for c in range(n):
        if not und(a, c) or adj[c][b]:
            continue
        for d in range(n):
            if (c, d) in directed and (d, b) in directed and adj[a][d]:
                return True
    return False


# -- enumeration and sampling ---------------------------------------------------

def all_dags(n: int) -> Iterator[MixedGraph]:
    """Every labelled DAG on ``n`` nodes."""
    pairs = list(itertools.permutations(range(n), 2))
    for bits in range(1 << len(pairs)):
        arcs = [pairs[k] for k in range(len(pairs)) if bits >> k & 1]
        if any((b, a) in arcs for a, b in arcs):
            continue
        g = MixedGraph(n, tuple(Edge(a, b) for a, b in arcs))
        if g._acyclic():
            yield g


def random_dag(n: int, p: float, rng: random.Random) -> MixedGraph:
    """Erdos-Renyi DAG on a random node order."""
    order = list(range(n))
    rng.shuffle(order)
    arcs = [(order[a], order[b]) for a in range(n) for b in range(a + 1, n) if rng.random() < p]
    return MixedGraph.dag(n, arcs)


def random_lmg(n: int, p: float, rng: random.Random, acyclic: bool = True) -> MixedGraph:
    """Random loopless mixed graph; each pair independently draws each edge kind."""
    order = list(range(n))
    rng.shuffle(order)
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            u, v = order[a], order[b]
            if rng.random() < p:
                edges.append(Edge(u, v, DIRECTED))
            if not acyclic and rng.random() < p / 3:
                edges.append(Edge(v, u, DIRECTED))
            if rng.random() < p / 2:
                edges.append(Edge(u, v, BIDIRECTED))
            if rng.random() < p / 2:
                edges.append(Edge(u, v, UNDIRECTED))
    return MixedGraph(n, tuple(edges))


# -- JSON ----------------------------------------------------------------------

def graph_to_json(g: MixedGraph) -> dict:
    return {"n": g.n, "edges": [{"a": e.a + 1, "b": e.b + 1, "kind": e.kind} for e in g.edges]}


def graph_from_json(obj: dict) -> MixedGraph:
    try:
        n = int(obj["n"])
        edges = tuple(Edge(int(d["a"]) - 1, int(d["b"]) - 1, d.get("kind", DIRECTED))
                      for d in obj["edges"])
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph JSON: {exc}") from exc
    return MixedGraph(n, edges)
