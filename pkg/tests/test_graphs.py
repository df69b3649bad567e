import itertools
import json
import random
from collections import deque

import pytest
from hypothesis import given, strategies as st

from dagassoc.graphs import (
    BIDIRECTED,
    CANYON,
    DIRECTED,
    TREK,
    UNDIRECTED,
    Edge,
    GraphError,
    MixedGraph,
    all_dags,
    ancestors,
    d_separated,
    decompose,
    essential_graph,
    find_bayes_ball_path,
    graph_from_json,
    graph_to_json,
    is_bayes_ball_path,
    m_separated,
    markov_equivalent,
    moral_graph,
    path_from_nodes,
    random_dag,
    random_lmg,
    separation_ci,
    simplify_path,
    v_structures,
    validate_decomposition,
)

from conftest import FOUR_NODE_ARCS, EIGHT_NODE_ARCS, NON_SIMPLE_ARCS, S, dag, random_dags


def nodes0(*labels):
    return [v - 1 for v in labels]


# -- independent separation oracles ------------------------------------------------------

def _reach_up(g, start):
    out = set(start)
    stack = list(start)
    while stack:
        v = stack.pop()
        for u in range(g.n):
            if g.parents(v) >> u & 1 and u not in out:
                out.add(u)
                stack.append(u)
    return out


def lauritzen_separated(g, i, j, K):
    """Separation in the moral graph of the ancestral closure of {i, j} and K."""
    keep = _reach_up(g, {i, j} | {v for v in range(g.n) if K >> v & 1})
    adj = {v: set() for v in keep}
    for a, b in g.arcs():
        if a in keep and b in keep:
            adj[a].add(b)
            adj[b].add(a)
    for v in keep:
        pa = [u for u in keep if g.parents(v) >> u & 1]
        for a, b in itertools.combinations(pa, 2):
            adj[a].add(b)
            adj[b].add(a)
    seen = {i}
    queue = deque([i])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if K >> w & 1 or w in seen:
                continue
            if w == j:
                return False
            seen.add(w)
            queue.append(w)
    return True


def walk_separated(g, i, j, K):
    """No walk from i to j whose colliders are in K and non-colliders outside K."""
    start = [(e.other(i), e) for e in g.incident(i)]
    seen = set()
    queue = deque(start)
    while queue:
        v, e_in = queue.popleft()
        if v == j:
            return False
        head = e_in.head_at(v)
        key = (v, head, e_in.kind == BIDIRECTED or e_in.kind == DIRECTED and e_in.a == v)
        if key in seen:
            continue
        seen.add(key)
        for e in g.incident(v):
            collider = head and e.head_at(v)
            if collider and not K >> v & 1:
                continue
            if not collider and K >> v & 1:
                continue
            queue.append((e.other(v), e))
    return True


def _queries(n):
    for i, j in itertools.combinations(range(n), 2):
        rest = [v for v in range(n) if v not in (i, j)]
        for r in range(len(rest) + 1):
            for K in itertools.combinations(rest, r):
                yield i, j, sum(1 << v for v in K)


# -- construction --------------------------------------------------------------------------

def test_edge_normalisation_and_errors():
    assert Edge(3, 1, UNDIRECTED) == Edge(1, 3, UNDIRECTED)
    assert Edge(3, 1) != Edge(1, 3)
    with pytest.raises(GraphError):
        Edge(1, 1)
    with pytest.raises(GraphError):
        Edge(0, 1, "dashed")
    with pytest.raises(GraphError):
        MixedGraph(2, (Edge(0, 2),))
    with pytest.raises(GraphError):
        MixedGraph.dag(2, [(0, 1), (1, 0)])


def test_multi_edges_are_kept():
    g = MixedGraph(2, (Edge(0, 1), Edge(0, 1, BIDIRECTED), Edge(0, 1, UNDIRECTED)))
    assert g.num_edges() == 3
    assert not g.is_dag()


def test_json_roundtrip():
    g = MixedGraph(3, (Edge(0, 1), Edge(1, 2, BIDIRECTED), Edge(0, 2, UNDIRECTED)))
    text = json.dumps(graph_to_json(g))
    assert graph_from_json(json.loads(text)) == g
    assert graph_from_json({"n": 2, "edges": [{"a": 1, "b": 2}]}) == dag(2, [(1, 2)])


# -- moral graph, ancestors -------------------------------------------------------------------

def test_moral_graph_marries_parents():
    m = moral_graph(dag(4, FOUR_NODE_ARCS))
    assert m.skeleton() == {frozenset(p) for p in [(0, 1), (0, 2), (1, 2), (2, 3)]}
    assert m.is_undirected()
    assert moral_graph(MixedGraph(3)).num_edges() == 0
    assert moral_graph(dag(2, [(1, 2)])).skeleton() == {frozenset((0, 1))}


def test_ancestors_are_strict():
    chain = dag(3, [(1, 2), (2, 3)])
    assert ancestors(chain, S(3)) == S(1, 2)
    assert ancestors(chain, 0) == 0
    assert ancestors(dag(8, EIGHT_NODE_ARCS), S(7)) == S(1, 2, 3, 4, 5, 6)


# -- separation ---------------------------------------------------------------------------------

def test_dsep_examples(four, eight):
    assert d_separated(four, 0, 1, 0)
    assert not d_separated(four, 0, 1, S(4))
    assert not d_separated(eight, 0, 7, S(4, 7))


def test_msep_examples(vstruct):
    g = MixedGraph.one_based(2, [(1, 2)], BIDIRECTED)
    assert not m_separated(g, 0, 1, 0)
    assert m_separated(vstruct, 0, 1, 0)


def test_separation_queries_validate_input(four):
    with pytest.raises(ValueError):
        d_separated(four, 0, 0, 0)
    with pytest.raises(ValueError):
        d_separated(four, 0, 1, S(1))


def test_dsep_matches_moralisation_exhaustively():
    for n in range(2, 5):
        for g in all_dags(n):
            for i, j, K in _queries(n):
                assert d_separated(g, i, j, K) == lauritzen_separated(g, i, j, K)


def test_dsep_and_msep_agree_on_random_dags():
    rng = random.Random(2)
    for _ in range(200):
        g = random_dag(rng.randint(2, 7), 0.4, rng)
        i, j = rng.sample(range(g.n), 2)
        K = sum(1 << v for v in range(g.n) if v not in (i, j) and rng.random() < 0.4)
        assert d_separated(g, i, j, K) == m_separated(g, i, j, K) == lauritzen_separated(g, i, j, K)


def test_msep_matches_walk_semantics_on_lmgs():
    rng = random.Random(9)
    for k in range(60):
        g = random_lmg(rng.randint(2, 5), 0.4, rng, acyclic=k % 2 == 0)
        for i, j, K in _queries(g.n):
            assert m_separated(g, i, j, K) == walk_separated(g, i, j, K), (g.describe(), i, j, K)


# -- Bayes-ball paths ---------------------------------------------------------------------------

def test_path_examples(four, eight):
    p = path_from_nodes(four, nodes0(1, 3, 4, 3, 2), S(4))
    assert is_bayes_ball_path(four, p)
    assert p.render() == "1 -> 3 -> 4 <- 3 <- 2"
    assert find_bayes_ball_path(four, 0, 1, S(4)) is not None
    assert find_bayes_ball_path(dag(3, [(1, 3), (2, 3)]), 0, 1, 0) is None
    q = path_from_nodes(eight, nodes0(1, 4, 3, 2, 6, 7, 6, 5, 8), S(4, 7))
    assert is_bayes_ball_path(eight, q)
    found = find_bayes_ball_path(eight, 0, 7, S(4, 7))
    assert is_bayes_ball_path(eight, found)
    assert (found.source, found.target, found.given) == (0, 7, S(4, 7))


def test_invalid_path_is_rejected(four):
    p = path_from_nodes(four, nodes0(1, 3, 2), S(4))
    assert not is_bayes_ball_path(four, p)
    with pytest.raises(ValueError):
        simplify_path(four, p)


def test_path_found_iff_connected():
    for n in range(2, 5):
        for g in all_dags(n):
            for i, j, K in _queries(n):
                p = find_bayes_ball_path(g, i, j, K)
                assert (p is None) == d_separated(g, i, j, K)
                if p is not None:
                    assert is_bayes_ball_path(g, p)


# -- simplification ------------------------------------------------------------------------------

def test_simplify_repeated_node(eight):
    p = path_from_nodes(eight, nodes0(1, 4, 8, 7, 4, 3), S(8))
    d = simplify_path(eight, p)
    assert [v + 1 for v in d.path.nodes] == [1, 4, 8, 4, 3]
    assert d.render() == "[1] <4 8> [3]"


def test_simplify_keeps_simple_path(eight):
    p = path_from_nodes(eight, nodes0(1, 4, 3, 2, 6, 7, 6, 5, 8), S(4, 7))
    d = simplify_path(eight, p)
    assert d.path == p
    assert d.treks == [(0,), (2, 1), (4, 7)]
    assert d.canyons == [(3,), (5, 6)]


def test_single_trek_path():
    g = dag(3, [(1, 2), (2, 3)])
    d = simplify_path(g, path_from_nodes(g, [0, 1, 2], 0))
    assert d.blocks == ((TREK, (0, 1, 2)),)


def _check_simplified(g, p, d):
    assert (d.path.source, d.path.target, d.path.given) == (p.source, p.target, p.given)
    assert is_bayes_ball_path(g, d.path)
    validate_decomposition(g, d)
    flat = [v for _, nodes in d.blocks for v in nodes]
    assert sorted(flat) == sorted(set(d.path.nodes))
    for kind, nodes in d.blocks:
        if kind == CANYON:
            k = d.path.nodes.index(nodes[0])
            for e in d.path.edges[k:k + 2 * (len(nodes) - 1)]:
                assert e.kind == DIRECTED
    if g.is_dag():
        kinds = [kind for kind, _ in d.blocks]
        assert all(a != b for a, b in zip(kinds, kinds[1:]))


def test_simplify_all_paths_on_random_dags():
    for g in random_dags(30, range(3, 7), p=0.5, seed=4):
        for i, j, K in _queries(g.n):
            p = find_bayes_ball_path(g, i, j, K)
            if p is not None:
                _check_simplified(g, p, simplify_path(g, p))


def test_simplify_on_random_lmgs():
    rng = random.Random(6)
    for k in range(40):
        g = random_lmg(rng.randint(3, 5), 0.4, rng, acyclic=k % 2 == 0)
        for i, j, K in _queries(g.n):
            p = find_bayes_ball_path(g, i, j, K)
            if p is not None:
                _check_simplified(g, p, simplify_path(g, p))


@given(st.lists(st.integers(0, 5), min_size=2, max_size=9))
def test_decompose_rejects_or_partitions(walk):
    g = MixedGraph.dag(6, [(a, b) for a in range(6) for b in range(a + 1, 6)])
    if any(a == b for a, b in zip(walk, walk[1:])):
        return
    p = path_from_nodes(g, walk, 0)
    try:
        d = decompose(p)
    except ValueError:
        return
    flat = [v for _, nodes in d.blocks for v in nodes]
    assert len(flat) == len(set(flat)) == len(set(walk))


# -- Markov equivalence -----------------------------------------------------------------------------

def test_v_structures():
    assert v_structures(dag(3, [(1, 3), (2, 3)])) == {(0, 1, 2)}
    assert v_structures(dag(3, [(1, 3), (2, 3), (1, 2)])) == set()
    assert v_structures(dag(4, FOUR_NODE_ARCS)) == {(0, 1, 2)}


def test_markov_equivalence_examples():
    assert markov_equivalent(dag(2, [(1, 2)]), dag(2, [(2, 1)]))
    assert not markov_equivalent(dag(3, [(1, 3), (2, 3)]), dag(3, [(3, 1), (3, 2)]))
    g = dag(4, FOUR_NODE_ARCS)
    assert markov_equivalent(g, g)


def test_markov_equivalence_iff_same_ci():
    for n in range(1, 5):
        gs = list(all_dags(n))
        cis = [separation_ci(g) for g in gs]
        for a, b in itertools.combinations(range(len(gs)), 2):
            assert markov_equivalent(gs[a], gs[b]) == (cis[a] == cis[b])


def test_markov_equivalence_random_n6():
    rng = random.Random(8)
    for _ in range(40):
        g = random_dag(6, 0.4, rng)
        arcs = [(b, a) if rng.random() < 0.3 else (a, b) for a, b in g.arcs()]
        try:
            h = MixedGraph.dag(6, arcs)
        except GraphError:
            continue
        assert markov_equivalent(g, h) == (separation_ci(g) == separation_ci(h))


def _brute_essentials(n):
    """Essential graph data of every DAG on n nodes via its equivalence class."""
    gs = list(all_dags(n))
    classes = {}
    for g in gs:
        classes.setdefault(separation_ci(g), []).append(g)
    for members in classes.values():
        directed = set.intersection(*(set(h.arcs()) for h in members))
        for g in members:
            yield g, directed


def test_essential_graph_examples():
    e = essential_graph(dag(2, [(1, 2)]))
    assert e.edges == (Edge(0, 1, UNDIRECTED),)
    e = essential_graph(dag(3, [(1, 3), (2, 3)]))
    assert e.arcs() == {(0, 2), (1, 2)}
    e = essential_graph(dag(4, FOUR_NODE_ARCS))
    assert e.arcs() == {(0, 2), (1, 2), (2, 3)}


def test_essential_graph_matches_brute_force():
    for n in range(1, 5):
        for g, directed in _brute_essentials(n):
            e = essential_graph(g)
            assert e.skeleton() == g.skeleton()
            assert e.arcs() == directed


def test_non_simple_dag_gaussoid(four):
    g = dag(4, NON_SIMPLE_ARCS)
    assert {r.key for r in separation_ci(g)} == {(0, 2, S(2))}


def test_path_found_iff_connected_random_larger():
    rng = random.Random(12)
    for k in range(150):
        if k % 3:
            g = random_dag(rng.randint(5, 8), 0.35, rng)
        else:
            g = random_lmg(rng.randint(3, 6), 0.35, rng, acyclic=k % 2 == 0)
        i, j = rng.sample(range(g.n), 2)
        K = sum(1 << v for v in range(g.n) if v not in (i, j) and rng.random() < 0.4)
        p = find_bayes_ball_path(g, i, j, K)
        assert (p is None) == m_separated(g, i, j, K)
        if p is not None:
            assert is_bayes_ball_path(g, p)
