import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dagassoc.ci import CIStructure, all_triples, is_semigraphoid, is_mss_monotone
from dagassoc.gaussian import gram, lambda_from_dag, multiinformation
from dagassoc.matroid import enumerate_matroids, msmp_associahedron
from dagassoc.setfunction import (
    LOG,
    NotSubmodularError,
    SetFunction,
    class_poset,
    classes_by_walls,
    dimension,
    dual_flip,
    facet_incidence,
    facet_tight_sets,
    float_incidence_heuristic,
    greedy_vertex,
    h_representation,
    is_submodular,
    is_tight,
    modular,
    permutation_classes,
    permutohedron,
    satisfies_h,
    semigraphoid_of,
    setfunction_from_json,
    setfunction_to_json,
    simplex,
    sum_functions,
    zero,
)
from dagassoc.setfunction import _affine_rank

from conftest import FOUR_NODE_ARCS, NON_SIMPLE_ARCS, S, ci, dag, perm

MATROIDS3 = enumerate_matroids(3)
MATROIDS4 = enumerate_matroids(4)


def uniform_rank_one(n):
    return simplex(n, (1 << n) - 1)


def four_logdet():
    return multiinformation(gram(lambda_from_dag(dag(4, FOUR_NODE_ARCS))))


@st.composite
def submodular_functions(draw, n=None, max_terms=4):
    """Non-negative integer combinations of simplex and matroid rank functions."""
    n = draw(st.integers(2, 4)) if n is None else n
    pool = [simplex(n, I) for I in range(1, 1 << n)]
    if n == 3:
        pool += MATROIDS3
    if n == 4:
        pool += MATROIDS4
    terms = draw(st.lists(st.sampled_from(pool), min_size=1, max_size=max_terms))
    return sum_functions(terms)


# -- construction ----------------------------------------------------------------------------

def test_value_validation():
    with pytest.raises(ValueError):
        SetFunction(2, (1, 0, 0, 0))
    with pytest.raises(ValueError):
        SetFunction(2, (1, 2, 0, 3), LOG)
    with pytest.raises(ValueError):
        SetFunction(2, (0, 1, 1))
    with pytest.raises(ValueError):
        zero(2) + zero(2, LOG)


def test_json_roundtrip():
    w = permutohedron(3)
    assert setfunction_from_json(json.loads(json.dumps(setfunction_to_json(w)))) == w
    m = four_logdet()
    assert setfunction_from_json(setfunction_to_json(m)) == m
    assert setfunction_to_json(m)["values"]["1,2"] == "3"
    with pytest.raises(ValueError):
        setfunction_from_json({"n": 2, "values": {"1": "1"}})


# -- submodularity and semigraphoids ------------------------------------------------------------

def test_is_submodular_examples():
    assert is_submodular(uniform_rank_one(3))
    square = SetFunction.from_callable(3, lambda m: bin(m).count("1") ** 2)
    assert not is_submodular(square)
    assert is_submodular(four_logdet())


def test_semigraphoid_examples():
    assert semigraphoid_of(uniform_rank_one(3)) == ci(3, (1, 2, [3]), (1, 3, [2]), (2, 3, [1]))
    assert semigraphoid_of(modular(4)) == CIStructure(4, frozenset(all_triples(4)))
    with pytest.raises(NotSubmodularError):
        semigraphoid_of(SetFunction.from_callable(3, lambda m: bin(m).count("1") ** 2))


def test_logdet_semigraphoid_after_flip():
    rels = [(1, 2), (1, 4, [3]), (2, 4, [3]), (1, 4, [2, 3]), (2, 4, [1, 3])]
    assert semigraphoid_of(dual_flip(four_logdet())) == ci(4, *rels)


# -- greedy vertices ---------------------------------------------------------------------------------

def test_greedy_vertex_examples():
    assert greedy_vertex(uniform_rank_one(3), perm(1, 2, 3)) == (1, 0, 0)
    assert greedy_vertex(modular(3), perm(2, 3, 1)) == (1, 1, 1)
    w = dual_flip(four_logdet())
    assert greedy_vertex(w, perm(1, 2, 3, 4)) == greedy_vertex(w, perm(2, 1, 3, 4))
    # the concentration-side function sees the dual structure: its polytope is the negative
    k = four_logdet()
    assert greedy_vertex(k, perm(4, 3, 1, 2)) == greedy_vertex(k, perm(4, 3, 2, 1))
    with pytest.raises(ValueError):
        greedy_vertex(w, (0, 0, 1, 2))


@given(submodular_functions())
def test_greedy_vertices_satisfy_h_and_prefixes_are_tight(w):
    for pi in itertools.permutations(range(w.n)):
        x = greedy_vertex(w, pi)
        assert satisfies_h(w, x)
        prefix = 0
        for a in pi:
            prefix |= 1 << a
            assert is_tight(w, x, prefix)


# -- classes and walls ----------------------------------------------------------------------------------

def test_class_counts():
    assert len(permutation_classes(modular(3)).classes) == 1
    assert len(permutation_classes(permutohedron(3)).classes) == 6
    segments = sum_functions(simplex(3, I) for I in (S(1, 2), S(1, 3), S(2, 3)))
    assert len(permutation_classes(segments).classes) == 6
    assert len(permutation_classes(msmp_associahedron(dag(3, [(1, 3), (2, 3)]))).classes) == 5


@given(submodular_functions())
def test_wall_criterion(w):
    s = permutation_classes(w)
    assert s.partition() == classes_by_walls(w.n, semigraphoid_of(w))
    assert s.removed_walls == semigraphoid_of(w)


@given(submodular_functions(n=4), submodular_functions(n=4))
def test_same_fan_iff_same_semigraphoid(w1, w2):
    same_fan = permutation_classes(w1).partition() == permutation_classes(w2).partition()
    assert same_fan == (semigraphoid_of(w1) == semigraphoid_of(w2))


@given(submodular_functions())
def test_induced_structure_is_semigraphoid(w):
    assert is_semigraphoid(semigraphoid_of(w))


@given(st.lists(st.integers(1, 15), min_size=1, max_size=5))
def test_sums_of_simplices_are_mss_monotone(masks):
    w = sum_functions(simplex(4, I) for I in masks)
    assert is_mss_monotone(semigraphoid_of(w))


@given(submodular_functions(n=3), submodular_functions(n=3))
def test_sum_intersects_semigraphoids(w1, w2):
    assert semigraphoid_of(w1 + w2) == semigraphoid_of(w1).intersection(semigraphoid_of(w2))
    assert w1 + zero(3) == w1


def test_class_poset():
    # (3|4|1|2), (3|1|4|2), (3|1|2|4): 3 first, 1 before 2
    cls = [perm(3, 4, 1, 2), perm(3, 1, 4, 2), perm(3, 1, 2, 4)]
    assert class_poset(cls, 4) == {(2, 0), (2, 3), (0, 1)}


# -- H-representation and duality -------------------------------------------------------------------------

def test_h_representation():
    ineqs, eq = h_representation(four_logdet())
    bounds = dict(ineqs)
    assert bounds[S(1, 2)] == 3 and bounds[S(1, 3)] == 3
    assert eq == (S(1, 2, 3, 4), 1)
    ineqs, eq = h_representation(modular(2))
    assert ineqs == [(S(1), 1), (S(2), 1)] and eq == (S(1, 2), 2)


@given(submodular_functions())
def test_dual_flip_involution_and_negated_vertices(w):
    d = dual_flip(w)
    assert dual_flip(d) == w
    assert is_submodular(d)
    for pi in itertools.permutations(range(w.n)):
        x = greedy_vertex(w, pi)
        y = greedy_vertex(d, tuple(reversed(pi)))
        assert y == tuple(-c for c in x)


def test_dual_flip_log_kind_inverts_ratios():
    w = four_logdet()
    d = dual_flip(w)
    for pi in itertools.permutations(range(4)):
        x = greedy_vertex(w, pi)
        y = greedy_vertex(d, tuple(reversed(pi)))
        assert all(a * b == 1 for a, b in zip(x, y))


def test_dual_flip_of_simplex():
    d = dual_flip(uniform_rank_one(3))
    assert [d(S(v)) for v in (1, 2, 3)] == [0, 0, 0]
    assert d(S(1, 2, 3)) == -1


# -- dimension, facets, incidence --------------------------------------------------------------------------------

def test_hexagon():
    inc = facet_incidence(permutohedron(3))
    assert inc.f_vector == (6, 6)
    assert inc.dim == 2 and inc.is_simple


def test_vstructure_polygon():
    inc = facet_incidence(msmp_associahedron(dag(3, [(1, 3), (2, 3)])))
    assert inc.f_vector == (5, 5)
    assert inc.dim == 2 and inc.is_simple


def test_non_simple_associahedron():
    inc = facet_incidence(msmp_associahedron(dag(4, NON_SIMPLE_ARCS)))
    assert inc.dim == 3
    assert not inc.is_simple
    assert sorted(inc.degrees).count(4) == 1
    assert set(inc.degrees) == {3, 4}


def test_log_kind_routes_to_heuristic():
    inc = facet_incidence(four_logdet())
    assert not inc.exact
    assert len(inc.vertices) == 16


def test_heuristic_simple_cases():
    assert float_incidence_heuristic(multiinformation([[1, 0], [0, 1]])).f_vector[0] == 1
    g = dag(3, [(1, 3), (2, 3)])
    assert float_incidence_heuristic(multiinformation(gram(lambda_from_dag(g)))).f_vector[0] == 5


def _facet_masks_by_tight_sets(w):
    verts = sorted({greedy_vertex(w, pi) for pi in itertools.permutations(range(w.n))})
    masks = set()
    for I in facet_tight_sets(w):
        masks.add(sum(1 << k for k, x in enumerate(verts) if is_tight(w, x, I)))
    return verts, masks


def _edges_by_minimal_face(w, verts):
    """u, v adjacent when the smallest face holding both is one-dimensional."""
    tight = [{I for I in range(1, 1 << w.n) if is_tight(w, x, I)} for x in verts]
    deg = [0] * len(verts)
    for u, v in itertools.combinations(range(len(verts)), 2):
        common = tight[u] & tight[v]
        face = [x for k, x in enumerate(verts) if common <= tight[k]]
        if _affine_rank(face) == 1:
            deg[u] += 1
            deg[v] += 1
    return tuple(deg)


@given(submodular_functions(max_terms=3))
def test_incidence_two_routes(w):
    inc = facet_incidence(w)
    verts, masks = _facet_masks_by_tight_sets(w)
    assert list(inc.vertices) == verts
    assert inc.dim == dimension(w)
    got = {sum(inc.matrix[v][f] << v for v in range(len(verts))) for f in range(len(inc.facets))}
    assert got == masks
    assert inc.degrees == _edges_by_minimal_face(w, verts)


def test_point_polytope_has_no_facets():
    inc = facet_incidence(modular(3, [1, 2, Fraction(1, 2)]))
    assert inc.f_vector == (1, 0)
    assert inc.dim == 0
