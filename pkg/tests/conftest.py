"""Shared fixtures.  Helpers take 1-based node labels, as written by hand."""

import random

import pytest
from hypothesis import settings

from dagassoc.ci import CIRelation, CIStructure
from dagassoc.graphs import MixedGraph, random_dag

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FOUR_NODE_ARCS = [(1, 3), (2, 3), (3, 4)]
# four-node DAG whose gaussoid is the single relation 1 _||_ 3 | 2
NON_SIMPLE_ARCS = [(1, 2), (2, 3), (3, 4), (1, 4), (2, 4)]
EIGHT_NODE_ARCS = [(1, 4), (2, 3), (2, 6), (3, 4), (3, 7), (4, 8), (4, 7), (5, 8), (5, 6), (6, 7), (7, 8)]
VSTRUCT_ARCS = [(1, 3), (2, 3)]


def dag(n, arcs):
    return MixedGraph.one_based(n, arcs)


def S(*nodes):
    """Bitmask of 1-based nodes."""
    m = 0
    for v in nodes:
        m |= 1 << (v - 1)
    return m


def rel(i, j, cond=()):
    return CIRelation(i - 1, j - 1, S(*cond))


def ci(n, *triples):
    return CIStructure(n, frozenset(rel(*t) for t in triples))


def perm(*labels):
    return tuple(v - 1 for v in labels)


def random_dags(count, n_range, p=0.5, seed=0):
    rng = random.Random(seed)
    return [random_dag(rng.choice(n_range), p, rng) for _ in range(count)]


@pytest.fixture
def four():
    return dag(4, FOUR_NODE_ARCS)


@pytest.fixture
def eight():
    return dag(8, EIGHT_NODE_ARCS)


@pytest.fixture
def vstruct():
    return dag(3, VSTRUCT_ARCS)
