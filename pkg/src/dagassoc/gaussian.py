"""Exact Gaussian realisations of DAG models.

For a DAG with edge weights ``l_ij`` the matrix ``Lam = I - B`` has
``Lam[i][j] = -l_ij`` on every edge ``i -> j``; ``K = Lam Lam^T`` is the
concentration matrix and ``Sigma = K^-1`` the covariance.  All arithmetic is
over the rationals.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from ._sets import check_bound, members
from .ci import CIStructure, all_triples
from .graphs import MixedGraph, d_separated, require_dag, separation_ci
from .linalg import det, identity, inverse, is_positive_definite, matmul, rank, submatrix, transpose
from .setfunction import LOG, SetFunction

MAX_FAITHFUL_N = 8


class FaithfulnessError(RuntimeError):
    pass


def lambda_from_dag(g: MixedGraph, weights: Optional[Mapping[tuple[int, int], object]] = None) -> list:
    """``I - B`` with ``-weight`` at each edge; unit weights when ``weights`` is None.

    The matrix is indexed by the user's labels; it is triangular after a
    topological relabelling and always has determinant 1.
    """
    require_dag(g)
    lam = identity(g.n)
    for a, b in sorted(g.arcs()):
        w = Fraction(1) if weights is None else Fraction(weights[(a, b)])
        if w == 0:
            raise ValueError(f"edge weight for {a}->{b} must be nonzero")
        lam[a][b] = -w
    return lam


def gram(lam: Sequence[Sequence]) -> list:
    lam = [[Fraction(x) for x in row] for row in lam]
    return matmul(lam, transpose(lam))


def covariance(g: MixedGraph, weights=None) -> list:
    return inverse(gram(lambda_from_dag(g, weights)))


def gaussian_ci(sigma: Sequence[Sequence], i: int, j: int, K: int) -> bool:
    """``i _||_ j | K`` iff ``rank(Sigma[Ki, Kj]) <= |K|``."""
    if i == j or K >> i & 1 or K >> j & 1:
        raise ValueError("need distinct i, j outside K")
    cond = members(K)
    return rank(submatrix(sigma, cond + [i], cond + [j])) <= len(cond)


def gaussian_ci_structure(sigma: Sequence[Sequence]) -> CIStructure:
    n = len(sigma)
    return CIStructure(n, frozenset(r for r in all_triples(n) if gaussian_ci(sigma, r.i, r.j, r.cond)))


def _logdet_function(mat: Sequence[Sequence]) -> SetFunction:
    n = len(mat)
    vals = []
    for m in range(1 << n):
        idx = members(m)
        d = det(submatrix(mat, idx, idx)) if idx else Fraction(1)
        if d <= 0:
            raise ValueError("matrix is not positive definite (non-positive principal minor)")
        vals.append(d)
    return SetFunction(n, tuple(vals), LOG)


def multiinformation(kmat: Sequence[Sequence]) -> SetFunction:
    """Log-kind function ``A -> log det K[A, A]`` of a concentration matrix.

    Its polytope is the negative of the covariance-side one; ``dual_flip``
    of it equals :func:`gaussian_setfunction` of ``K^-1``.
    """
    return _logdet_function(kmat)


def gaussian_setfunction(sigma: Sequence[Sequence]) -> SetFunction:
    """Log-kind function ``A -> log det Sigma[A, A]``, whose semigraphoid is the
    Gaussian CI structure of ``Sigma``."""
    return _logdet_function(sigma)


@dataclass(frozen=True)
class FaithfulGaussian:
    sigma: tuple
    kmat: tuple
    weights: dict
    ci: CIStructure
    attempts: int


def faithful_gaussian(g: MixedGraph, seed: int = 0, max_tries: int = 20,
                      unit_first: bool = False) -> FaithfulGaussian:
    """Covariance whose Gaussian CI structure equals the d-separation structure.

    The first attempt uses unit weights (when ``unit_first``); later attempts draw
    nonzero integers from ``[-w, w]`` with ``w`` doubling each time.
    """
    require_dag(g)
    check_bound(g.n, MAX_FAITHFUL_N, "faithful_gaussian")
    target = separation_ci(g)
    rng = random.Random(seed)
    arcs = sorted(g.arcs())
    width = 2
    last_bad: list = []
    for attempt in range(1, max_tries + 1):
        if attempt == 1 and unit_first:
            weights = {e: 1 for e in arcs}
        else:
            weights = {e: rng.choice([x for x in range(-width, width + 1) if x]) for e in arcs}
            width *= 2
        kmat = gram(lambda_from_dag(g, weights))
        sigma = inverse(kmat)
        ci = gaussian_ci_structure(sigma)
        if ci.relations == target.relations:
            assert is_positive_definite(kmat)
            return FaithfulGaussian(tuple(map(tuple, sigma)), tuple(map(tuple, kmat)), weights, ci, attempt)
        last_bad = sorted(ci.relations ^ target.relations)
    raise FaithfulnessError(
        f"no faithful weights after {max_tries} tries; mismatched: {', '.join(map(str, last_bad[:5]))}")


def check_faithful(g: MixedGraph, sigma) -> bool:
    return all(gaussian_ci(sigma, r.i, r.j, r.cond) == d_separated(g, r.i, r.j, r.cond)
               for r in all_triples(g.n))


def matrix_to_json(mat: Sequence[Sequence]) -> list:
    return [[str(Fraction(x)) for x in row] for row in mat]


def matrix_from_json(obj) -> list:
    try:
        mat = [[Fraction(x) for x in row] for row in obj]
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if not mat or any(len(row) != len(mat) for row in mat):
        raise ValueError("matrix must be square and non-empty")
    return mat


__all__ = [
    "FaithfulGaussian", "FaithfulnessError", "lambda_from_dag", "gram", "covariance",
    "gaussian_ci", "gaussian_ci_structure", "multiinformation", "gaussian_setfunction",
    "faithful_gaussian", "check_faithful", "matrix_to_json", "matrix_from_json",
]
