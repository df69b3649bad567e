"""Exact rational linear algebra on lists of Fractions.

Matrices here are at most a few dozen rows, so plain Gaussian elimination over
``Fraction`` is fast enough and keeps every answer exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list  # list[list[Fraction]]


def as_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def submatrix(a: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    return [[a[r][c] for c in cols] for r in rows]


def _echelon(a: Matrix) -> tuple[Matrix, int, Fraction]:
    """Row-reduce a copy; returns (matrix, rank, determinant factor)."""
    m = [list(row) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    rank = 0
    det = Fraction(1)
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if m[r][c] != 0), None)
        if piv is None:
            det = Fraction(0)
            continue
        if piv != rank:
            m[rank], m[piv] = m[piv], m[rank]
            det = -det
        p = m[rank][c]
        det *= p
        for r in range(rank + 1, rows):
            f = m[r][c]
            if f:
                f /= p
                row_r, row_p = m[r], m[rank]
                for k in range(c, cols):
                    row_r[k] -= f * row_p[k]
        rank += 1
        if rank == rows:
            break
    return m, rank, det


def rank(a: Matrix) -> int:
    if not a or not a[0]:
        return 0
    return _echelon(as_fraction_matrix(a))[1]


def det(a: Matrix) -> Fraction:
    n = len(a)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in a):
        raise ValueError("determinant needs a square matrix")
    _, r, d = _echelon(as_fraction_matrix(a))
    return d if r == n else Fraction(0)


def inverse(a: Matrix) -> Matrix:
    """Gauss-Jordan inverse; raises ZeroDivisionError when singular."""
    n = len(a)
    m = [list(row) + e for row, e in zip(as_fraction_matrix(a), identity(n))]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        m[c] = [x / p for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def principal_minor(a: Matrix, idx: Sequence[int]) -> Fraction:
    return det(submatrix(a, idx, idx))


def is_symmetric(a: Matrix) -> bool:
    return all(a[i][j] == a[j][i] for i in range(len(a)) for j in range(i))


def is_positive_definite(a: Matrix) -> bool:
    """Sylvester's criterion on leading principal minors."""
    return is_symmetric(a) and all(principal_minor(a, range(k)) > 0 for k in range(1, len(a) + 1))
