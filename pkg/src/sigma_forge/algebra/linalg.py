"""Exact linear algebra over the rationals.

Rank and nullspace go through fraction-free sparse elimination in
``sigma_forge.kernels``: every row is scaled to a primitive integer row and
pivots are chosen deterministically (smallest column, input row order).
Matrices are given either dense (list of lists) or sparse (list of
``{column: value}`` dicts).
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm

from sigma_forge import kernels
from sigma_forge.errors import DimensionMismatchError, DomainError


def _int_row(row) -> dict[int, int]:
    items = row.items() if isinstance(row, dict) else enumerate(row)
    vals = [(c, Fraction(v)) for c, v in items if v]
    if not vals:
        return {}
    den = 1
    for _, v in vals:
        den = lcm(den, v.denominator)
    return {c: v.numerator * (den // v.denominator) for c, v in vals}


def echelon_pivots(rows) -> dict[int, dict[int, int]]:
    return kernels.echelon(_int_row(r) for r in rows)


def rank(rows) -> int:
    return len(echelon_pivots(rows))


def nullspace(rows, ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}``, one vector per free column (that entry set to 1)."""
    red = kernels.back_substitute(echelon_pivots(rows))
    for row in red.values():
        if max(row) >= ncols:
            raise DimensionMismatchError(f"row entry in column {max(row)} exceeds ncols={ncols}")
    free = [c for c in range(ncols) if c not in red]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for p, row in red.items():
            a = row.get(f)
            if a:
                v[p] = Fraction(-a, row[p])
        basis.append(v)
    return basis


def solve_affine(rows, rhs, ncols: int):
    """One solution of ``A x = b`` (free variables set to 0), or None if inconsistent."""
    aug = []
    for row, b in zip(rows, rhs):
        r = dict(row) if isinstance(row, dict) else {c: v for c, v in enumerate(row) if v}
        if b:
            r[ncols] = Fraction(b)
        aug.append(r)
    red = kernels.back_substitute(echelon_pivots(aug))
    if ncols in red:
        return None
    x = [Fraction(0)] * ncols
    for p, row in red.items():
        b = row.get(ncols)
        if b:
            x[p] = Fraction(b, row[p])
    return x


def mat_mul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0]))] for i in range(len(a))]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def inverse(matrix) -> list[list[Fraction]]:
    """Exact Gauss-Jordan inverse; raises DomainError on singular input."""
    n = len(matrix)
    if any(len(r) != n for r in matrix):
        raise DimensionMismatchError("inverse needs a square matrix")
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            raise DomainError("matrix is singular")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def is_symmetric(matrix) -> bool:
    n = len(matrix)
    return all(Fraction(matrix[i][j]) == Fraction(matrix[j][i]) for i in range(n) for j in range(i))


def is_positive_definite(matrix) -> bool:
    """Symmetric and all LDL^T pivots positive (exact)."""
    if not is_symmetric(matrix):
        return False
    n = len(matrix)
    m = [[Fraction(x) for x in row] for row in matrix]
    for k in range(n):
        if m[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            for j in range(k, n):
                m[i][j] -= f * m[k][j]
    return True
