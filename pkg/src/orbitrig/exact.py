"""Exact linear algebra over the rationals.

Matrices are plain lists of rows.  Entries may be ``int`` or
``fractions.Fraction``; everything returned is ``Fraction``.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

Matrix = list[list[Fraction]]
Vector = list[Fraction]


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def _integer_rows(m: Sequence[Sequence]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators."""
    out = []
    for row in m:
        row = [Fraction(x) for x in row]
        den = 1
        for x in row:
            den = lcm(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def rank_exact(m: Sequence[Sequence]) -> int:
    """Rank by fraction-free (Bareiss) elimination on integer rows.

    Row scaling does not change the rank, so denominators are cleared
    row by row first.  The pivot in each column is the candidate of
    largest magnitude.
    """
    if not m or not m[0]:
        return 0
    a = _integer_rows(m)
    n_rows, n_cols = len(a), len(a[0])
    rank = 0
    prev = 1
    for col in range(n_cols):
        if rank == n_rows:
            break
        best = None
        for r in range(rank, n_rows):
            if a[r][col] != 0 and (best is None or abs(a[r][col]) > abs(a[best][col])):
                best = r
        if best is None:
            continue
        a[rank], a[best] = a[best], a[rank]
        piv = a[rank][col]
        for r in range(rank + 1, n_rows):
            f = a[r][col]
            row_r, row_p = a[r], a[rank]
            for c in range(col + 1, n_cols):
                # exact division is guaranteed by Sylvester's identity
                row_r[c] = (piv * row_r[c] - f * row_p[c]) // prev
            row_r[col] = 0
        prev = piv
        rank += 1
    return rank


def rref(m: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = to_fraction_matrix(m)
    if not a:
        return a, []
    n_rows, n_cols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for col in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][col]
        a[r] = [x * inv for x in a[r]]
        for i in range(n_rows):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
    return a, pivots


def kernel_exact(m: Sequence[Sequence], n_cols: int | None = None) -> list[Vector]:
    """Basis of the right null space, one vector per free column.

    ``n_cols`` is required when ``m`` has no rows.
    """
    if not m:
        if n_cols is None:
            raise ValueError("n_cols required for an empty matrix")
        return [[Fraction(int(i == j)) for i in range(n_cols)] for j in range(n_cols)]
    width = len(m[0])
    red, pivots = rref(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(width):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * width
        v[free] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[free]
        basis.append(v)
    return basis


def mat_vec(m: Sequence[Sequence], v: Sequence) -> Vector:
    return [sum((Fraction(x) * y for x, y in zip(row, v)), Fraction(0)) for row in m]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = list(zip(*b))
    return [[sum((Fraction(x) * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def transpose(a: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*a)]


def identity(d: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]


def inverse(a: Sequence[Sequence]) -> Matrix:
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def det(a: Sequence[Sequence]) -> Fraction:
    m = to_fraction_matrix(a)
    n = len(m)
    out = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            out = -out
        out *= m[col][col]
        for i in range(col + 1, n):
            f = m[i][col] / m[col][col]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return out


def span_basis(vectors: Sequence[Sequence]) -> list[Vector]:
    """Independent basis (RREF rows) for the span of ``vectors``."""
    if not vectors:
        return []
    red, pivots = rref(vectors)
    return red[: len(pivots)]


def intersect_subspaces(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[Vector]:
    """Basis for span(a) ∩ span(b) (rows are spanning vectors)."""
    if not a or not b:
        return []
    # solve sum x_i a_i - sum y_j b_j = 0
    cols = [list(map(Fraction, v)) for v in a] + [[-Fraction(x) for x in v] for v in b]
    system = transpose(cols)
    ker = kernel_exact(system)
    out = []
    for k in ker:
        x = k[: len(a)]
        vec = [sum((xi * Fraction(v[c]) for xi, v in zip(x, a)), Fraction(0)) for c in range(len(a[0]))]
        out.append(vec)
    return span_basis(out)
