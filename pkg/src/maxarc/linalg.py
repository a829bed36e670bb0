"""Dense linear algebra over GF(2^m): determinant, rank, solve."""

from __future__ import annotations

from typing import Sequence

from .gf2m import FieldSpec

Matrix = Sequence[Sequence[int]]


class SingularMatrixError(ArithmeticError):
    pass


def det(f: FieldSpec, mat: Matrix) -> int:
    """Determinant by Gaussian elimination (sign-free in characteristic 2)."""
    a = [list(row) for row in mat]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    out = 1
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            return 0
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        out = f.mul(out, p)
        pinv = f.inv(p)
        for i in range(col + 1, n):
            if a[i][col]:
                factor = f.mul(a[i][col], pinv)
                row_i, row_c = a[i], a[col]
                for j in range(col, n):
                    if row_c[j]:
                        row_i[j] ^= f.mul(factor, row_c[j])
    return out


def rank(f: FieldSpec, vectors: Sequence[Sequence[int]]) -> int:
    """Rank of a list of vectors (rows)."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pinv = f.inv(rows[r][col])
        for i in range(r + 1, len(rows)):
            if rows[i][col]:
                factor = f.mul(rows[i][col], pinv)
                for j in range(col, ncols):
                    if rows[r][j]:
                        rows[i][j] ^= f.mul(factor, rows[r][j])
        r += 1
        if r == len(rows):
            break
    return r


def solve(f: FieldSpec, mat: Matrix, rhs: Sequence[int]) -> list[int]:
    """Unique solution x of mat @ x = rhs; raises SingularMatrixError."""
    n = len(mat)
    a = [list(row) + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            raise SingularMatrixError("singular system")
        a[col], a[piv] = a[piv], a[col]
        pinv = f.inv(a[col][col])
        a[col] = [f.mul(pinv, v) for v in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                factor = a[i][col]
                a[i] = [v ^ f.mul(factor, w) for v, w in zip(a[i], a[col])]
    return [a[i][n] for i in range(n)]


def in_span(f: FieldSpec, vectors: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    return rank(f, list(vectors) + [v]) == rank(f, vectors)
