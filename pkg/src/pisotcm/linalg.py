"""Exact linear algebra over the integers and rationals.

Matrices are tuples of row tuples. Nothing here rounds.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Sequence

Matrix = tuple


def as_matrix(rows) -> Matrix:
    return tuple(tuple(r) for r in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def shape(a: Matrix) -> tuple:
    return len(a), (len(a[0]) if a else 0)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n, k = shape(a)
    k2, m = shape(b)
    if k != k2:
        raise ValueError(f"shape mismatch {shape(a)} x {shape(b)}")
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def matvec(a: Matrix, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def matpow(a: Matrix, k: int) -> Matrix:
    result = identity(len(a))
    base = a
    while k:
        if k & 1:
            result = matmul(result, base)
        base = matmul(base, base)
        k >>= 1
    return result


def trace(a: Matrix):
    return sum(a[i][i] for i in range(len(a)))


def block_diag(*blocks: Matrix) -> Matrix:
    n = sum(len(b) for b in blocks)
    rows = []
    offset = 0
    for b in blocks:
        for r in b:
            rows.append((0,) * offset + tuple(r) + (0,) * (n - offset - len(r)))
        offset += len(b)
    return tuple(rows)


def det(a: Matrix):
    """Determinant by fraction-free Bareiss elimination (exact for int and Fraction entries)."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num // prev if isinstance(num, int) and isinstance(prev, int) else num / prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def charpoly(a: Matrix) -> list:
    """Characteristic polynomial det(xI - A), ascending coefficients (Faddeev-LeVerrier)."""
    n = len(a)
    integral = all(isinstance(x, int) for row in a for x in row)
    zero = 0 if integral else Fraction(0)
    coeffs = [zero] * (n + 1)
    coeffs[n] = zero + 1
    # sparse rows of A: exterior powers are mostly zeros
    rows = [[(t, x) for t, x in enumerate(row) if x] for row in a]
    mk = [[zero] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k
        prod = [[sum(x * mk[t][j] for t, x in rows[i]) for j in range(n)] for i in range(n)]
        for i in range(n):
            prod[i][i] += coeffs[n - k + 1]
        mk = prod
        am = sum(sum(x * mk[t][i] for t, x in rows[i]) for i in range(n))
        if integral:
            # exact: every coefficient of an integer matrix is an integer
            q, r = divmod(-am, k)
            assert r == 0
            coeffs[n - k] = q
        else:
            coeffs[n - k] = -Fraction(am) / k
    return [int(c) if c.denominator == 1 else c for c in coeffs]


def inverse(a: Matrix) -> Matrix:
    """Exact inverse by Gauss-Jordan over the rationals."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[pivot] = m[pivot], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(tuple(int(x) if x.denominator == 1 else x for x in row[n:]) for row in m)


def exterior_power(a: Matrix, k: int) -> Matrix:
    """Matrix of the k-th exterior power on the basis of increasing k-subsets (k x k minors)."""
    n = len(a)
    subsets = list(combinations(range(n), k))
    if k == 0:
        return ((1,),)
    return tuple(
        tuple(det(tuple(tuple(a[r][c] for c in cols) for r in rows)) for cols in subsets)
        for rows in subsets
    )


def mod_matrix(a: Matrix, q: int) -> Matrix:
    return tuple(tuple(x % q for x in row) for row in a)


def order_mod(a: Matrix, q: int, limit: int = 10**6):
    """Multiplicative order of an integer matrix in GL_n(Z/qZ), or ``None`` if not found below ``limit``."""
    n = len(a)
    ident = mod_matrix(identity(n), q)
    base = mod_matrix(a, q)
    cur = base
    for k in range(1, limit + 1):
        if cur == ident:
            return k
        cur = mod_matrix(matmul(cur, base), q)
    return None
