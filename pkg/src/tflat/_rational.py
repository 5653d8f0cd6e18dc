"""Exact rational matrix arithmetic (fractions.Fraction).

Small and dependency-free on purpose: the certification paths need exact
determinants, inverses and Hermite normal forms for d x d generators with
d tiny (1..4), so plain Gaussian elimination over Fraction is plenty.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

FMat = tuple  # tuple of tuples of Fraction


def to_fraction(x):
    """Exact conversion; floats go through their binary expansion."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def fmat(rows) -> FMat:
    return tuple(tuple(to_fraction(x) for x in row) for row in rows)


def fmat_identity(d: int) -> FMat:
    return tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d))


def fmat_mul(a: FMat, b: FMat) -> FMat:
    n, k, m = len(a), len(b), len(b[0])
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m))
        for i in range(n)
    )


def fmat_vec(a: FMat, v) -> tuple:
    return tuple(sum(a[i][j] * v[j] for j in range(len(v))) for i in range(len(a)))


def fmat_transpose(a: FMat) -> FMat:
    return tuple(zip(*a))


def fmat_scale(a: FMat, s) -> FMat:
    s = to_fraction(s)
    return tuple(tuple(s * x for x in row) for row in a)


def fmat_det(a: FMat) -> Fraction:
    n = len(a)
    m = [list(row) for row in a]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return det


def fmat_inv(a: FMat) -> FMat:
    n = len(a)
    m = [list(row) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular rational matrix")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(tuple(row[n:]) for row in m)


def fmat_float(a: FMat):
    return [[float(x) for x in row] for row in a]


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def common_denominator(a: FMat) -> int:
    den = 1
    for row in a:
        for x in row:
            den = _lcm(den, x.denominator)
    return den


def hnf_column(a_int):
    """Column-style Hermite normal form of an integer matrix (square,
    full rank): returns H lower-triangular with positive diagonal and
    off-diagonal entries reduced mod the diagonal, such that H = A*U for
    some unimodular U.  Used as the canonical form of the lattice A*Z^d.
    """
    m = [list(map(int, row)) for row in a_int]
    n = len(m)
    cols = list(range(n))
    for i in range(n):
        # clear row i to a single nonzero pivot among columns i..n-1
        while True:
            nz = [c for c in cols[i:] if m[i][c] != 0]
            if not nz:
                raise ValueError("matrix not full rank")
            piv = min(nz, key=lambda c: abs(m[i][c]))
            pi = cols.index(piv)
            cols[i], cols[pi] = cols[pi], cols[i]
            done = True
            for c in cols[i + 1:]:
                q = m[i][c] // m[i][cols[i]]
                if q:
                    for r in range(n):
                        m[r][c] -= q * m[r][cols[i]]
                if m[i][c] != 0:
                    done = False
            if done:
                break
        if m[i][cols[i]] < 0:
            for r in range(n):
                m[r][cols[i]] = -m[r][cols[i]]
        # reduce earlier columns against this pivot
        for c in cols[:i]:
            q = m[i][c] // m[i][cols[i]]
            if q:
                for r in range(n):
                    m[r][c] -= q * m[r][cols[i]]
    return tuple(tuple(m[r][c] for c in cols) for r in range(n))
