"""Exact rational matrices and integer normal forms.

Scalars are :class:`fractions.Fraction`; matrices are tuples of row tuples.
Everything here is arbitrary precision, so there is no overflow path.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .errors import MalformedInputError, NonSquareError, SingularError

Matrix = tuple  # tuple[tuple[Fraction, ...], ...]


# -- scalars ---------------------------------------------------------------

def to_rational(value) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise MalformedInputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInputError(f"not a rational: {value!r}") from exc
    raise MalformedInputError(f"not an exact rational: {value!r}")


def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# -- matrices --------------------------------------------------------------

def matrix(rows) -> Matrix:
    rows = tuple(tuple(to_rational(v) for v in row) for row in rows)
    if rows and len({len(r) for r in rows}) != 1:
        raise MalformedInputError("ragged matrix")
    return rows


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def transpose(m) -> Matrix:
    return tuple(zip(*m))


def matmul(a, b) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def matvec(a, v) -> tuple:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def _require_square(m) -> int:
    n = len(m)
    if any(len(row) != n for row in m):
        raise NonSquareError(f"expected a square matrix, got {n}x{len(m[0]) if m else 0}")
    return n


def _integer_rows(m):
    """Scale each row to integers; returns the rows and the product of the scale factors."""
    rows, scale = [], 1
    for row in m:
        row = [Fraction(v) for v in row]
        den = lcm(*(v.denominator for v in row)) if row else 1
        rows.append([int(v * den) for v in row])
        scale *= den
    return rows, scale


def det(m) -> Fraction:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = _require_square(m)
    if n == 0:
        return Fraction(1)
    a, scale = _integer_rows(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return Fraction(sign * a[n - 1][n - 1], scale)


def inverse(m) -> Matrix:
    n = _require_square(m)
    a = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularError("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def solve(m, b) -> tuple:
    return matvec(inverse(m), b)


# -- integer normal forms ----------------------------------------------------

def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(x, y, g)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x, nx, y, ny = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
    if a < 0:
        a, x, y = -a, -x, -y
    return x, y, a


def _as_int_rows(m) -> list[list[int]]:
    out = []
    for row in m:
        r = []
        for v in row:
            v = Fraction(v)
            if v.denominator != 1:
                raise MalformedInputError(f"non-integer entry {v} in integer matrix")
            r.append(int(v))
        out.append(r)
    return out


def _combine(rows, i, j, x, y, p, q):
    """rows[i], rows[j] <- x*rows[i] + y*rows[j], -q*rows[i] + p*rows[j]."""
    ri, rj = rows[i], rows[j]
    rows[i] = [x * s + y * t for s, t in zip(ri, rj)]
    rows[j] = [-q * s + p * t for s, t in zip(ri, rj)]


def _upper_row_hnf(a: list[list[int]]):
    m = len(a)
    n = len(a[0]) if m else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for col in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if a[i][col]:
                x, y, g = xgcd(a[r][col], a[i][col])
                p, q = a[r][col] // g, a[i][col] // g
                _combine(a, r, i, x, y, p, q)
                _combine(u, r, i, x, y, p, q)
        piv = a[r][col]
        if piv == 0:
            continue
        if piv < 0:
            a[r] = [-v for v in a[r]]
            u[r] = [-v for v in u[r]]
            piv = -piv
        for i in range(r):
            f = a[i][col] // piv
            if f:
                a[i] = [s - f * t for s, t in zip(a[i], a[r])]
                u[i] = [s - f * t for s, t in zip(u[i], u[r])]
        r += 1
    return a, u


def hnf(m) -> tuple[list[list[int]], list[list[int]]]:
    """Row-style Hermite normal form, lower-triangular convention.

    Returns ``(h, u)`` with ``h == u @ m`` and ``u`` unimodular. Nonzero rows of
    ``h`` end in a positive pivot (everything to its right is zero), entries
    below a pivot are reduced into ``[0, pivot)``, and zero rows come first.
    """
    a = _as_int_rows(m)
    if not a:
        return [], []
    rev = [row[::-1] for row in a[::-1]]
    h, u = _upper_row_hnf(rev)
    h = [row[::-1] for row in h[::-1]]
    u = [row[::-1] for row in u[::-1]]
    return h, u


def snf(m) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Smith normal form ``d == u @ m @ v`` with ``d1 | d2 | ...`` all ``>= 0``."""
    a = _as_int_rows(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for mat in (a, v):
            for row in mat:
                row[i], row[j] = row[j], row[i]

    for t in range(min(rows, cols)):
        while True:
            nz = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                q = a[i][t] // piv
                if q:
                    a[i] = [s - q * w for s, w in zip(a[i], a[t])]
                    u[i] = [s - q * w for s, w in zip(u[i], u[t])]
                dirty |= a[i][t] != 0
            for j in range(t + 1, cols):
                q = a[t][j] // piv
                if q:
                    for mat in (a, v):
                        for row in mat:
                            row[j] -= q * row[t]
                dirty |= a[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if a[i][j] % piv), None)
            if bad is None:
                break
            a[t] = [s + w for s, w in zip(a[t], a[bad[0]])]
            u[t] = [s + w for s, w in zip(u[t], u[bad[0]])]
        if t < rows and t < cols and a[t][t] < 0:
            a[t] = [-s for s in a[t]]
            u[t] = [-s for s in u[t]]
    return a, u, v


def int_det(m) -> int:
    d = det(m)
    assert d.denominator == 1
    return int(d)


def common_denominator(values) -> int:
    return lcm(1, *(Fraction(v).denominator for v in values))


def primitive(vec: Sequence[int]) -> tuple[int, ...]:
    g = gcd(*vec)
    return tuple(v // g for v in vec) if g else tuple(vec)


def lll(rows, delta=Fraction(3, 4)) -> list[list[int]]:
    """LLL-reduce linearly independent integer rows (textbook version, exact Gram-Schmidt)."""
    b = [list(map(int, r)) for r in rows]
    n = len(b)
    if n == 0:
        return b

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    def gram_schmidt():
        bs, mu = [], [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = dot(b[i], bs[j]) / dot(bs[j], bs[j])
                v = [x - mu[i][j] * y for x, y in zip(v, bs[j])]
            bs.append(v)
        return bs, mu

    bs, mu = gram_schmidt()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                bs, mu = gram_schmidt()
        if dot(bs[k], bs[k]) >= (delta - mu[k][k - 1] ** 2) * dot(bs[k - 1], bs[k - 1]):
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            bs, mu = gram_schmidt()
            k = max(k - 1, 1)
    return b
