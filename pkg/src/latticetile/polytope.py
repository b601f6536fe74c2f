"""Bounded polytopes cut out by slabs with per-face open/closed ends.

A :class:`Polytope` is ``{x : n·x ∈ I_n}`` over finitely many integer
directions ``n``.  Each interval ``I_n`` records which endpoints are included,
so intersections of half-open parallelepipeds stay exact: two translates of
a half-open cell never share a boundary point.

Vertex enumeration works on the closure (every vertex solves ``d``
independent tight constraints).  Emptiness follows from it: the set is
nonempty iff the closure is nonempty and the average of the closure's
vertices, which lies in the relative interior, avoids every open face.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, cmp_to_key
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from . import exact
from .errors import MalformedInputError, NotBoundedError


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = False

    def __contains__(self, v) -> bool:
        if v < self.lo or v > self.hi:
            return False
        if v == self.lo and not self.lo_closed:
            return False
        if v == self.hi and not self.hi_closed:
            return False
        return True

    @property
    def empty(self) -> bool:
        return self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed))

    def shift(self, c) -> "Interval":
        return Interval(self.lo + c, self.hi + c, self.lo_closed, self.hi_closed)

    def negate(self) -> "Interval":
        return Interval(-self.hi, -self.lo, self.hi_closed, self.lo_closed)

    def scale(self, s) -> "Interval":
        return self.negate().scale(-s) if s < 0 else Interval(self.lo * s, self.hi * s,
                                                                 self.lo_closed, self.hi_closed)

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo:
            lo, lc = self.lo, self.lo_closed
        elif self.lo < other.lo:
            lo, lc = other.lo, other.lo_closed
        else:
            lo, lc = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hc = self.hi, self.hi_closed
        elif self.hi > other.hi:
            hi, hc = other.hi, other.hi_closed
        else:
            hi, hc = self.hi, self.hi_closed and other.hi_closed
        return Interval(lo, hi, lc, hc)

    @property
    def bounds(self) -> str:
        return ("[" if self.lo_closed else "(") + ("]" if self.hi_closed else ")")


def canonical_direction(normal) -> tuple[tuple[int, ...], Fraction]:
    """Write a rational normal as ``s * n`` with ``n`` primitive and first nonzero entry positive."""
    normal = [exact.to_rational(x) for x in normal]
    den = exact.common_denominator(normal)
    ints = [int(x * den) for x in normal]
    g = math.gcd(*ints)
    if g == 0:
        raise MalformedInputError("zero normal vector")
    n = [v // g for v in ints]
    first = next(v for v in n if v)
    sign = 1 if first > 0 else -1
    n = tuple(sign * v for v in n)
    return n, Fraction(sign * g, den)


def _dot(n, x):
    return sum(a * b for a, b in zip(n, x))


def _int_det(m) -> int:
    d = len(m)
    if d == 1:
        return m[0][0]
    if d == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if d == 3:
        (a, b, c), (e, f, g), (h, i, j) = m
        return a * (f * j - g * i) - b * (e * j - g * h) + c * (e * i - f * h)
    return int(exact.det(m))


def _int_adjugate(m, det) -> list[list[int]]:
    d = len(m)
    if d == 1:
        return [[1]]
    if d == 2:
        return [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
    inv = exact.inverse(m)
    return [[int(x * det) for x in row] for row in inv]


class Polytope:
    """Exact convex set ``{x : n·x ∈ I_n}``; bounded by construction."""

    __slots__ = ("dim", "slabs", "__dict__")

    def __init__(self, dim: int, slabs: Iterable[tuple[tuple[int, ...], Interval]] = ()):
        self.dim = dim
        merged: dict = {}
        for n, iv in slabs:
            merged[n] = merged[n].intersect(iv) if n in merged else iv
        self.slabs = tuple(sorted(merged.items()))

    @classmethod
    def from_constraints(cls, dim, constraints) -> "Polytope":
        """``constraints``: iterable of ``(normal, Interval)`` with rational normals."""
        slabs = []
        for normal, iv in constraints:
            n, s = canonical_direction(normal)
            slabs.append((n, iv.scale(1 / s)))
        return cls(dim, slabs)

    @classmethod
    def parallelepiped(cls, vectors, anchor=None, convention="cornered") -> "Polytope":
        """``{anchor + sum t_i v_i}`` with ``t`` in ``[0,1)^d`` or ``[-1/2,1/2)^d``."""
        d = len(vectors)
        anchor = tuple(exact.to_rational(x) for x in (anchor or (0,) * d))
        inv = exact.inverse(exact.transpose([[exact.to_rational(x) for x in v] for v in vectors]))
        start = Fraction(0) if convention == "cornered" else Fraction(-1, 2)
        cons = []
        for row in inv:
            off = _dot(row, anchor)
            cons.append((row, Interval(start + off, start + 1 + off)))
        return cls.from_constraints(d, cons)

    # -- set operations ----------------------------------------------------------

    def intersect(self, *others: "Polytope") -> "Polytope":
        slabs = list(self.slabs)
        for o in others:
            slabs.extend(o.slabs)
        return Polytope(self.dim, slabs)

    def translate(self, v) -> "Polytope":
        v = [exact.to_rational(x) for x in v]
        return Polytope(self.dim, [(n, iv.shift(_dot(n, v))) for n, iv in self.slabs])

    def __contains__(self, x) -> bool:
        return all(_dot(n, x) in iv for n, iv in self.slabs)

    def __eq__(self, other):
        return isinstance(other, Polytope) and self.dim == other.dim and self.slabs == other.slabs

    def __hash__(self):
        return hash(self.slabs)

    def __repr__(self):
        parts = [f"{_fmt(n)}·x∈{iv.bounds[0]}{iv.lo},{iv.hi}{iv.bounds[1]}" for n, iv in self.slabs]
        return "Polytope(" + "; ".join(parts) + ")"

    # -- geometry ------------------------------------------------------------------

    def _check_bounded(self):
        dirs = [n for n, _ in self.slabs]
        if len(dirs) < self.dim or np.linalg.matrix_rank(np.array(dirs, dtype=float)) < self.dim:
            raise NotBoundedError("slab directions do not span R^d")

    @cached_property
    def vertices(self) -> tuple:
        """Vertices of the closure, sorted; empty if the closure is empty."""
        if any(iv.lo > iv.hi for _, iv in self.slabs):
            return ()
        self._check_bounded()
        d = self.dim
        dirs = [n for n, _ in self.slabs]
        den = exact.common_denominator([e for _, iv in self.slabs for e in (iv.lo, iv.hi)])
        lo = [int(iv.lo * den) for _, iv in self.slabs]
        hi = [int(iv.hi * den) for _, iv in self.slabs]
        m = len(dirs)
        found = set()
        for sub in combinations(range(m), d):
            mat = [dirs[i] for i in sub]
            det = _int_det(mat)
            if det == 0:
                continue
            adj = _int_adjugate(mat, det)
            if det < 0:
                det = -det
                adj = [[-x for x in row] for row in adj]
            # w[j] = n_j · adj, so n_j·x = w[j]·e / (det*den)
            others = [j for j in range(m) if j not in sub]
            w = [[sum(dirs[j][k] * adj[k][c] for k in range(d)) for c in range(d)] for j in others]
            blo = [det * lo[j] for j in others]
            bhi = [det * hi[j] for j in others]
            for e in product(*((lo[i], hi[i]) if lo[i] != hi[i] else (lo[i],) for i in sub)):
                ok = True
                for wj, a, b in zip(w, blo, bhi):
                    val = wj[0] * e[0]
                    for c in range(1, d):
                        val += wj[c] * e[c]
                    if val < a or val > b:
                        ok = False
                        break
                if ok:
                    scale = det * den
                    found.add(tuple(Fraction(sum(adj[k][c] * e[c] for c in range(d)), scale)
                                    for k in range(d)))
        return tuple(sorted(found))

    @cached_property
    def centroid(self):
        vs = self.vertices
        if not vs:
            return None
        n = len(vs)
        return tuple(sum(v[k] for v in vs) / n for k in range(self.dim))

    @cached_property
    def is_empty(self) -> bool:
        if any(iv.empty for _, iv in self.slabs):
            return True
        c = self.centroid
        if c is None:
            return True
        return c not in self

    def interior_point(self):
        """A point of the set (relative-interior centroid); ``None`` if empty."""
        return None if self.is_empty else self.centroid

    @cached_property
    def bbox(self):
        vs = self.vertices
        if not vs:
            return None
        return (tuple(min(v[k] for v in vs) for k in range(self.dim)),
                tuple(max(v[k] for v in vs) for k in range(self.dim)))

    @cached_property
    def affine_rank(self) -> int:
        vs = self.vertices
        if not vs:
            return -1
        base = vs[0]
        rows = [[x - y for x, y in zip(v, base)] for v in vs[1:]]
        return _rank(rows)

    def volume(self, *, samples: int = 200_000, seed: int = 0):
        """Exact volume for ``d <= 3``; ``(estimate, stderr)`` by Monte Carlo otherwise."""
        if self.is_empty or self.affine_rank < self.dim:
            return Fraction(0) if self.dim <= 3 else (0.0, 0.0)
        if self.dim == 1:
            return self.vertices[-1][0] - self.vertices[0][0]
        if self.dim == 2:
            return _polygon_area(_order_planar(self.vertices, (0, 1)))
        if self.dim == 3:
            return self._volume3()
        return self._volume_mc(samples, seed)

    def _volume3(self) -> Fraction:
        c = self.centroid
        vs = self.vertices
        total = Fraction(0)
        for n, iv in self.slabs:
            for level in {iv.lo, iv.hi}:
                face = [v for v in vs if _dot(n, v) == level]
                if len(face) < 3:
                    continue
                drop = max(range(3), key=lambda k: abs(n[k]))
                keep = tuple(k for k in range(3) if k != drop)
                ring = _order_planar(face, keep)
                if len(ring) < 3:
                    continue
                v0 = [x - y for x, y in zip(ring[0], c)]
                for a, b in zip(ring[1:], ring[2:]):
                    va = [x - y for x, y in zip(a, c)]
                    vb = [x - y for x, y in zip(b, c)]
                    total += abs(_det3(v0, va, vb))
        return total / 6

    def _volume_mc(self, samples, seed):
        lo, hi = (np.array([float(x) for x in b]) for b in self.bbox)
        rng = np.random.default_rng(seed)
        pts = lo + (hi - lo) * rng.random((samples, self.dim))
        inside = self.contains_float(pts)
        box = float(np.prod(hi - lo))
        p = inside.mean()
        return box * p, box * math.sqrt(p * (1 - p) / samples)

    # -- vectorized membership ------------------------------------------------------

    @cached_property
    def _float_arrays(self):
        normals = np.array([n for n, _ in self.slabs], dtype=float)
        lo = np.array([float(iv.lo) for _, iv in self.slabs])
        hi = np.array([float(iv.hi) for _, iv in self.slabs])
        lc = np.array([iv.lo_closed for _, iv in self.slabs])
        hc = np.array([iv.hi_closed for _, iv in self.slabs])
        return normals, lo, hi, lc, hc

    def contains_float(self, pts: np.ndarray) -> np.ndarray:
        normals, lo, hi, lc, hc = self._float_arrays
        vals = pts @ normals.T
        ok_lo = np.where(lc, vals >= lo, vals > lo)
        ok_hi = np.where(hc, vals <= hi, vals < hi)
        return np.all(ok_lo & ok_hi, axis=1)

    def contains_scaled(self, numerators: np.ndarray, den: int) -> np.ndarray:
        """Exact membership of the points ``numerators / den`` (integer array, shape (N, d))."""
        out = np.ones(len(numerators), dtype=bool)
        if numerators.dtype != object and len(numerators):
            top = int(np.abs(numerators).max()) * max(sum(map(abs, n)) for n, _ in self.slabs)
            ends = [e for _, iv in self.slabs for e in (iv.lo, iv.hi)]
            big = max(top * max(e.denominator for e in ends), max(abs(e.numerator) for e in ends) * den)
            if big >= 2 ** 62:
                numerators = numerators.astype(object)
        for n, iv in self.slabs:
            vals = numerators @ np.array(n, dtype=numerators.dtype)
            # compare vals/den with p/q  <=>  vals*q with p*den
            for end, closed, is_lo in ((iv.lo, iv.lo_closed, True), (iv.hi, iv.hi_closed, False)):
                lhs = vals * end.denominator
                rhs = end.numerator * den
                if is_lo:
                    out &= (lhs >= rhs) if closed else (lhs > rhs)
                else:
                    out &= (lhs <= rhs) if closed else (lhs < rhs)
        return out

    # -- serialization ----------------------------------------------------------------

    def to_json(self) -> list:
        return [{"normal": [str(x) for x in n], "lo": exact.format_rational(iv.lo),
                 "hi": exact.format_rational(iv.hi), "bounds": iv.bounds}
                for n, iv in self.slabs]

    @classmethod
    def from_json(cls, dim: int, data: Sequence[dict]) -> "Polytope":
        cons = []
        try:
            for c in data:
                bounds = c.get("bounds", "[)")
                if len(bounds) != 2 or bounds[0] not in "[(" or bounds[1] not in "])":
                    raise MalformedInputError(f"bad bounds {bounds!r}")
                iv = Interval(exact.to_rational(c["lo"]), exact.to_rational(c["hi"]),
                              bounds[0] == "[", bounds[1] == "]")
                normal = c["normal"]
                if len(normal) != dim:
                    raise MalformedInputError("normal length differs from dimension")
                cons.append((normal, iv))
        except (KeyError, TypeError, AttributeError) as exc:
            raise MalformedInputError(f"bad constraint list: {exc}") from exc
        return cls.from_constraints(dim, cons)


def _fmt(n):
    return "(" + ",".join(str(x) for x in n) + ")"


def _rank(rows) -> int:
    rows = [[Fraction(x) for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(rank + 1, len(rows)):
            f = rows[i][col] / rows[rank][col]
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def _det3(a, b, c):
    return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def _order_planar(points, axes) -> list:
    """Order coplanar convex-position points by angle in the projection onto ``axes``."""
    pts = sorted(set(points))
    i, j = axes
    n = len(pts)
    cx = sum(p[i] for p in pts) / n
    cy = sum(p[j] for p in pts) / n

    def half(p):
        x, y = p[i] - cx, p[j] - cy
        return 0 if (y > 0 or (y == 0 and x > 0)) else 1

    def cmp(p, q):
        hp, hq = half(p), half(q)
        if hp != hq:
            return hp - hq
        cross = (p[i] - cx) * (q[j] - cy) - (p[j] - cy) * (q[i] - cx)
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    return sorted(pts, key=cmp_to_key(cmp))


def _polygon_area(ring) -> Fraction:
    s = Fraction(0)
    for (x0, y0), (x1, y1) in zip(ring, ring[1:] + ring[:1]):
        s += x0 * y1 - x1 * y0
    return abs(s) / 2
