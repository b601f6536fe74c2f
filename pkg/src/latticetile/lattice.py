"""Full-rank lattices in R^d and their algebra.

A lattice is stored by its basis *vectors*; the basis matrix ``A`` has these
vectors as columns so that ``L = A Z^d``.  Exact lattices carry Fraction
entries; approximate ones carry floats and only support the float-side
operations (volume, window enumeration, matching).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import NamedTuple, Sequence

import numpy as np

from . import exact
from .errors import (
    CapExceededError,
    DimensionMismatchError,
    FlavorMismatchError,
    MalformedInputError,
    NonIntegralIndexError,
    NotSublatticeError,
    SingularError,
)

EXACT = "exact"
APPROX = "approx"


class LatticePoint(NamedTuple):
    point: tuple
    coords: tuple  # integer coordinates in the lattice basis


@dataclass(frozen=True, eq=False)
class Lattice:
    vectors: tuple
    flavor: str = EXACT

    def __post_init__(self):
        d = len(self.vectors)
        if d == 0 or any(len(v) != d for v in self.vectors):
            raise MalformedInputError("a full-rank lattice in R^d needs d vectors of length d")
        if self.flavor == EXACT:
            vecs = tuple(tuple(exact.to_rational(x) for x in v) for v in self.vectors)
        elif self.flavor == APPROX:
            vecs = tuple(tuple(float(x) for x in v) for v in self.vectors)
        else:
            raise MalformedInputError(f"unknown flavor {self.flavor!r}")
        object.__setattr__(self, "vectors", vecs)
        if self.determinant == 0:
            raise SingularError("basis vectors are linearly dependent")

    @classmethod
    def from_vectors(cls, vectors, flavor=None) -> "Lattice":
        if flavor is None:
            flat = [x for v in vectors for x in v]
            flavor = APPROX if any(isinstance(x, float) for x in flat) else EXACT
        return cls(tuple(tuple(v) for v in vectors), flavor)

    @classmethod
    def integer(cls, d: int, scale=1) -> "Lattice":
        """``scale * Z^d``."""
        s = exact.to_rational(scale)
        return cls(tuple(tuple(s if i == j else Fraction(0) for j in range(d)) for i in range(d)))

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def is_exact(self) -> bool:
        return self.flavor == EXACT

    @cached_property
    def matrix(self) -> tuple:
        """Basis matrix with the basis vectors as columns."""
        return exact.transpose(self.vectors)

    @cached_property
    def determinant(self):
        if self.is_exact:
            return exact.det(self.matrix)
        return float(np.linalg.det(np.array(self.matrix, dtype=float)))

    @cached_property
    def inverse(self) -> tuple:
        self._need_exact()
        return exact.inverse(self.matrix)

    @cached_property
    def float_matrix(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.matrix])

    @cached_property
    def float_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.float_matrix)

    @cached_property
    def canonical(self) -> tuple:
        """HNF basis rows of the lattice: equal for equal lattices."""
        self._need_exact()
        return _hnf_basis(self.vectors)

    def _need_exact(self):
        if not self.is_exact:
            raise FlavorMismatchError("operation needs an exact (rational) lattice")

    def coords(self, p) -> tuple:
        """Coordinates ``A^{-1} p`` (rational, not necessarily integral)."""
        return exact.matvec(self.inverse, tuple(exact.to_rational(x) for x in p))

    def point(self, coords) -> tuple:
        return exact.matvec(self.matrix, coords)

    def hnf_lattice(self) -> "Lattice":
        return Lattice(self.canonical)

    def __eq__(self, other):
        if not isinstance(other, Lattice):
            return NotImplemented
        if self.is_exact and other.is_exact:
            return self.dim == other.dim and self.canonical == other.canonical
        return self.vectors == other.vectors and self.flavor == other.flavor

    def __hash__(self):
        return hash(self.canonical if self.is_exact else self.vectors)

    def __repr__(self):
        vecs = ", ".join("(" + ", ".join(exact.format_rational(x) if self.is_exact else repr(x)
                                         for x in v) + ")" for v in self.vectors)
        return f"Lattice<{vecs}>"

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        fmt = exact.format_rational if self.is_exact else float
        return {"dim": self.dim, "flavor": self.flavor,
                "basis": [[fmt(x) for x in v] for v in self.vectors]}

    @classmethod
    def from_json(cls, data) -> "Lattice":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            flavor = data.get("flavor", EXACT)
            basis = data["basis"]
        except (AttributeError, KeyError, TypeError) as exc:
            raise MalformedInputError("lattice JSON needs a 'basis' array") from exc
        if flavor == APPROX:
            try:
                basis = [[float(x) for x in row] for row in basis]
            except (TypeError, ValueError) as exc:
                raise MalformedInputError("approximate basis entries must be numbers") from exc
        lat = cls(tuple(tuple(row) for row in basis), flavor)
        if "dim" in data and data["dim"] != lat.dim:
            raise MalformedInputError(f"dim {data['dim']} disagrees with basis size {lat.dim}")
        return lat


def _hnf_basis(vectors) -> tuple:
    """Basis (as rows) of the lattice generated by ``vectors``, in HNF."""
    flat = [x for v in vectors for x in v]
    den = exact.common_denominator(flat)
    rows = [[int(x * den) for x in v] for v in vectors]
    h, _ = exact.hnf(rows)
    return tuple(tuple(Fraction(x, den) for x in row) for row in h if any(row))


def reduced_basis(vectors) -> tuple:
    """LLL-reduced basis (rows) of the full-rank lattice generated by ``vectors``.

    Canonical HNF bases can be very skewed; the reduced one keeps cells and
    coset representatives compact.  Ties are broken deterministically.
    """
    h = _hnf_basis(vectors)
    den = exact.common_denominator([x for v in h for x in v])
    red = exact.lll([[int(x * den) for x in v] for v in h])
    out = []
    for v in red:
        first = next((x for x in v if x), 0)
        out.append(tuple(Fraction(x, den) * (1 if first > 0 else -1) for x in v))
    out.sort(key=lambda v: (sum(x * x for x in v), [-x for x in v]))
    if exact.det(out) < 0:
        out[-1] = tuple(-x for x in out[-1])
    return tuple(out)


def _same_dim(a: Lattice, b: Lattice):
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimensions differ: {a.dim} vs {b.dim}")
    a._need_exact()
    b._need_exact()


# -- operations ----------------------------------------------------------------

def volume(lat: Lattice):
    return abs(lat.determinant)


def contains(lat: Lattice, p) -> tuple | None:
    """Integer coordinates of ``p`` in ``lat``'s basis, or ``None`` if ``p`` is not in ``lat``."""
    t = lat.coords(p)
    if all(x.denominator == 1 for x in t):
        return tuple(int(x) for x in t)
    return None


def lattice_sum(a: Lattice, b: Lattice) -> Lattice:
    """``a + b``; always a lattice for rational inputs."""
    _same_dim(a, b)
    return Lattice(reduced_basis(a.vectors + b.vectors))


def intersect(a: Lattice, b: Lattice) -> Lattice:
    """``a ∩ b`` from the integer kernel of ``[A | -B]``."""
    _same_dim(a, b)
    d = a.dim
    den = exact.common_denominator([x for v in a.vectors + b.vectors for x in v])
    gens = [[int(x * den) for x in v] for v in a.vectors] + \
           [[-int(x * den) for x in v] for v in b.vectors]
    h, u = exact.hnf(gens)
    kernel = [u[i] for i, row in enumerate(h) if not any(row)]
    points = [tuple(sum((c * v[j] for c, v in zip(k[:d], a.vectors)), Fraction(0)) for j in range(d))
              for k in kernel]
    basis = _hnf_basis(points) if points else ()
    if len(basis) != d:
        raise NotSublatticeError("intersection is not full rank (lattices are not commensurable)")
    return Lattice(reduced_basis(basis))


def is_sublattice(sub: Lattice, lat: Lattice) -> bool:
    return all(contains(lat, v) is not None for v in sub.vectors)


def index(lat: Lattice, sub: Lattice) -> int:
    """``[lat : sub]`` for a full-rank sublattice."""
    _same_dim(lat, sub)
    if not is_sublattice(sub, lat):
        raise NotSublatticeError(f"{sub!r} is not contained in {lat!r}")
    k = volume(sub) / volume(lat)
    if k.denominator != 1:
        raise NonIntegralIndexError(f"vol(H)/vol(L) = {k} is not an integer")
    return int(k)


def _coords_matrix(lat: Lattice, sub_vectors) -> list[list[int]]:
    rows = []
    for w in sub_vectors:
        c = contains(lat, w)
        if c is None:
            raise NotSublatticeError(f"{w} is not in {lat!r}")
        rows.append(list(c))
    return rows


def coset_representatives(lat: Lattice, sub: Lattice) -> list[tuple]:
    """One point of ``lat`` per class of ``lat/sub``.

    The representatives are the points of ``lat`` in the half-open cell
    ``{sub.matrix @ t : t in [0,1)^d}``, sorted by their ``sub``-coordinates.
    """
    _same_dim(lat, sub)
    rows = _coords_matrix(lat, sub.vectors)
    h, _ = exact.hnf(rows)
    diag = [h[i][i] for i in range(lat.dim)]
    reps = []
    for x in product(*(range(n) for n in diag)):
        p = lat.point(x)
        t = sub.coords(p)
        shift = tuple(math.floor(v) for v in t)
        frac = tuple(v - s for v, s in zip(t, shift))
        reps.append((frac, exact.matvec(sub.matrix, frac)))
    reps.sort()
    return [p for _, p in reps]


@dataclass(frozen=True)
class SublatticeDecomposition:
    ambient: Lattice
    sub_vectors: tuple
    rank: int
    invariant_factors: tuple
    basis: tuple  # adapted basis of ambient; the last ``rank`` vectors span the saturation of sub

    @property
    def index(self) -> int:
        """Index of the sublattice in its saturation; equals [L:H] when full rank."""
        return math.prod(self.invariant_factors)

    @property
    def complement(self) -> tuple:
        return self.basis[: len(self.basis) - self.rank]

    @property
    def sub_basis(self) -> tuple:
        """Basis of the sublattice: last vectors scaled by the invariant factors."""
        tail = self.basis[len(self.basis) - self.rank:]
        return tuple(tuple(f * x for x in v) for f, v in zip(self.invariant_factors, tail))


def adapted_basis(lat: Lattice, sub) -> SublatticeDecomposition:
    """Basis of ``lat`` adapted to a (possibly lower-rank) sublattice ``sub``.

    ``sub`` is a :class:`Lattice` or a sequence of generating vectors.
    """
    lat._need_exact()
    gens = sub.vectors if isinstance(sub, Lattice) else tuple(tuple(exact.to_rational(x) for x in v)
                                                                for v in sub)
    d = lat.dim
    if not gens:
        return SublatticeDecomposition(lat, (), 0, (), lat.vectors)
    if any(len(g) != d for g in gens):
        raise DimensionMismatchError("generator length differs from lattice dimension")
    coords = _coords_matrix(lat, gens)           # one row per generator
    dmat, u, v = exact.snf(exact.transpose(coords))  # columns = generators, d x n
    factors = tuple(dmat[i][i] for i in range(min(len(dmat), len(dmat[0]))) if dmat[i][i])
    r = len(factors)
    uinv = exact.inverse(u)                       # columns of A @ uinv form the adapted basis
    new = exact.matmul(lat.matrix, uinv)
    cols = exact.transpose(new)
    ordered = tuple(cols[r:]) + tuple(cols[:r])
    return SublatticeDecomposition(lat, gens, r, factors, ordered)


def box_coordinates(basis: np.ndarray, lo, hi, cap: int = 10 ** 7) -> np.ndarray:
    """Integer coordinates ``c`` (one per row) covering all points ``basis @ c`` in the box.

    Level-by-level enumeration of the ball around the box, in the triangular
    frame ``basis = Q R``, so skewed bases cost no more than reduced ones.
    The result may contain a few points just outside the box; callers filter.
    """
    A = np.asarray(basis, dtype=float)
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    d = A.shape[0]
    rho2 = (float(np.linalg.norm(hi - lo)) / 2 * (1 + 1e-9) + 1e-9) ** 2
    Q, R = np.linalg.qr(A)
    y = Q.T @ ((lo + hi) / 2)
    coords = np.zeros((1, 0), dtype=np.int64)
    resid = np.zeros(1)
    for k in reversed(range(d)):
        s = coords @ R[k, k + 1:] - y[k]
        w = np.sqrt(np.clip(rho2 - resid, 0, None)) / abs(R[k, k])
        mid = -s / R[k, k]
        first = np.ceil(mid - w - 1e-9).astype(np.int64)
        count = np.maximum(np.floor(mid + w + 1e-9).astype(np.int64) - first + 1, 0)
        total = int(count.sum())
        if total > cap:
            raise CapExceededError(f"more than {cap} candidate lattice points")
        rows = np.repeat(np.arange(len(coords)), count)
        offs = np.arange(total) - np.repeat(np.cumsum(count) - count, count)
        c = first[rows] + offs
        resid = resid[rows] + (R[k, k] * c + s[rows]) ** 2
        coords = np.hstack([c[:, None], coords[rows]])
    return coords


def lattice_points_in_region(lat: Lattice, lo, hi) -> list[tuple]:
    """All points of an exact lattice in the closed box ``lo <= x <= hi``."""
    coords = box_coordinates(lat.float_matrix, [float(v) for v in lo], [float(v) for v in hi])
    out = []
    for x in coords:
        p = lat.point(tuple(int(v) for v in x))
        if all(l <= c <= h for c, l, h in zip(p, lo, hi)):
            out.append(p)
    out.sort()
    return out


def load_lattice(path) -> Lattice:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"{path}: invalid JSON ({exc})") from exc
    return Lattice.from_json(data)
