"""Half-open fundamental cells, reduction modulo a lattice, and finite unions of cells."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import exact
from .errors import MalformedInputError, VolumeMismatchError
from .lattice import Lattice, LatticePoint, coset_representatives, index, intersect, lattice_sum, volume
from .polytope import Polytope

CORNERED = "cornered"
CENTERED = "centered"
_START = {CORNERED: Fraction(0), CENTERED: Fraction(-1, 2)}


def _check_convention(convention):
    if convention not in _START:
        raise MalformedInputError(f"unknown cell convention {convention!r}")


@dataclass(frozen=True)
class HalfOpenParallelepiped:
    """``{center + sum t_i v_i}`` with ``t`` in ``[0,1)^d`` (cornered) or ``[-1/2,1/2)^d`` (centered)."""

    vectors: tuple
    center: tuple = None
    convention: str = CENTERED

    def __post_init__(self):
        _check_convention(self.convention)
        vecs = tuple(tuple(exact.to_rational(x) for x in v) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        c = self.center if self.center is not None else (0,) * len(vecs)
        object.__setattr__(self, "center", tuple(exact.to_rational(x) for x in c))

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @cached_property
    def lattice(self) -> Lattice:
        return Lattice(self.vectors)

    @cached_property
    def polytope(self) -> Polytope:
        return Polytope.parallelepiped(self.vectors, self.center, self.convention)

    def __contains__(self, x) -> bool:
        t = self.lattice.coords([a - b for a, b in zip(x, self.center)])
        s = _START[self.convention]
        return all(s <= v < s + 1 for v in t)

    @property
    def volume(self) -> Fraction:
        return volume(self.lattice)

    def translate(self, v) -> "HalfOpenParallelepiped":
        c = tuple(a + exact.to_rational(b) for a, b in zip(self.center, v))
        return HalfOpenParallelepiped(self.vectors, c, self.convention)


def fundamental_parallelepiped(lat: Lattice, convention: str = CENTERED) -> HalfOpenParallelepiped:
    lat._need_exact()
    return HalfOpenParallelepiped(lat.vectors, None, convention)


def reduce_mod(x, lat: Lattice, convention: str = CORNERED) -> tuple[tuple, LatticePoint]:
    """Split ``x = rep + l`` with ``l`` in ``lat`` and ``rep`` in the fundamental cell."""
    _check_convention(convention)
    x = tuple(exact.to_rational(v) for v in x)
    t = lat.coords(x)
    shift = -_START[convention]
    k = tuple(math.floor(v + shift) for v in t)
    l = lat.point(k)
    rep = tuple(a - b for a, b in zip(x, l))
    return rep, LatticePoint(l, k)


@dataclass(frozen=True)
class FundamentalDomainSet:
    """Finite union ``(base_cell + offsets) ∪ pieces`` of disjoint half-open sets."""

    dim: int
    base_cell: HalfOpenParallelepiped | None = None
    offsets: tuple = ()
    pieces: tuple = ()  # Polytope cells
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        offs = tuple(tuple(exact.to_rational(x) for x in o) for o in self.offsets)
        object.__setattr__(self, "offsets", offs)
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if offs and self.base_cell is None:
            raise MalformedInputError("offsets need a base cell")

    def components(self) -> list[Polytope]:
        out = []
        if self.base_cell is not None:
            base = self.base_cell.polytope
            out.extend(base.translate(o) for o in self.offsets)
        out.extend(self.pieces)
        return out

    def multiplicity(self, x) -> int:
        return sum(x in p for p in self.components())

    def __contains__(self, x) -> bool:
        return self.multiplicity(x) > 0

    def volume(self):
        total = Fraction(0)
        if self.base_cell is not None:
            total += self.base_cell.volume * len(self.offsets)
        for p in self.pieces:
            total += p.volume()
        return total

    @cached_property
    def bbox(self):
        boxes = [p.bbox for p in self.components() if p.bbox is not None]
        if not boxes:
            return None
        return (tuple(min(b[0][k] for b in boxes) for k in range(self.dim)),
                tuple(max(b[1][k] for b in boxes) for k in range(self.dim)))

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        fmt = exact.format_rational
        data = {"dim": self.dim}
        if self.base_cell is not None:
            data["baseCellBasis"] = [[fmt(x) for x in v] for v in self.base_cell.vectors]
            data["baseCellConvention"] = self.base_cell.convention
            if any(self.base_cell.center):
                data["baseCellCenter"] = [fmt(x) for x in self.base_cell.center]
        data["offsets"] = [[fmt(x) for x in o] for o in self.offsets]
        data["pieces"] = [{"constraints": p.to_json()} for p in self.pieces]
        return data

    @classmethod
    def from_json(cls, data) -> "FundamentalDomainSet":
        if isinstance(data, str):
            data = json.loads(data)
        if not isinstance(data, dict):
            raise MalformedInputError("fundamental domain JSON must be an object")
        base = None
        try:
            if "baseCellBasis" in data:
                base = HalfOpenParallelepiped(tuple(tuple(r) for r in data["baseCellBasis"]),
                                              data.get("baseCellCenter"),
                                              data.get("baseCellConvention", CORNERED))
            dim = data.get("dim") or (base.dim if base else None)
            if dim is None:
                pieces = data.get("pieces") or []
                dim = len(pieces[0]["constraints"][0]["normal"]) if pieces else None
            if dim is None:
                raise MalformedInputError("cannot infer the dimension of an empty set")
            pieces = tuple(Polytope.from_json(dim, p["constraints"]) for p in data.get("pieces", []))
            return cls(dim, base, tuple(tuple(o) for o in data.get("offsets", [])), pieces)
        except (KeyError, TypeError, IndexError) as exc:
            raise MalformedInputError(f"bad fundamental domain JSON: {exc}") from exc


def load_domain(path) -> FundamentalDomainSet:
    with open(path) as fh:
        try:
            return FundamentalDomainSet.from_json(json.load(fh))
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"{path}: invalid JSON ({exc})") from exc


def common_fd_commensurable(L: Lattice, M: Lattice) -> FundamentalDomainSet:
    """Bounded common fundamental domain ``P_{L+M} + F1`` of two commensurable lattices.

    ``F1 = {l_i + m_i}`` pairs coset representatives of ``L/H`` and ``M/H``
    (``H = L ∩ M``) by list order.  A point ``x`` then has exactly one
    representative modulo ``L``: reduce mod ``L+M`` to the base cell, and the
    classes of ``L+M`` modulo ``L`` are hit once each by the ``m_i``.
    """
    vl, vm = volume(L), volume(M)
    if vl != vm:
        big, small = ("M", "L") if vm > vl else ("L", "M")
        raise VolumeMismatchError(
            f"vol(L) = {vl} but vol(M) = {vm}: a bounded common fundamental domain forces equal "
            f"volumes (index obstruction: after rescaling to integer lattices "
            f"[Z^d:{big}] > [Z^d:{small}])")
    H = intersect(L, M)
    ls = coset_representatives(L, H)
    ms = coset_representatives(M, H)
    k = index(L, H)
    assert len(ls) == len(ms) == k == index(M, H)
    offsets = tuple(tuple(a + b for a, b in zip(l, m)) for l, m in zip(ls, ms))
    G = lattice_sum(L, M)
    base = HalfOpenParallelepiped(G.vectors, None, CORNERED)
    return FundamentalDomainSet(L.dim, base, offsets, (), {"index": k, "sum": G, "meet": H})
