"""Exact ``(L+M)``-equidecomposition of two fundamental cells, and the common domain it yields.

Let ``G = L + M`` and ``Q`` its cornered cell.  Every ``x`` in ``P_L`` is
uniquely ``q + γ`` with ``q ∈ Q`` and ``γ ∈ G``; the class of ``γ`` modulo
``L`` picks (through a fixed pairing of ``G/L`` with ``G/M``) a coset
``c' + M``, and ``x`` is sent to the unique ``q + γ'`` of ``P_M`` with
``γ' ∈ c' + M``.  Grouping points by their translation ``g = γ' - γ`` gives
finitely many half-open pieces.  Each piece is a disjoint union of convex
cells ``P_L ∩ (Q + γ) ∩ (P_M - g)``.

When ``L = M`` this is just ``S_g = P_L ∩ (P_M - g)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import exact
from .domains import CENTERED, CORNERED, FundamentalDomainSet, HalfOpenParallelepiped, reduce_mod
from .errors import MalformedInputError, OverlapDetectedError, PreconditionError, VolumeMismatchError
from .lattice import Lattice, coset_representatives, intersect, lattice_points_in_region, lattice_sum, volume
from .polytope import Polytope


@dataclass(frozen=True)
class Piece:
    cells: tuple          # disjoint Polytopes; their union is the piece
    g: tuple              # translation carrying the piece into the target cell
    l: tuple
    m: tuple
    g_coords: tuple = ()  # coordinates of g in the basis of L+M

    @property
    def dim(self) -> int:
        return len(self.g)

    def __contains__(self, x) -> bool:
        return any(x in c for c in self.cells)

    def volume(self):
        return piece_volume(self)

    def translated(self, v=None) -> "Piece":
        v = self.g if v is None else v
        return Piece(tuple(c.translate(v) for c in self.cells), self.g, self.l, self.m, self.g_coords)

    def to_json(self) -> dict:
        fmt = exact.format_rational
        return {"g": [fmt(x) for x in self.g], "g_latticeCoords": list(self.g_coords),
                "l": [fmt(x) for x in self.l], "m": [fmt(x) for x in self.m],
                "cells": [{"constraints": c.to_json()} for c in self.cells]}

    @classmethod
    def from_json(cls, dim: int, data: dict) -> "Piece":
        try:
            cells = data["cells"] if "cells" in data else [{"constraints": data["constraints"]}]
            polys = tuple(Polytope.from_json(dim, c["constraints"]) for c in cells)
            l = tuple(exact.to_rational(x) for x in data["l"])
            m = tuple(exact.to_rational(x) for x in data["m"])
            g = tuple(exact.to_rational(x) for x in data["g"]) if "g" in data else \
                tuple(a + b for a, b in zip(l, m))
            return cls(polys, g, l, m, tuple(data.get("g_latticeCoords", ())))
        except (KeyError, TypeError) as exc:
            raise MalformedInputError(f"bad piece: {exc}") from exc


def piece_volume(piece: Piece, **kw):
    """Exact for ``d <= 3``; a ``(estimate, stderr)`` pair otherwise."""
    vols = [c.volume(**kw) for c in piece.cells]
    if piece.dim <= 3:
        return sum(vols, Fraction(0))
    return sum(v for v, _ in vols), sum(e * e for _, e in vols) ** 0.5


def _cell_json(cell: HalfOpenParallelepiped) -> dict:
    fmt = exact.format_rational
    return {"basis": [[fmt(x) for x in v] for v in cell.vectors],
            "center": [fmt(x) for x in cell.center], "convention": cell.convention}


def _cell_from_json(data) -> HalfOpenParallelepiped:
    try:
        return HalfOpenParallelepiped(tuple(tuple(r) for r in data["basis"]), data.get("center"),
                                      data.get("convention", CENTERED))
    except (KeyError, TypeError) as exc:
        raise MalformedInputError(f"bad cell description: {exc}") from exc


@dataclass(frozen=True)
class Equidecomposition:
    source: HalfOpenParallelepiped
    target: HalfOpenParallelepiped
    pieces: tuple

    @property
    def dim(self) -> int:
        return self.source.dim

    @property
    def translations(self) -> list[tuple]:
        return [p.g for p in self.pieces]

    def to_json(self) -> dict:
        return {"dim": self.dim, "source": _cell_json(self.source), "target": _cell_json(self.target),
                "pieces": [p.to_json() for p in self.pieces]}

    @classmethod
    def from_json(cls, data) -> "Equidecomposition":
        if isinstance(data, str):
            data = json.loads(data)
        if isinstance(data, list):
            # bare piece list: the cells must be supplied separately
            raise MalformedInputError("equidecomposition JSON needs 'source' and 'target' cells")
        try:
            source = _cell_from_json(data["source"])
            target = _cell_from_json(data["target"])
            pieces = tuple(Piece.from_json(source.dim, p) for p in data["pieces"])
        except (KeyError, TypeError) as exc:
            raise MalformedInputError(f"bad equidecomposition JSON: {exc}") from exc
        return cls(source, target, pieces)


def _neighbours(G: Lattice, cell: Polytope, Q: Polytope) -> list[tuple]:
    """Points ``γ`` of ``G`` with ``(Q + γ) ∩ cell`` possibly nonempty."""
    (clo, chi), (qlo, qhi) = cell.bbox, Q.bbox
    lo = [a - b for a, b in zip(clo, qhi)]
    hi = [a - b for a, b in zip(chi, qlo)]
    return lattice_points_in_region(G, lo, hi)


def equidecompose(L: Lattice, M: Lattice, P_L: HalfOpenParallelepiped | None = None,
                  P_M: HalfOpenParallelepiped | None = None) -> Equidecomposition:
    """Partition ``P_L`` into pieces whose ``(L+M)``-translates partition ``P_M``."""
    if volume(L) != volume(M):
        raise VolumeMismatchError(f"vol(L) = {volume(L)} differs from vol(M) = {volume(M)}")
    P_L = P_L or HalfOpenParallelepiped(L.vectors, None, CENTERED)
    P_M = P_M or HalfOpenParallelepiped(M.vectors, None, CENTERED)
    if P_L.lattice != L or P_M.lattice != M:
        raise PreconditionError("cells must be spanned by bases of L and M")
    G = lattice_sum(L, M)
    H = intersect(L, M)
    Q = Polytope.parallelepiped(G.vectors, None, CORNERED)
    src, dst = P_L.polytope, P_M.polytope

    # pair the classes of G/L with those of G/M by canonical list order
    cls_L = {rep: i for i, rep in enumerate(coset_representatives(G, L))}
    cls_M = {rep: i for i, rep in enumerate(coset_representatives(G, M))}
    targets: dict[int, list] = {}
    for gp in _neighbours(G, dst, Q):
        if not dst.intersect(Q.translate(gp)).is_empty:
            targets.setdefault(cls_M[reduce_mod(gp, M)[0]], []).append(gp)

    # section of G/L inside M: the class of g mod L determines m
    section = {reduce_mod(m, L)[0]: m for m in coset_representatives(M, H)}

    cells: dict[tuple, list] = {}
    for gam in _neighbours(G, src, Q):
        cell0 = src.intersect(Q.translate(gam))
        if cell0.is_empty:
            continue
        for gp in targets.get(cls_L[reduce_mod(gam, L)[0]], ()):
            g = tuple(a - b for a, b in zip(gp, gam))
            cell = cell0.intersect(dst.translate([-x for x in g]))
            if not cell.is_empty:
                cells.setdefault(g, []).append(cell)

    pieces = []
    for g, cs in cells.items():
        m = section[reduce_mod(g, L)[0]]
        l = tuple(a - b for a, b in zip(g, m))
        coords = tuple(int(x) for x in G.coords(g))
        pieces.append(Piece(tuple(cs), g, l, m, coords))
    pieces.sort(key=lambda p: p.g_coords)
    return Equidecomposition(P_L, P_M, tuple(pieces))


def _overlaps(polys: list[Polytope]):
    boxes = [p.bbox for p in polys]
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            a, b = boxes[i], boxes[j]
            if a is None or b is None:
                continue
            if any(a[1][k] < b[0][k] or b[1][k] < a[0][k] for k in range(len(a[0]))):
                continue
            meet = polys[i].intersect(polys[j])
            if not meet.is_empty:
                return i, j, meet.interior_point()
    return None


def common_fd_from_equidecomposition(e: Equidecomposition, check: bool = True) -> FundamentalDomainSet:
    """``F = ⋃ (S_g + l_g)``: a bounded fundamental domain of both lattices."""
    cells = [c.translate(p.l) for p in e.pieces for c in p.cells]
    if check:
        hit = _overlaps(cells)
        if hit is not None:
            i, j, x = hit
            raise OverlapDetectedError(f"translated cells {i} and {j} share the point {x}")
    return FundamentalDomainSet(e.dim, None, (), tuple(cells))


def load_equidecomposition(path) -> Equidecomposition:
    with open(path) as fh:
        try:
            return Equidecomposition.from_json(json.load(fh))
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"{path}: invalid JSON ({exc})") from exc
