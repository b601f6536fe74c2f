"""Deterministic SVG pictures of planar lattices, cells, pieces and domains.

Closed faces are drawn solid and open faces dashed.  Coordinates are exact
until the moment they are written, then printed with four decimals, so equal
inputs give byte-identical files.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from xml.sax.saxutils import escape

import numpy as np

from .domains import FundamentalDomainSet, HalfOpenParallelepiped
from .equidecomposition import Equidecomposition, Piece
from .errors import DimensionUnsupportedError, MalformedInputError
from .lattice import Lattice, lattice_points_in_region
from .polytope import Polytope, _order_planar

PALETTE = ("#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2",
           "#edc948", "#ff9da7", "#9c755f", "#bab0ac")


@dataclass
class Layer:
    obj: object
    stroke: str = "#333333"
    fill: str | None = None
    opacity: float = 0.45
    label: str | None = None


@dataclass
class RenderSpec:
    view_box: tuple | None = None     # (xmin, ymin, xmax, ymax) in world units
    layers: list = field(default_factory=list)
    dot_radius: float = 0.035
    scale: float = 120.0              # pixels per unit
    margin: float = 0.5


def _f(x) -> str:
    s = f"{float(x):.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _check2(obj, d):
    if d != 2:
        raise DimensionUnsupportedError(f"only planar objects can be drawn ({type(obj).__name__} has d={d})")


def _polytopes(obj) -> list[Polytope]:
    if isinstance(obj, Polytope):
        return [obj]
    if isinstance(obj, HalfOpenParallelepiped):
        return [obj.polytope]
    if isinstance(obj, Piece):
        return list(obj.cells)
    if isinstance(obj, FundamentalDomainSet):
        return obj.components()
    return []


def _expand(layer_like) -> list[Layer]:
    """Turn user objects into layers; an equidecomposition becomes cells plus coloured pieces."""
    if isinstance(layer_like, Layer):
        obj = layer_like.obj
        if isinstance(obj, Equidecomposition):
            return _expand(obj)
        return [layer_like]
    if isinstance(layer_like, Equidecomposition):
        e = layer_like
        out = [Layer(e.source, "#1f4e9c"), Layer(e.target, "#b22222")]
        for k, p in enumerate(e.pieces):
            out.append(Layer(p, PALETTE[k % len(PALETTE)], PALETTE[k % len(PALETTE)], 0.5))
        return out
    if isinstance(layer_like, FundamentalDomainSet):
        return [Layer(c, "#333333", PALETTE[k % len(PALETTE)], 0.5)
                for k, c in enumerate(layer_like.components())]
    if isinstance(layer_like, Lattice):
        return [Layer(layer_like, "#000000", "#000000")]
    return [Layer(layer_like)]


def _bounds(layers) -> tuple:
    pts = []
    for layer in layers:
        for p in _polytopes(layer.obj):
            pts.extend(p.vertices)
    if not pts:
        return (-2, -2, 2, 2)
    xs = [float(p[0]) for p in pts]
    ys = [float(p[1]) for p in pts]
    return (min(xs), min(ys), max(xs), max(ys))


def _edges(poly: Polytope):
    ring = _order_planar(poly.vertices, (0, 1))
    for a, b in zip(ring, ring[1:] + ring[:1]):
        mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        closed = True
        for n, iv in poly.slabs:
            v = n[0] * mid[0] + n[1] * mid[1]
            if v == iv.lo and n[0] * (a[0] - b[0]) + n[1] * (a[1] - b[1]) == 0:
                closed = iv.lo_closed
            elif v == iv.hi and n[0] * (a[0] - b[0]) + n[1] * (a[1] - b[1]) == 0:
                closed = iv.hi_closed
            else:
                continue
            break
        yield a, b, closed


def _lattice_dots(lat: Lattice, box, r) -> list[str]:
    x0, y0, x1, y1 = box
    if lat.is_exact:
        lo = (Fraction(x0).limit_denominator(10 ** 6), Fraction(y0).limit_denominator(10 ** 6))
        hi = (Fraction(x1).limit_denominator(10 ** 6), Fraction(y1).limit_denominator(10 ** 6))
        pts = sorted(lattice_points_in_region(lat, lo, hi))
    else:
        from .tiling import _float_points_in_box
        arr = _float_points_in_box(lat, [x0, y0], [x1, y1])
        pts = sorted(map(tuple, np.round(arr, 9)))
    return [f'<circle cx="{_f(p[0])}" cy="{_f(p[1])}" r="{_f(r)}"/>' for p in pts]


def render_svg(objects, spec: RenderSpec | None = None) -> str:
    """Draw planar objects (lattices, cells, pieces, equidecompositions, domains) as SVG 1.1."""
    spec = spec or RenderSpec()
    items = list(spec.layers) + list(objects if isinstance(objects, (list, tuple)) else [objects])
    layers = [layer for item in items for layer in _expand(item)]
    for layer in layers:
        d = layer.obj.dim if hasattr(layer.obj, "dim") else None
        if d is None:
            raise MalformedInputError(f"cannot render {type(layer.obj).__name__}")
        _check2(layer.obj, d)
    if spec.view_box is None:
        x0, y0, x1, y1 = _bounds(layers)
        m = spec.margin
        box = (x0 - m, y0 - m, x1 + m, y1 + m)
    else:
        box = tuple(float(v) for v in spec.view_box)
    if not (box[2] > box[0] and box[3] > box[1]):
        raise MalformedInputError("degenerate view box")
    w, h = box[2] - box[0], box[3] - box[1]
    s = spec.scale
    lw = 1.5 / s
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(w * s)}" '
           f'height="{_f(h * s)}" viewBox="{_f(box[0])} {_f(-box[3])} {_f(w)} {_f(h)}">',
           '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" '
           'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#222222"/></marker></defs>',
           '<g transform="scale(1,-1)">']
    for k, layer in enumerate(layers):
        obj = layer.obj
        if isinstance(obj, Lattice):
            out.append(f'<g id="layer{k}" fill="{layer.fill or layer.stroke}">')
            if layer.label:
                out.append(f"<title>{escape(layer.label)}</title>")
            out.extend(_lattice_dots(obj, box, spec.dot_radius))
            out.append("</g>")
            continue
        out.append(f'<g id="layer{k}">')
        if layer.label:
            out.append(f"<title>{escape(layer.label)}</title>")
        for poly in _polytopes(obj):
            if poly.is_empty or poly.affine_rank < 2:
                continue
            ring = _order_planar(poly.vertices, (0, 1))
            if layer.fill:
                pts = " ".join(f"{_f(p[0])},{_f(p[1])}" for p in ring)
                out.append(f'<polygon points="{pts}" fill="{layer.fill}" '
                           f'fill-opacity="{_f(layer.opacity)}" stroke="none"/>')
            for a, b, closed in _edges(poly):
                dash = "" if closed else f' stroke-dasharray="{_f(4 * lw)},{_f(3 * lw)}"'
                out.append(f'<line x1="{_f(a[0])}" y1="{_f(a[1])}" x2="{_f(b[0])}" y2="{_f(b[1])}" '
                           f'stroke="{layer.stroke}" stroke-width="{_f(lw)}"{dash}/>')
        if isinstance(obj, Piece) and any(obj.g):
            c = obj.cells[0].centroid
            tip = (c[0] + obj.g[0], c[1] + obj.g[1])
            out.append(f'<line x1="{_f(c[0])}" y1="{_f(c[1])}" x2="{_f(tip[0])}" y2="{_f(tip[1])}" '
                       f'stroke="#222222" stroke-width="{_f(lw)}" marker-end="url(#arrow)"/>')
        out.append("</g>")
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
