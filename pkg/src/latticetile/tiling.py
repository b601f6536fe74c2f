"""Checking that ``sum_λ 1_F(x - λ) = 1`` everywhere (exact) or at random points (Monte Carlo)."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import exact
from .domains import FundamentalDomainSet, reduce_mod
from .errors import FlavorMismatchError, MalformedInputError, NotBoundedError
from .lattice import (Lattice, box_coordinates, contains, coset_representatives, is_sublattice,
                      lattice_points_in_region, reduced_basis, volume)
from .polytope import Polytope

EXACT = "exact"
MONTECARLO = "montecarlo"
TILES = "tiles"
FAILS = "fails"
MAX_WITNESSES = 10
DYADIC_BITS = 20


@dataclass
class TilingReport:
    mode: str
    verdict: str
    histogram: dict            # multiplicity -> volume (exact) or sample count
    histogram_unit: str        # "volume" or "samples"
    witnesses: list            # points whose multiplicity is not 1
    evidence: str = ""         # "certified", "statistical-exact" or "empirical"
    method: str = ""
    sample_count: int = 0
    seed: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def tiles(self) -> bool:
        return self.verdict == TILES

    def to_json(self) -> dict:
        def num(v):
            return exact.format_rational(v) if isinstance(v, Fraction) else v

        def pt(p):
            return [num(x) if isinstance(x, Fraction) else float(x) for x in p]

        return {"mode": self.mode, "verdict": self.verdict, "method": self.method,
                "evidence": self.evidence, "histogram_unit": self.histogram_unit,
                "histogram": {str(k): num(v) for k, v in sorted(self.histogram.items())},
                "witnesses": [pt(w) for w in self.witnesses],
                "sample_count": self.sample_count, "seed": self.seed,
                "details": {k: num(v) for k, v in self.details.items()}}


# -- exact verification --------------------------------------------------------

def _residue_applicable(F: FundamentalDomainSet, lam: Lattice) -> bool:
    if F.base_cell is None or F.pieces or not F.offsets:
        return False
    base = F.base_cell.lattice
    f0 = F.offsets[0]
    if any(contains(base, [a - b for a, b in zip(f, f0)]) is None for f in F.offsets[1:]):
        return False
    return is_sublattice(lam, base)


def _verify_residue(F: FundamentalDomainSet, lam: Lattice) -> TilingReport:
    """Offsets of one base cell ``P'`` (lattice ``G'``), all congruent mod ``G'``, with ``Λ ⊆ G'``.

    ``x = f0 + p + γ`` uniquely; its multiplicity is the number of offsets
    ``f`` with ``f - f0 ≡ γ (mod Λ)``.  Each class of ``G'/Λ`` covers volume
    ``vol(G')`` of a period, so the whole multiplicity function is exact.
    """
    base = F.base_cell.lattice
    f0 = F.offsets[0]
    k = volume(lam) / volume(base)
    assert k.denominator == 1
    k = int(k)
    classes = Counter(reduce_mod([a - b for a, b in zip(f, f0)], lam)[0] for f in F.offsets)
    cell_vol = volume(base)
    mult = Counter(classes.values())
    missing = k - len(classes)
    if missing:
        mult[0] += missing
    histogram = {m: cell_vol * c for m, c in sorted(mult.items())}
    tiles = set(histogram) == {1}
    witnesses = []
    if not tiles:
        inner = F.base_cell.polytope.interior_point()
        bad = [r for r, c in sorted(classes.items()) if c != 1]
        if missing:
            bad += [r for r in coset_representatives(base, lam) if r not in classes][:MAX_WITNESSES]
        for r in bad[:MAX_WITNESSES]:
            witnesses.append(tuple(a + b + c for a, b, c in zip(f0, r, inner)))
    return TilingReport(EXACT, TILES if tiles else FAILS, histogram, "volume", witnesses,
                        "certified", "residue", details={"index": k, "classes": len(classes)})


def _compact(lam: Lattice) -> Lattice:
    """Same lattice with a reduced basis; the multiplicity function is Λ-periodic, so any cell will do."""
    return Lattice(reduced_basis(lam.vectors)) if lam.is_exact else lam


def reduce_components(components: list[Polytope], lam: Lattice) -> list[Polytope]:
    """Cut each component along the cells of ``Λ`` and move the chunks into the cornered cell."""
    cell = Polytope.parallelepiped(lam.vectors, None, "cornered")
    plo, phi = cell.bbox
    chunks = []
    for comp in components:
        if comp.bbox is None:
            continue
        clo, chi = comp.bbox
        lo = [a - b for a, b in zip(clo, phi)]
        hi = [a - b for a, b in zip(chi, plo)]
        for lp in lattice_points_in_region(lam, lo, hi):
            piece = comp.translate([-x for x in lp]).intersect(cell)
            if not piece.is_empty:
                chunks.append(piece)
    return chunks


def _dyadic_samples(lam: Lattice, n: int, seed: int):
    """``n`` points of the cornered cell with exact dyadic coordinates: (numerators, denominator)."""
    rng = np.random.default_rng(seed)
    d = lam.dim
    t = rng.integers(0, 2 ** DYADIC_BITS, size=(n, d), dtype=np.int64)
    den_a = exact.common_denominator([x for row in lam.matrix for x in row])
    a_int = [[int(x * den_a) for x in row] for row in lam.matrix]
    bound = max(sum(abs(x) for x in row) for row in a_int) * 2 ** DYADIC_BITS
    if bound < 2 ** 62:
        nums = t @ np.array(a_int, dtype=np.int64).T
    else:
        nums = t.astype(object) @ np.array(a_int, dtype=object).T
    return nums, den_a * 2 ** DYADIC_BITS


def _scaled_point(row, den) -> tuple:
    return tuple(Fraction(int(v), den) for v in row)


def _verify_chunks(F: FundamentalDomainSet, lam: Lattice, samples: int, seed: int) -> TilingReport:
    d = lam.dim
    lam = _compact(lam)
    chunks = reduce_components(F.components(), lam)
    target = volume(lam)
    details: dict = {"chunks": len(chunks)}
    witnesses: list = []

    vol_ok = True
    if d <= 3:
        total = sum((c.volume() for c in chunks), Fraction(0))
        details["volume_sum"] = total
        details["volume_target"] = target
        vol_ok = total == target

    boxes = [c.bbox for c in chunks]
    overlaps = 0
    heavy: dict[int, set] = {i: set() for i in range(len(chunks))}  # positive-volume overlaps
    for i in range(len(chunks)):
        for j in range(i + 1, len(chunks)):
            a, b = boxes[i], boxes[j]
            if any(a[1][k] < b[0][k] or b[1][k] < a[0][k] for k in range(d)):
                continue
            meet = chunks[i].intersect(chunks[j])
            if not meet.is_empty:
                overlaps += 1
                if len(witnesses) < MAX_WITNESSES:
                    witnesses.append(meet.interior_point())
                if d <= 3 and meet.volume() > 0:
                    heavy[i].add(j)
    details["overlapping_pairs"] = overlaps

    nums, den = _dyadic_samples(lam, samples, seed)
    counts = np.zeros(samples, dtype=np.int64)
    for c in chunks:
        counts += c.contains_scaled(nums, den)
    vals, freq = np.unique(counts, return_counts=True)
    sample_hist = {int(v): int(f) for v, f in zip(vals, freq)}
    for idx in np.flatnonzero(counts != 1)[: max(0, MAX_WITNESSES - len(witnesses))]:
        witnesses.append(_scaled_point(nums[idx], den))

    tiles = vol_ok and overlaps == 0 and set(sample_hist) == {1}
    exact_hist = _volume_histogram(chunks, heavy, target) if d <= 3 else None
    evidence = "certified" if d <= 3 else "statistical-exact"
    if exact_hist is None:
        return TilingReport(EXACT, TILES if tiles else FAILS, dict(sorted(sample_hist.items())), "samples",
                            witnesses, evidence, "chunks", samples, seed, details)
    details.update({f"samples_at_{k}": v for k, v in sorted(sample_hist.items())})
    return TilingReport(EXACT, TILES if tiles else FAILS, exact_hist, "volume",
                        witnesses, evidence, "chunks", samples, seed, details)


def _volume_histogram(chunks: list[Polytope], heavy: dict, cell_volume, cap: int = 20_000):
    """Exact volume of ``{x in cell : multiplicity(x) = k}`` by inclusion-exclusion.

    ``N_j`` sums the volumes of all ``j``-fold intersections; only cliques of
    the positive-volume overlap graph contribute.  Returns ``None`` past
    ``cap`` intersections.
    """
    N: dict[int, Fraction] = {}
    visited = 0

    def grow(poly, size, last):
        nonlocal visited
        visited += 1
        if visited > cap:
            raise OverflowError
        N[size] = N.get(size, Fraction(0)) + poly.volume()
        for j in sorted(heavy[last]):
            meet = poly.intersect(chunks[j])
            if meet.volume() > 0:
                grow(meet, size + 1, j)

    try:
        for i, c in enumerate(chunks):
            if c.volume() > 0:
                grow(c, 1, i)
    except OverflowError:
        return None
    top = max(N, default=0)
    hist = {}
    for k in range(1, top + 1):
        e = sum((-1) ** (j - k) * math.comb(j, k) * N[j] for j in range(k, top + 1) if j in N)
        if e:
            hist[k] = e
    rest = cell_volume - sum(hist.values())
    if rest:
        hist[0] = rest
    return dict(sorted(hist.items()))


def verify_exact_tiling(F: FundamentalDomainSet, lam: Lattice, *, samples: int = 10_000,
                        seed: int = 0, method: str = "auto") -> TilingReport:
    """Decide whether the translates ``F + λ`` (``λ ∈ Λ``) partition ``R^d`` exactly.

    ``method="residue"`` handles a base cell plus offsets lying in one coset
    of the base-cell lattice containing ``Λ``: a finite residue count that
    determines the multiplicity function everywhere.  ``method="chunks"``
    reduces every component into the cell of ``Λ`` and checks exact volume
    (``d <= 3``), pairwise disjointness and exact multiplicity at ``samples``
    dyadic points.
    """
    if not lam.is_exact:
        raise FlavorMismatchError("exact verification needs an exact lattice")
    if F.dim != lam.dim:
        from .errors import DimensionMismatchError
        raise DimensionMismatchError(f"set has dimension {F.dim}, lattice {lam.dim}")
    if method not in ("auto", "residue", "chunks"):
        raise MalformedInputError(f"unknown method {method!r}")
    if method != "chunks" and _residue_applicable(F, lam):
        return _verify_residue(F, lam)
    if method == "residue":
        raise MalformedInputError("residue method needs offsets of one base cell whose lattice contains Λ")
    return _verify_chunks(F, lam, samples, seed)


# -- Monte Carlo verification ---------------------------------------------------

def _float_points_in_box(lam: Lattice, lo, hi) -> np.ndarray:
    coords = box_coordinates(lam.float_matrix, lo, hi)
    pts = coords @ lam.float_matrix.T
    keep = np.all((pts >= np.asarray(lo) - 1e-9) & (pts <= np.asarray(hi) + 1e-9), axis=1)
    return pts[keep]


class _OffsetPredicate:
    """Vectorized multiplicity of a base cell plus offsets: floor the cell coordinates and look up."""

    def __init__(self, F: FundamentalDomainSet):
        cell = F.base_cell
        self.inv = np.array([[float(x) for x in row] for row in cell.lattice.inverse])
        self.shift = np.array([float(x) for x in cell.center]) @ self.inv.T
        self.start = -0.5 if cell.convention == "centered" else 0.0
        groups: dict = {}
        for f in F.offsets:
            w = cell.lattice.coords(f)
            frac = tuple(x - math.floor(x) for x in w)
            groups.setdefault(frac, Counter())[tuple(math.floor(x) for x in w)] += 1
        self.groups = [(np.array([float(x) for x in frac]), cnt) for frac, cnt in groups.items()]

    def __call__(self, y: np.ndarray) -> np.ndarray:
        u = y @ self.inv.T - self.shift - self.start
        out = np.zeros(len(y), dtype=np.int64)
        for frac, cnt in self.groups:
            k = np.floor(u - frac).astype(np.int64)
            keys = np.array(list(cnt.keys()), dtype=np.int64)
            vals = np.array(list(cnt.values()), dtype=np.int64)
            kmin = np.minimum(keys.min(0), 0)
            span = np.maximum(keys.max(0), 0) - kmin + 1
            inside = np.all((k >= kmin) & (k < kmin + span), axis=1)
            strides = np.cumprod(np.concatenate([[1], span[:-1]]))
            enc_keys = (keys - kmin) @ strides
            order = np.argsort(enc_keys)
            enc_sorted, vals_sorted = enc_keys[order], vals[order]
            enc = ((k - kmin) @ strides)[inside]
            pos = np.searchsorted(enc_sorted, enc)
            pos = np.minimum(pos, len(enc_sorted) - 1)
            hit = enc_sorted[pos] == enc
            add = np.where(hit, vals_sorted[pos], 0)
            out[np.flatnonzero(inside)] += add
        return out


def _domain_predicate(F: FundamentalDomainSet) -> Callable[[np.ndarray], np.ndarray]:
    parts = []
    if F.base_cell is not None and F.offsets:
        parts.append(_OffsetPredicate(F))
    for p in F.pieces:
        parts.append(lambda y, p=p: p.contains_float(y).astype(np.int64))

    def count(y):
        out = np.zeros(len(y), dtype=np.int64)
        for part in parts:
            out += part(y)
        return out

    return count


def verify_monte_carlo_tiling(F, lam: Lattice, n: int = 10_000, seed: int = 0, *,
                              radius: float | None = None, region=None) -> TilingReport:
    """Estimate the multiplicity histogram of ``Σ_λ 1_F(x - λ)`` at ``n`` uniform points.

    ``F`` is a :class:`FundamentalDomainSet` or a vectorized predicate
    (``(N, d)`` float array -> counts or booleans) together with ``radius``,
    a sup-norm bound for ``F``.  Points are drawn from the cornered cell of
    ``Λ``, or from the box ``region = (lo, hi)`` when given (local checks of
    windowed constructions).
    """
    d = lam.dim
    lam = _compact(lam)
    if isinstance(F, FundamentalDomainSet):
        pred = _domain_predicate(F)
        if F.bbox is None:
            raise NotBoundedError("empty set")
        flo = np.array([float(x) for x in F.bbox[0]])
        fhi = np.array([float(x) for x in F.bbox[1]])
    else:
        if radius is None:
            raise NotBoundedError("a predicate needs a bounding radius")
        pred = F
        flo, fhi = -np.full(d, float(radius)), np.full(d, float(radius))

    rng = np.random.default_rng(seed)
    if region is None:
        A = lam.float_matrix
        x = rng.random((n, d)) @ A.T
        corners = np.array([[0.0] * d]) if d == 0 else \
            np.array(np.meshgrid(*[[0.0, 1.0]] * d, indexing="ij")).reshape(d, -1).T @ A.T
        xlo, xhi = corners.min(0), corners.max(0)
    else:
        xlo, xhi = (np.array([float(v) for v in b]) for b in region)
        x = xlo + (xhi - xlo) * rng.random((n, d))
    cands = _float_points_in_box(lam, xlo - fhi, xhi - flo)

    counts = np.zeros(n, dtype=np.int64)
    batch = max(1, 400_000 // max(1, len(cands)))
    for s in range(0, n, batch):
        xs = x[s:s + batch]
        y = (xs[:, None, :] - cands[None, :, :]).reshape(-1, d)
        c = np.asarray(pred(y)).astype(np.int64).reshape(len(xs), len(cands))
        counts[s:s + batch] = c.sum(1)
    vals, freq = np.unique(counts, return_counts=True)
    hist = {int(v): int(f) for v, f in zip(vals, freq)}
    witnesses = [tuple(float(v) for v in x[i]) for i in np.flatnonzero(counts != 1)[:MAX_WITNESSES]]
    tiles = set(hist) == {1}
    return TilingReport(MONTECARLO, TILES if tiles else FAILS, dict(sorted(hist.items())), "samples",
                        witnesses, "empirical", "sampling", n, seed, {"candidates": len(cands)})
