"""Finite-window stand-ins for bounded bijections between lattices.

Everything here is empirical: windows of radius ``R`` are matched with a
bottleneck (min-max) objective, and the reported constants are the ones
achieved on the window.  Distances are Euclidean and computed in floats.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial import cKDTree

from . import exact
from .errors import CapExceededError, DetNotOneError, MalformedInputError, VolumeMismatchError
from .lattice import Lattice, LatticePoint, box_coordinates, volume

DEFAULT_CAP = 10 ** 6
FLOAT_TOL = 1e-9


# -- windows ----------------------------------------------------------------------

@dataclass
class PointWindow:
    lattice: Lattice
    radius: object
    coords: np.ndarray   # integer coordinates, one row per point

    def __len__(self):
        return len(self.coords)

    @property
    def array(self) -> np.ndarray:
        return self.coords @ self.lattice.float_matrix.T

    @property
    def points(self) -> list[LatticePoint]:
        if self.lattice.is_exact:
            return [LatticePoint(self.lattice.point(tuple(int(v) for v in c)), tuple(int(v) for v in c))
                    for c in self.coords]
        return [LatticePoint(tuple(p), tuple(int(v) for v in c)) for p, c in zip(self.array, self.coords)]


def lattice_points_in_box(lat: Lattice, R, cap: int = DEFAULT_CAP) -> PointWindow:
    """All points ``p`` of ``lat`` with ``||p||_inf <= R``."""
    if R <= 0:
        raise MalformedInputError("radius must be positive")
    d = lat.dim
    estimate = (2 * float(R)) ** d / float(volume(lat))
    if estimate > cap:
        raise CapExceededError(f"about {estimate:.3g} points in the window, cap is {cap}")
    grid = box_coordinates(lat.float_matrix, [-float(R)] * d, [float(R)] * d, cap=50 * cap + 10 ** 6)
    if lat.is_exact:
        R = exact.to_rational(R) if not isinstance(R, float) else Fraction(R)
        den = exact.common_denominator([x for row in lat.matrix for x in row])
        a_int = np.array([[int(x * den) for x in row] for row in lat.matrix], dtype=object)
        vals = grid.astype(object) @ a_int.T
        limit = R.numerator * den
        keep = np.all(np.abs(vals) * R.denominator <= limit, axis=1).astype(bool)
    else:
        vals = grid @ lat.float_matrix.T
        keep = np.all(np.abs(vals) <= float(R), axis=1)
    coords = grid[keep]
    if len(coords) > cap:
        raise CapExceededError(f"{len(coords)} points in the window, cap is {cap}")
    return PointWindow(lat, R, coords)


# -- bottleneck matching ------------------------------------------------------------

@dataclass
class BoundedBijection:
    pairs: list            # (index into A, index into B)
    bound: float           # max matched Euclidean distance
    deficiency: int = 0    # sources left unmatched
    sources: np.ndarray = None
    targets: np.ndarray = None

    def displacements(self) -> np.ndarray:
        if not self.pairs:
            return np.zeros((0, self.sources.shape[1] if self.sources is not None else 0))
        i, j = np.array(self.pairs).T
        return self.targets[j] - self.sources[i]


def _as_points(P) -> np.ndarray:
    arr = np.asarray(P, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr


def _dist(A, B, i, j) -> np.ndarray:
    return np.sqrt(((A[i] - B[j]) ** 2).sum(-1))


def _edges(A, B, ta: cKDTree, tb: cKDTree, t: float):
    """Pairs within distance ``t``; distances recomputed so every caller sees the same floats."""
    rec = ta.sparse_distance_matrix(tb, t * (1 + 1e-9) + 1e-12, output_type="ndarray")
    i, j = rec["i"], rec["j"]
    v = _dist(A, B, i, j)
    keep = v <= t
    return i[keep], j[keep], v[keep]


def _threshold_graph(A, B, ta, tb, t: float) -> csr_matrix:
    i, j, _ = _edges(A, B, ta, tb, t)
    return csr_matrix((np.ones(len(i), dtype=np.int8), (i, j)), shape=(len(A), len(B)))


def _match(graph: csr_matrix) -> np.ndarray:
    return maximum_bipartite_matching(graph, perm_type="column")


def bottleneck_matching(A, B, cap: int = DEFAULT_CAP) -> BoundedBijection:
    """Match every point of the smaller set, minimizing the largest matched distance."""
    A, B = _as_points(A), _as_points(B)
    if len(A) > cap or len(B) > cap:
        raise CapExceededError(f"point sets of size {len(A)}, {len(B)} exceed cap {cap}")
    if len(A) > len(B):
        res = bottleneck_matching(B, A, cap)
        return BoundedBijection([(j, i) for i, j in res.pairs], res.bound,
                                len(A) - len(res.pairs), A, B)
    if len(A) == 0:
        return BoundedBijection([], 0.0, 0, A, B)
    ta, tb = cKDTree(A), cKDTree(B)
    na, nb = len(A), len(B)

    def feasible(t):
        m = _match(_threshold_graph(A, B, ta, tb, t))
        return m if np.all(m >= 0) else None

    nearest = tb.query(A)[1]
    lo = float(_dist(A, B, np.arange(na), nearest).max())   # every source needs some target
    best = feasible(lo)
    if best is None:
        below, hi = lo, (lo * 1.5 if lo > 0 else 1.0)
        while feasible(hi) is None:
            below, hi = hi, hi * 2
        # the optimum is a pairwise distance in (below, hi]
        cands = np.unique(_edges(A, B, ta, tb, hi)[2])
        cands = cands[cands > below]
        i, j = 0, len(cands) - 1
        while i < j:
            mid = (i + j) // 2
            if feasible(float(cands[mid])) is None:
                i = mid + 1
            else:
                j = mid
        best = feasible(float(cands[i]))
    pairs = [(i, int(j)) for i, j in enumerate(best)]
    bound = max(float(_dist(A, B, i, j)) for i, j in pairs)
    return BoundedBijection(pairs, bound, 0, A, B)


# -- Hall / König -------------------------------------------------------------------

@dataclass
class HallReport:
    deficiency: int
    matching_size: int
    witness: list          # S ⊆ A (indices) with |N(S)| = |S| - deficiency
    neighbours: list       # N(S) (indices into B)


def hall_deficiency(A, B, threshold: float) -> HallReport:
    """Maximum matching in the ``d <= threshold`` graph and a König witness for the shortfall."""
    A, B = _as_points(A), _as_points(B)
    na, nb = len(A), len(B)
    if na == 0:
        return HallReport(0, 0, [], [])
    if nb == 0:
        return HallReport(na, 0, list(range(na)), [])
    graph = _threshold_graph(A, B, cKDTree(A), cKDTree(B), threshold)
    match_a = _match(graph)
    size = int((match_a >= 0).sum())
    match_b = np.full(nb, -1)
    for i, j in enumerate(match_a):
        if j >= 0:
            match_b[j] = i
    # alternating search from the unmatched sources
    seen_a = set(int(i) for i in np.flatnonzero(match_a < 0))
    seen_b: set = set()
    frontier = list(seen_a)
    indptr, indices = graph.indptr, graph.indices
    while frontier:
        nxt = []
        for i in frontier:
            for j in indices[indptr[i]:indptr[i + 1]]:
                j = int(j)
                if j in seen_b:
                    continue
                seen_b.add(j)
                k = int(match_b[j])
                if k >= 0 and k not in seen_a:
                    seen_a.add(k)
                    nxt.append(k)
        frontier = nxt
    return HallReport(na - size, size, sorted(seen_a), sorted(seen_b))


# -- windowed constructions ------------------------------------------------------------

@dataclass
class WindowReport:
    R: float
    bottleneck: float
    deficiency: int
    F1_points: np.ndarray            # distinct points of F1 in the window (rounded to 1e-9)
    multiplicities: list
    limit: float
    max_observed: float
    sources: int = 0
    targets: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def bound_ok(self) -> bool:
        return self.max_observed <= self.limit + FLOAT_TOL

    def to_json(self) -> dict:
        return {"R": float(self.R), "bottleneck": self.bottleneck, "deficiency": self.deficiency,
                "F1_points": [[float(x) for x in p] for p in self.F1_points],
                "bound_check": {"limit": self.limit, "max_observed": self.max_observed}}


def _distinct(points: np.ndarray):
    if len(points) == 0:
        return points, []
    keys = Counter(tuple(np.round(p, 9) + 0.0) for p in points)
    items = sorted(keys.items())
    return np.array([k for k, _ in items]), [c for _, c in items]


def default_margin(*lats: Lattice) -> float:
    """Twice the longest basis vector: a crude covering-radius bound."""
    return 2 * max(float(np.linalg.norm(lat.float_matrix, axis=0).max()) for lat in lats)


def _same_volume(L: Lattice, M: Lattice):
    vl, vm = volume(L), volume(M)
    if L.is_exact and M.is_exact:
        ok = vl == vm
    else:
        ok = abs(float(vl) - float(vm)) <= FLOAT_TOL * max(1.0, abs(float(vl)))
    if not ok:
        raise VolumeMismatchError(f"vol(L) = {vl} but vol(M) = {vm}; windows cannot match with bounded "
                                  "displacement")


def direct_sum_common_fd_window(L: Lattice, M: Lattice, R, margin: float | None = None,
                                cap: int = DEFAULT_CAP) -> WindowReport:
    """Match the ``L``-points of the box ``R`` into the ``M``-points of the box ``R + margin``.

    ``F1 = {l - φ(l)}`` over the window.  Assumes ``L ∩ M = {0}``, which the
    caller asserts.
    """
    _same_volume(L, M)
    margin = default_margin(M) if margin is None else margin
    src = lattice_points_in_box(L, R, cap)
    dst = lattice_points_in_box(M, float(R) + margin, cap)
    A, B = src.array, dst.array
    bij = bottleneck_matching(A, B, cap)
    disp = np.array([A[i] - B[j] for i, j in bij.pairs]) if bij.pairs else np.zeros((0, L.dim))
    norms = np.linalg.norm(disp, axis=1) if len(disp) else np.zeros(0)
    pts, mult = _distinct(disp)
    return WindowReport(float(R), bij.bound, bij.deficiency, pts, mult, bij.bound,
                        float(norms.max()) if len(norms) else 0.0, len(A), len(B))


def window_deficiency(L: Lattice, M: Lattice, R, threshold: float, margin: float | None = None,
                      cap: int = DEFAULT_CAP) -> HallReport:
    """Hall deficiency of the ``L``-window against the padded ``M``-window at a fixed distance."""
    margin = default_margin(M) if margin is None else margin
    A = lattice_points_in_box(L, R, cap).array
    B = lattice_points_in_box(M, float(R) + margin, cap).array
    return hall_deficiency(A, B, threshold)


def _as_matrix(rows, name) -> tuple[list, bool]:
    rows = [list(r) for r in rows]
    flat = [x for r in rows for x in r]
    is_exact = not any(isinstance(x, float) or isinstance(x, np.floating) for x in flat)
    if is_exact:
        rows = [[exact.to_rational(x) for x in r] for r in rows]
    else:
        rows = [[float(x) for x in r] for r in rows]
    if rows and len({len(r) for r in rows}) != 1:
        raise MalformedInputError(f"{name} is ragged")
    return rows, is_exact


def _round_half_down(c: np.ndarray) -> np.ndarray:
    """Nearest integer, ties toward -inf."""
    return np.ceil(c - 0.5)


def case3_common_fd_window(B, C, R, margin: float | None = None, cap: int = DEFAULT_CAP) -> WindowReport:
    """Window of ``F1 = {φ(π(m)) - m + k_m : m ∈ M1}`` for ``M = [[B, 0], [C, I_r]] Z^d`` against ``Z^d``.

    ``B`` is ``(d-r)x(d-r)`` with ``|det B| = 1``; ``C`` is ``r x (d-r)``.
    ``π`` drops the last ``r`` coordinates, ``φ`` is a bottleneck matching of
    ``π(M1)`` into ``Z^{d-r}``, and ``k_m = (0, round(C x))``.
    """
    Bm, b_exact = _as_matrix(B, "B")
    Cm, c_exact = _as_matrix(C, "C")
    s = len(Bm)
    if s == 0 or any(len(r) != s for r in Bm):
        raise MalformedInputError("B must be a nonempty square matrix")
    if any(len(r) != s for r in Cm):
        raise MalformedInputError("C must have as many columns as B")
    r = len(Cm)
    if b_exact:
        det = exact.det(Bm)
        if abs(det) != 1:
            raise DetNotOneError(f"|det B| = {abs(det)}, expected 1")
        lat1 = Lattice(tuple(zip(*Bm)))
    else:
        det = float(np.linalg.det(np.array(Bm)))
        if abs(abs(det) - 1) > FLOAT_TOL:
            raise DetNotOneError(f"|det B| = {abs(det):.12g}, expected 1 (tolerance {FLOAT_TOL})")
        lat1 = Lattice(tuple(zip(*Bm)), "approx")
    Zs = Lattice.integer(s)
    margin = default_margin(lat1) if margin is None else margin
    win = lattice_points_in_box(lat1, R, cap)
    x = win.coords
    bx = win.array
    cx = x @ np.array([[float(v) for v in row] for row in Cm]).T if r else np.zeros((len(x), 0))
    if c_exact and r:
        cm = [[exact.to_rational(v) for v in row] for row in Cm]
        k = np.array([[math.ceil(sum(row[j] * int(xi[j]) for j in range(s)) - Fraction(1, 2))
                       for row in cm] for xi in x], dtype=float).reshape(len(x), r)
    else:
        k = _round_half_down(cx)
    targets = lattice_points_in_box(Zs, float(R) + margin, cap).array
    bij = bottleneck_matching(bx, targets, cap)
    phi = np.empty_like(bx)
    for i, j in bij.pairs:
        phi[i] = targets[j]
    out = np.hstack([phi - bx, k - cx])
    norms = np.linalg.norm(out, axis=1) if len(out) else np.zeros(0)
    pts, mult = _distinct(out)
    return WindowReport(float(R), bij.bound, bij.deficiency, pts, mult, bij.bound + r,
                        float(norms.max()) if len(norms) else 0.0, len(bx), len(targets),
                        {"r": r, "det": det})


# -- G-uniformity --------------------------------------------------------------------

@dataclass
class GUniformityReport:
    ks: list
    min_density: dict           # k -> min over samples of |A ∩ (F_k + x)| / k^r
    mean_density: dict
    generators: list
    rank: int
    samples: int
    seed: int

    @property
    def overall_min(self) -> float:
        return min(self.min_density.values()) if self.min_density else 0.0

    def relative_spread(self) -> float:
        vals = list(self.min_density.values())
        lo = min(vals)
        return math.inf if lo <= 0 else (max(vals) - lo) / lo

    def to_json(self) -> dict:
        return {"ks": self.ks, "min_density": {str(k): v for k, v in self.min_density.items()},
                "mean_density": {str(k): v for k, v in self.mean_density.items()},
                "generators": self.generators, "rank": self.rank, "samples": self.samples,
                "seed": self.seed, "relative_spread": self.relative_spread()}


def g_uniform_probe(A: Callable[[np.ndarray], np.ndarray], generators: Sequence[Sequence[float]],
                    ks: Sequence[int] = (20, 40, 80), samples: int = 200, seed: int = 0,
                    H: Lattice | None = None) -> GUniformityReport:
    """Count orbit points ``x + Σ n_i m_i`` (``0 <= n_i < k``) landing in ``A`` on the torus ``R^d / H``.

    ``A`` takes an ``(N, d)`` array of points of the cornered cell of ``H``
    and returns booleans.
    """
    gens = _as_points(generators)
    if gens.ndim != 2:
        raise MalformedInputError("generators must be a list of vectors")
    r, d = gens.shape
    H = H or Lattice.integer(d)
    Hm, Hinv = H.float_matrix, H.float_inverse

    def reduce(y):
        t = y @ Hinv.T
        return (t - np.floor(t)) @ Hm.T

    rng = np.random.default_rng(seed)
    xs = reduce(rng.random((samples, d)) @ Hm.T)
    mins, means = {}, {}
    for k in ks:
        grid = np.array(list(product(range(k), repeat=r)), dtype=float)
        orbit = grid @ gens
        counts = np.empty(samples)
        for s, x in enumerate(xs):
            counts[s] = np.count_nonzero(A(reduce(orbit + x)))
        mins[k] = float(counts.min() / k ** r)
        means[k] = float(counts.mean() / k ** r)
    return GUniformityReport(list(ks), mins, means, gens.tolist(), r, samples, seed)


def ball_predicate(center, radius: float, H: Lattice | None = None) -> Callable[[np.ndarray], np.ndarray]:
    """Membership in a Euclidean ball on the torus ``R^d / H`` (distance to the nearest translate)."""
    center = np.asarray(center, dtype=float)
    d = len(center)
    H = H or Lattice.integer(d)
    shifts = np.array(list(product((-1, 0, 1), repeat=d)), dtype=float) @ H.float_matrix.T

    def pred(y):
        diff = y[:, None, :] - center[None, None, :] - shifts[None, :, :]
        return (np.linalg.norm(diff, axis=2) <= radius).any(1)

    return pred
