import random
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latticetile.domains import CORNERED, FundamentalDomainSet, HalfOpenParallelepiped, common_fd_commensurable
from latticetile.errors import MalformedInputError
from latticetile.lattice import Lattice, volume
from latticetile.polytope import Interval, Polytope
from latticetile.tiling import verify_exact_tiling, verify_monte_carlo_tiling

from _gen import commensurable_pair
from _oracles import brute_multiplicity

Z2 = Lattice.integer(2)
M_HALF = Lattice(((Fr(1, 2), 0), (0, 2)))
UNIT = HalfOpenParallelepiped(((1, 0), (0, 1)), None, CORNERED)


def box(x0, x1, y0, y1):
    return Polytope.from_constraints(2, [((1, 0), Interval(Fr(x0), Fr(x1))), ((0, 1), Interval(Fr(y0), Fr(y1)))])


def test_unit_square_tiles_z2():
    F = FundamentalDomainSet(2, UNIT, ((0, 0),))
    for method in ("auto", "residue", "chunks"):
        r = verify_exact_tiling(F, Z2, method=method)
        assert r.tiles and set(r.histogram) == {1}


def test_two_disjoint_squares_double_cover():
    # [0,1)^2 together with [2,5/2) x [0,1)
    F = FundamentalDomainSet(2, UNIT, ((0, 0),), (box(2, Fr(5, 2), 0, 1),))
    r = verify_exact_tiling(F, Z2)
    assert not r.tiles
    assert r.histogram == {1: Fr(1, 2), 2: Fr(1, 2)}
    assert r.witnesses and all(brute_multiplicity(F, Z2, w) != 1 for w in r.witnesses)


def test_gap_is_reported():
    F = FundamentalDomainSet(2, None, (), (box(0, 1, 0, Fr(1, 2)),))
    r = verify_exact_tiling(F, Z2)
    assert not r.tiles and r.histogram == {0: Fr(1, 2), 1: Fr(1, 2)}
    assert all(brute_multiplicity(F, Z2, w) == 0 for w in r.witnesses)


def test_common_fd_tiles_both():
    F = common_fd_commensurable(Z2, M_HALF)
    for lam in (Z2, M_HALF):
        r = verify_exact_tiling(F, lam)
        assert r.tiles, r.to_json()
        assert verify_monte_carlo_tiling(F, lam, n=4000).tiles


def test_monte_carlo_reports_witnesses():
    F = FundamentalDomainSet(2, UNIT, ((0, 0), (Fr(1, 2), 0)))
    r = verify_monte_carlo_tiling(F, Z2, n=2000, seed=3)
    assert not r.tiles and r.histogram_unit == "samples"
    assert sum(r.histogram.values()) == 2000
    for w in r.witnesses:
        assert brute_multiplicity(F, Z2, tuple(Fr(v) for v in w)) == 2


def test_monte_carlo_accepts_a_predicate():
    def square(y):
        return ((y >= 0) & (y < 1)).all(axis=1).astype(int)
    assert verify_monte_carlo_tiling(square, Z2, n=1000, radius=1, region=((0, 0), (1, 1))).tiles


def test_report_json_is_plain():
    r = verify_exact_tiling(FundamentalDomainSet(2, UNIT, ((0, 0),)), Z2)
    data = r.to_json()
    assert data["verdict"] == "tiles" and data["histogram"] == {"1": "1"}


def test_unknown_method():
    with pytest.raises(MalformedInputError):
        verify_exact_tiling(FundamentalDomainSet(2, UNIT, ((0, 0),)), Z2, method="guess")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from((1, 2, 3)))
def test_residue_and_chunk_paths_agree(seed, d):
    L, M = commensurable_pair(random.Random(seed), d, 6, tries=60)
    F = common_fd_commensurable(L, M)
    for lam in (L, M):
        a = verify_exact_tiling(F, lam, method="residue")
        b = verify_exact_tiling(F, lam, method="chunks", samples=400)
        assert a.tiles and b.tiles


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from((1, 2)))
def test_dropping_an_offset_leaves_a_gap(seed, d):
    L, M = commensurable_pair(random.Random(seed), d, 6, tries=60)
    F = common_fd_commensurable(L, M)
    if len(F.offsets) < 2:
        return
    G = FundamentalDomainSet(d, F.base_cell, F.offsets[1:])
    r = verify_exact_tiling(G, L)
    assert not r.tiles and 0 in r.histogram
    assert verify_monte_carlo_tiling(G, L, n=3000, seed=seed).verdict == r.verdict


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_exact_witnesses_agree_with_brute_force(seed):
    rng = random.Random(seed)
    L, M = commensurable_pair(rng, 2, 5, tries=60)
    F = common_fd_commensurable(L, M)
    shift = tuple(Fr(rng.randint(-3, 3), 4) for _ in range(2))
    bad = FundamentalDomainSet(2, F.base_cell, F.offsets + (tuple(a + b for a, b in zip(F.offsets[0], shift)),))
    r = verify_exact_tiling(bad, L)
    assert not r.tiles
    for w in r.witnesses:
        assert brute_multiplicity(bad, L, w) != 1


def test_monte_carlo_sample_histogram_matches_exact_volume_shares():
    F = FundamentalDomainSet(2, UNIT, ((0, 0),), (box(2, Fr(5, 2), 0, 1),))
    r = verify_monte_carlo_tiling(F, Z2, n=20000, seed=1)
    shares = {k: v / 20000 for k, v in r.histogram.items()}
    assert abs(shares[2] - 0.5) < 0.02 and set(shares) == {1, 2}
    assert np.isclose(sum(shares.values()), 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from((1, 2, 3)))
def test_exact_histogram_accounts_for_all_volume(seed, d):
    """sum_k k * vol{mult = k} = vol(F) and sum_k vol{mult = k} = vol(Λ)."""
    rng = random.Random(seed)
    L, M = commensurable_pair(rng, d, 5, tries=60)
    F = common_fd_commensurable(L, M)
    extra = tuple(Fr(rng.randint(-3, 3), 3) for _ in range(d))
    bad = FundamentalDomainSet(d, F.base_cell, F.offsets + (extra,))
    r = verify_exact_tiling(bad, L, method="chunks", samples=200)
    assert r.histogram_unit == "volume"
    assert sum(k * v for k, v in r.histogram.items()) == bad.volume()
    assert sum(r.histogram.values()) == volume(L)
