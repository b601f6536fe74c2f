import itertools
import random
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latticetile.errors import MalformedInputError, NotBoundedError
from latticetile.polytope import Interval, Polytope, canonical_direction

from _oracles import grid_volume

P1 = Polytope.parallelepiped([(1, 0), (0, 1)], convention="centered")
P2 = Polytope.parallelepiped([(1, 1), (0, 1)], convention="centered")


def test_interval_algebra():
    a = Interval(Fr(0), Fr(1))
    b = Interval(Fr(1), Fr(2))
    assert a.intersect(b).empty
    assert not Interval(Fr(1), Fr(1), True, True).empty
    assert 0 in a and 1 not in a
    assert a.negate() == Interval(Fr(-1), Fr(0), False, True)
    assert a.scale(-2) == Interval(Fr(-2), Fr(0), False, True)


def test_canonical_direction():
    assert canonical_direction([Fr(-1, 2), 1]) == ((1, -2), Fr(-1, 2))
    assert canonical_direction([0, 3]) == ((0, 1), Fr(3))
    with pytest.raises(MalformedInputError):
        canonical_direction([0, 0])


def test_unit_cell_volume_and_membership():
    assert P1.volume() == 1
    assert (Fr(-1, 2), Fr(-1, 2)) in P1
    assert (Fr(1, 2), 0) not in P1
    assert P2.volume() == 1


def test_shear_overlap_pieces():
    vols = {}
    for g in [(0, 0), (0, 1), (0, -1), (1, 0), (-1, 0)]:
        piece = P1.intersect(P2.translate([-x for x in g]))
        vols[g] = piece.volume()
        if vols[g]:
            assert abs(grid_volume(piece) - float(vols[g])) < 5e-3
    assert vols == {(0, 0): Fr(3, 4), (0, 1): Fr(1, 8), (0, -1): Fr(1, 8), (1, 0): 0, (-1, 0): 0}


def test_touching_half_open_cells_are_disjoint():
    A = Polytope.parallelepiped([(1, 0), (0, 1)])
    for shift in [(1, 0), (0, 1), (1, 1), (-1, 1)]:
        assert A.intersect(A.translate(shift)).is_empty


def test_measure_zero_nonempty_intersection():
    # a closed segment: nonempty, volume zero
    seg = Polytope(2, [((1, 0), Interval(Fr(0), Fr(0), True, True)),
                       ((0, 1), Interval(Fr(0), Fr(1)))])
    assert not seg.is_empty and seg.volume() == 0 and seg.affine_rank == 1
    # the same slab with an open end is empty
    gone = Polytope(2, [((1, 0), Interval(Fr(0), Fr(0), True, False)),
                        ((0, 1), Interval(Fr(0), Fr(1)))])
    assert gone.is_empty


def test_open_vertex_only_meeting_is_empty():
    # a diamond anchored at (1,1) touches [0,1)^2 only in that corner, which the square excludes
    A = Polytope.parallelepiped([(1, 0), (0, 1)])
    B = Polytope.parallelepiped([(1, 1), (-1, 1)], anchor=(1, 1))
    assert A.intersect(B).vertices  # closures touch
    assert A.intersect(B).is_empty


def test_unbounded_is_rejected():
    slab = Polytope(2, [((1, 0), Interval(Fr(0), Fr(1)))])
    with pytest.raises(NotBoundedError):
        slab.vertices


def test_three_dimensional_volume():
    C = Polytope.parallelepiped([(1, 0, 0), (0, 1, 0), (1, 1, 2)])
    assert C.volume() == 2
    D = C.intersect(C.translate((Fr(1, 2), Fr(1, 3), 0)))
    assert D.volume() == Fr(2, 3)
    assert abs(grid_volume(D, 60) - 2 / 3) < 0.03


def test_high_dimension_volume_is_estimated():
    D = Polytope.parallelepiped([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (1, 0, 0, 2)])
    est, err = D.volume(samples=20000)
    assert abs(est - 2) < 5 * err + 0.1


def test_contains_scaled_matches_exact():
    rng = np.random.default_rng(0)
    nums = rng.integers(-40, 40, size=(500, 2))
    got = P2.contains_scaled(nums, 32)
    want = [(Fr(int(a), 32), Fr(int(b), 32)) in P2 for a, b in nums]
    assert list(got) == want
    big = nums.astype(np.int64) * (2 ** 40)
    assert list(P2.contains_scaled(big, 32 * 2 ** 40)) == want


def test_json_round_trip():
    poly = P1.intersect(P2.translate((0, -1)))
    assert Polytope.from_json(2, poly.to_json()) == poly
    with pytest.raises(MalformedInputError):
        Polytope.from_json(2, [{"normal": [1, 0], "lo": "0", "hi": "1", "bounds": "<>"}])


@st.composite
def random_cell_pair(draw):
    d = draw(st.sampled_from((2, 3)))
    ent = st.integers(-3, 3)
    vecs = draw(st.lists(st.lists(ent, min_size=d, max_size=d), min_size=d, max_size=d))
    if round(np.linalg.det(np.array(vecs, dtype=float))) == 0:
        vecs = [[int(i == j) * 2 for j in range(d)] for i in range(d)]
    shift = draw(st.lists(st.builds(Fr, st.integers(-4, 4), st.integers(1, 4)), min_size=d, max_size=d))
    return vecs, shift


@settings(max_examples=40, deadline=None)
@given(random_cell_pair())
def test_volume_against_grid_oracle(pair):
    vecs, shift = pair
    A = Polytope.parallelepiped(vecs)
    B = Polytope.parallelepiped([(1,) + (0,) * (len(vecs) - 1)] + [
        tuple(int(i == j) for j in range(len(vecs))) for i in range(1, len(vecs))], anchor=shift)
    piece = A.intersect(B)
    v = piece.volume()
    if v == 0:
        return
    n = 300 if len(vecs) == 2 else 50
    tol = 0.02 if len(vecs) == 2 else 0.08
    assert abs(grid_volume(piece, n) - float(v)) <= tol * max(1.0, float(v))


@settings(max_examples=40, deadline=None)
@given(random_cell_pair())
def test_translates_of_a_cell_partition_space(pair):
    """Exact multiplicity 1 for every sampled point against the lattice of the cell."""
    vecs, _ = pair
    cell = Polytope.parallelepiped(vecs)
    rng = random.Random(len(vecs))
    d = len(vecs)
    inv = np.linalg.inv(np.array(vecs, dtype=float))
    for _ in range(20):
        x = tuple(Fr(rng.randint(-20, 20), rng.choice((1, 2, 3, 4))) for _ in range(d))
        # any translate containing x sits within two steps of the float coordinates
        base = np.floor(np.array(x, dtype=float) @ inv).astype(int)
        count = 0
        for off in itertools.product(range(-2, 3), repeat=d):
            c = [int(b) + o for b, o in zip(base, off)]
            lp = tuple(sum(ci * v[k] for ci, v in zip(c, vecs)) for k in range(d))
            if tuple(a - b for a, b in zip(x, lp)) in cell:
                count += 1
        assert count == 1
