import itertools
import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from latticetile.domains import (CENTERED, CORNERED, FundamentalDomainSet, HalfOpenParallelepiped,
                                 common_fd_commensurable, fundamental_parallelepiped, load_domain, reduce_mod)
from latticetile.errors import MalformedInputError, VolumeMismatchError
from latticetile.lattice import Lattice, contains, index, intersect, lattice_sum

from _gen import commensurable_pair, unequal_pair

Z2 = Lattice.integer(2)
M_HALF = Lattice(((Fr(1, 2), 0), (0, 2)))


def test_fundamental_parallelepiped_conventions():
    cen = fundamental_parallelepiped(Z2)
    cor = fundamental_parallelepiped(Z2, CORNERED)
    assert (Fr(-1, 2), Fr(-1, 2)) in cen and (Fr(1, 2), 0) not in cen
    assert (0, 0) in cor and (1, 0) not in cor
    assert cen.volume == cor.volume == 1
    with pytest.raises(MalformedInputError):
        fundamental_parallelepiped(Z2, "sideways")


def test_reduce_mod_examples():
    rep, l = reduce_mod((Fr(5, 2), Fr(-1, 3)), Z2)
    assert rep == (Fr(1, 2), Fr(2, 3)) and l.coords == (2, -1)
    rep, _ = reduce_mod((Fr(1, 2), 0), Z2, CENTERED)
    assert rep == (Fr(-1, 2), 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from((CORNERED, CENTERED)))
def test_reduce_mod_is_idempotent_and_lands_in_cell(seed, convention):
    rng = random.Random(seed)
    L, _ = commensurable_pair(rng, rng.choice((1, 2, 3)), 5, tries=40)
    x = tuple(Fr(rng.randint(-30, 30), rng.randint(1, 7)) for _ in range(L.dim))
    rep, l = reduce_mod(x, L, convention)
    assert rep in fundamental_parallelepiped(L, convention)
    assert contains(L, l.point) is not None
    assert tuple(a + b for a, b in zip(rep, l.point)) == x
    again, zero = reduce_mod(rep, L, convention)
    assert again == rep and not any(zero.point)


def test_common_fd_example():
    F = common_fd_commensurable(Z2, M_HALF)
    assert F.volume() == 1
    assert sorted(F.offsets) == [(0, 0), (Fr(1, 2), 1)]
    assert F.base_cell.lattice == lattice_sum(Z2, M_HALF)


def test_common_fd_identity_is_one_cell():
    F = common_fd_commensurable(Z2, Z2)
    assert F.offsets == ((0, 0),) and F.volume() == 1


def test_common_fd_rejects_unequal_volumes():
    with pytest.raises(VolumeMismatchError, match="index obstruction"):
        common_fd_commensurable(Z2, Lattice.integer(2, 2))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from((1, 2, 3)))
def test_offsets_are_a_transversal_for_both_lattices(seed, d):
    rng = random.Random(seed)
    L, M = commensurable_pair(rng, d)
    F = common_fd_commensurable(L, M)
    k = index(L, intersect(L, M))
    assert len(F.offsets) == k == index(M, intersect(L, M))
    for a, b in itertools.combinations(F.offsets, 2):
        diff = [x - y for x, y in zip(a, b)]
        assert contains(L, diff) is None and contains(M, diff) is None
    assert F.volume() == F.base_cell.volume * k


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from((1, 2, 3)))
def test_unequal_volumes_always_raise(seed, d):
    L, M = unequal_pair(random.Random(seed), d)
    with pytest.raises(VolumeMismatchError):
        common_fd_commensurable(L, M)


def test_json_round_trip(tmp_path):
    F = common_fd_commensurable(Z2, M_HALF)
    G = FundamentalDomainSet.from_json(F.to_json())
    assert G.offsets == F.offsets and G.base_cell == F.base_cell
    path = tmp_path / "f.json"
    path.write_text('{"baseCellBasis": [["1/2","0"],["0","1"]], "offsets": [["0","0"],["1/2","1"]]}')
    assert load_domain(path).volume() == 1
    path.write_text("[1, 2]")
    with pytest.raises(MalformedInputError):
        load_domain(path)


def test_offsets_need_a_base_cell():
    with pytest.raises(MalformedInputError):
        FundamentalDomainSet(2, None, ((0, 0),))


def test_half_open_parallelepiped_translate():
    cell = HalfOpenParallelepiped(((1, 0), (0, 1)), None, CORNERED).translate((2, 3))
    assert (2, 3) in cell and (3, 3) not in cell
