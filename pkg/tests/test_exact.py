from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from latticetile import exact
from latticetile.errors import MalformedInputError, NonSquareError, SingularError


def M(*rows):
    return exact.matrix(rows)


# -- scalars --------------------------------------------------------------------------

def test_rational_parsing_and_format():
    assert exact.to_rational("3/6") == Fr(1, 2)
    assert exact.to_rational(" -4/2 ") == -2
    assert exact.format_rational(Fr(-6, 4)) == "-3/2"
    assert exact.format_rational(Fr(5)) == "5"
    for bad in (0.5, True, "1/0", "x", None):
        with pytest.raises(MalformedInputError):
            exact.to_rational(bad)


# -- det / inverse ---------------------------------------------------------------------

@pytest.mark.parametrize("m, expected", [
    (M([1, 0], [0, 1]), 1),
    (M([1, 0], [1, 1]), 1),
    (M(["1/2", 0], [0, 2]), 1),
    (M([0, 1], [1, 0]), -1),
    (M([2, 4], [1, 2]), 0),
])
def test_det_examples(m, expected):
    assert exact.det(m) == expected


def test_det_non_square():
    with pytest.raises(NonSquareError):
        exact.det(M([1, 2, 3], [4, 5, 6]))


@pytest.mark.parametrize("m, expected", [
    (M([1, 0], [0, 1]), M([1, 0], [0, 1])),
    (M([1, 0], [1, 1]), M([1, 0], [-1, 1])),
    (M(["1/2", 0], [0, 2]), M([2, 0], [0, "1/2"])),
])
def test_inverse_examples(m, expected):
    inv = exact.inverse(m)
    assert inv == expected
    assert exact.matmul(m, inv) == exact.identity(len(m))


def test_inverse_singular():
    with pytest.raises(SingularError):
        exact.inverse(M([1, 2], [2, 4]))


# -- HNF / SNF ------------------------------------------------------------------------------

def test_hnf_examples():
    assert exact.hnf([[1, 0], [1, 1]])[0] == [[1, 0], [0, 1]]
    assert exact.hnf([[2, 0], [0, 3]])[0] == [[2, 0], [0, 3]]
    assert exact.hnf([[4, 6]])[0] == [[4, 6]]


def test_snf_examples():
    assert exact.snf([[2, 0], [0, 3]])[0] == [[1, 0], [0, 6]]
    assert exact.snf([[1, 0], [0, 1]])[0] == [[1, 0], [0, 1]]
    assert exact.snf([[2, 0], [0, 2]])[0] == [[2, 0], [0, 2]]


def test_lll_shortens_a_skewed_basis():
    red = exact.lll([[1, 0], [1000, 1]])
    assert abs(exact.det(red)) == 1
    assert max(abs(x) for row in red for x in row) == 1


small_int = st.integers(-6, 6)


def int_matrix(rows, cols):
    return st.lists(st.lists(small_int, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@st.composite
def any_int_matrix(draw):
    r = draw(st.integers(1, 4))
    c = draw(st.integers(1, 4))
    return draw(int_matrix(r, c))


@st.composite
def square_int_matrix(draw):
    n = draw(st.integers(1, 4))
    return draw(int_matrix(n, n))


def _row_lattice_contains(basis_rows, v):
    """Solve for integer coefficients of ``v`` in the nonzero HNF rows by back-substitution."""
    rows = [r for r in basis_rows if any(r)]
    v = list(v)
    for r in reversed(rows):
        piv = max(i for i, x in enumerate(r) if x)
        if v[piv] % r[piv]:
            return False
        q = v[piv] // r[piv]
        v = [a - q * b for a, b in zip(v, r)]
    return not any(v)


@settings(max_examples=150, deadline=None)
@given(any_int_matrix())
def test_hnf_properties(m):
    h, u = exact.hnf(m)
    assert [list(r) for r in exact.matmul(u, m)] == [[Fr(x) for x in r] for r in h]
    assert abs(exact.det(u)) == 1
    nonzero = [r for r in h if any(r)]
    assert all(not any(r) for r in h[: len(h) - len(nonzero)])  # zero rows first
    last = -1
    for r in nonzero:
        piv = max(i for i, x in enumerate(r) if x)
        assert r[piv] > 0 and piv > last
        last = piv
        for other in nonzero:
            if other is not r and max(i for i, x in enumerate(other) if x) > piv:
                assert 0 <= other[piv] < r[piv]
    # same row lattice: h = u m gives one inclusion, back-substitution the other
    assert all(_row_lattice_contains(h, row) for row in m)


@settings(max_examples=150, deadline=None)
@given(any_int_matrix())
def test_snf_round_trip_and_divisibility(m):
    d, u, v = exact.snf(m)
    assert [list(r) for r in exact.matmul(exact.matmul(u, m), v)] == [[Fr(x) for x in r] for r in d]
    assert abs(exact.det(u)) == 1 and abs(exact.det(v)) == 1
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    assert all(x >= 0 for x in diag)
    assert all(d[i][j] == 0 for i in range(len(d)) for j in range(len(d[0])) if i != j)
    nz = [x for x in diag if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert diag[len(nz):] == [0] * (len(diag) - len(nz))


@settings(max_examples=80, deadline=None)
@given(square_int_matrix())
def test_snf_matches_sympy(m):
    sympy = pytest.importorskip("sympy")
    from sympy.matrices.normalforms import smith_normal_form
    ours = exact.snf(m)[0]
    n = len(m)
    if all(not any(r) for r in m):
        return
    theirs = smith_normal_form(sympy.Matrix(m), domain=sympy.ZZ)
    assert sorted(abs(int(theirs[i, i])) for i in range(n)) == sorted(ours[i][i] for i in range(n))


@settings(max_examples=150, deadline=None)
@given(square_int_matrix())
def test_snf_diagonal_product_is_abs_det(m):
    d = exact.snf(m)[0]
    prod = 1
    for i in range(len(m)):
        prod *= d[i][i]
    assert prod == abs(exact.det(m))


@st.composite
def rational_square(draw):
    n = draw(st.integers(1, 4))
    ent = st.builds(Fr, st.integers(-9, 9), st.integers(1, 9))
    return draw(st.lists(st.lists(ent, min_size=n, max_size=n), min_size=n, max_size=n))


@settings(max_examples=150, deadline=None)
@given(rational_square())
def test_det_of_inverse(m):
    dt = exact.det(m)
    if dt == 0:
        with pytest.raises(SingularError):
            exact.inverse(m)
        return
    inv = exact.inverse(m)
    assert exact.det(inv) == 1 / dt
    assert exact.matmul(m, inv) == exact.identity(len(m))
