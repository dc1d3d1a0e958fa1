from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voalab.scalars import (
    L,
    ONE,
    ZERO,
    PoleError,
    RatFuncL,
    ScalarSyntaxError,
    format_ratfunc,
    parse_ratfunc,
    poly_from_coeffs,
    solve_linear,
    specialize,
)

small = st.integers(-6, 6)


@st.composite
def polys(draw, max_deg=3):
    cs = draw(st.lists(small, min_size=1, max_size=max_deg + 1))
    return poly_from_coeffs(cs)


@st.composite
def ratfuncs(draw):
    num = draw(polys())
    den = draw(polys().filter(lambda p: not p.is_zero()))
    return RatFuncL(num, den)


def test_examples():
    a = 2 * L / 3
    assert a + a == 4 * L / 3
    assert (L * (2 * L - 1)) / (2 * L - 1) == L
    c = -L * (6 * L - 7) / (2 * L + 3)
    assert 2 * c - 1 == -3 * (2 * L - 1) ** 2 / (2 * L + 3)
    assert specialize(2 * L / 3, 1) == Fraction(2, 3)
    assert specialize((2 * L + 1) ** 2 / 2, 1) == Fraction(9, 2)
    with pytest.raises(PoleError):
        specialize(ONE / L, 0)


def test_canonical_form():
    x = (L**2 - 1) / (2 * L - 2)
    assert x == (L + 1) / 2
    assert hash(x) == hash((L + 1) / 2)
    assert x.den.leading_coefficient() == 1


@given(ratfuncs(), ratfuncs(), ratfuncs())
@settings(max_examples=300)
def test_field_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO
    if a:
        assert a * (ONE / a) == ONE


@given(ratfuncs())
@settings(max_examples=300)
def test_format_parse_roundtrip(a):
    assert parse_ratfunc(format_ratfunc(a)) == a


@given(ratfuncs(), st.fractions(min_value=-5, max_value=5, max_denominator=7))
@settings(max_examples=300)
def test_specialize_is_a_homomorphism(a, v):
    b = a * a + 3
    try:
        av = a.specialize(v)
    except PoleError:
        return
    assert b.specialize(v) == av * av + 3


def test_parse_errors():
    with pytest.raises(ScalarSyntaxError):
        parse_ratfunc("2*(l+")
    with pytest.raises(ScalarSyntaxError):
        parse_ratfunc("x + 1")


def test_solve_small():
    sol = solve_linear([[2 * L - 1]], [L * (2 * L - 1)])
    assert sol.unique and sol.solution[0] == L
    eye = [[ONE if i == j else ZERO for j in range(3)] for i in range(3)]
    rhs = [L, ONE, L**2]
    assert list(solve_linear(eye, rhs).solution) == rhs


def test_inconsistent_certificate():
    rows = [[ONE, ONE], [ONE, ONE]]
    sol = solve_linear(rows, [ONE, L])
    assert not sol.consistent
    y = sol.certificate
    assert sum((y[i] * rows[i][0] for i in range(2)), ZERO) == ZERO
    assert y[0] * ONE + y[1] * L != ZERO


@given(st.integers(1, 4), st.integers(1, 4), st.data())
@settings(max_examples=150)
def test_solve_random(nr, nc, data):
    A = [[data.draw(ratfuncs()) for _ in range(nc)] for _ in range(nr)]
    x = [data.draw(ratfuncs()) for _ in range(nc)]
    b = [sum((A[i][j] * x[j] for j in range(nc)), ZERO) for i in range(nr)]
    for method in ("sparse", "bareiss"):
        sol = solve_linear(A, b, method=method, ncols=nc)
        assert sol.consistent
        got = sol.solution
        for i in range(nr):
            assert sum((A[i][j] * got[j] for j in range(nc)), ZERO) == b[i]
        for v in sol.nullspace:
            for i in range(nr):
                assert sum((A[i][j] * v[j] for j in range(nc)), ZERO) == ZERO
        assert sol.rank + len(sol.nullspace) == nc
