import itertools
from fractions import Fraction

import pytest

from voalab.acceptance import printed_gpm_bracket
from voalab.algebras import bp_algebra
from voalab.scalars import L, RatFuncL
from voalab.vertex_core import IndexPoly, falling_binomial, jacobi_modes, mode_bracket, reduce_derivatives

V = ("m", "n")
m, n = IndexPoly.var(V, "m"), IndexPoly.var(V, "n")


@pytest.fixture(scope="module")
def W():
    return bp_algebra()


def test_index_poly():
    p = (m + 1) * (m - 1)
    assert p == m * m - 1
    assert p.evaluate(m=3, n=0) == RatFuncL(8)
    assert falling_binomial(m, 2).evaluate(m=5, n=0) == RatFuncL(10)
    assert str(m - n) == "m - n"


def test_heisenberg_modes(W):
    b = mode_bracket(W["J"], W["J"])
    assert not b.terms
    # [J_m, J_n] carries the factor m
    assert b.central == m * (2 * L / 3)


@pytest.mark.parametrize("shifted", [False, True])
def test_j_g(W, shifted):
    for s, g in ((1, "G+"), (-1, "G-")):
        b = mode_bracket(W["J"], W[g], shifted=shifted)
        assert b.text() == ("" if s > 0 else "-") + f"{g}_{{m + n}}"


def test_gpm_central_term(W):
    std = mode_bracket(W["G+"], W["G-"])
    assert std.central == (m * m - RatFuncL(Fraction(1, 4))) * (L * (2 * L - 1) / 2)
    sh = mode_bracket(W["G+"], W["G-"], shifted=True)
    assert sh.central == m * (m + 1) * (L * (L - RatFuncL(Fraction(1, 2))))


def test_printed_bracket_differs_only_in_j_term(W):
    computed = reduce_derivatives(mode_bracket(W["G+"], W["G-"], shifted=True))
    diff = computed - printed_gpm_bracket(W)
    jmono = next(iter(W["J"].terms))
    assert set(diff.terms) == {jmono}
    assert not diff.central
    # (3/2)(l - 1/2)(m - n + 1) against the printed (m - n - 1)
    assert diff.terms[jmono] == IndexPoly.const(V, 3 * (2 * L - 1) / 2)


@pytest.mark.xfail(strict=True, reason="printed J term (m - n - 1) is not reproduced by any mode shift")
def test_printed_bracket_verbatim(W):
    computed = reduce_derivatives(mode_bracket(W["G+"], W["G-"], shifted=True))
    assert (computed - printed_gpm_bracket(W)).is_zero()


def test_no_shift_fits_printed_j_and_central_terms():
    # J coefficient m - n + 2a and central (m + a)^2 - 1/4 for a shift a of G+ (and -a of G-)
    for a in [Fraction(k, 2) for k in range(-4, 5)]:
        j_ok = 2 * a == -1
        central_ok = all((mm + a) ** 2 - Fraction(1, 4) == mm * (mm + 1) for mm in range(4))
        assert not (j_ok and central_ok)


def test_jacobi_all_triples(W):
    gens = [W[g] for g in ("T", "J", "G+", "G-")]
    for a, b, c in itertools.product(gens, repeat=3):
        assert jacobi_modes(a, b, c).is_zero()


def test_jacobi_detects_damage():
    from voalab.vertex_core import loads_algebra

    text = "[algebra] bad\n[gen] a 1 even 0\n[gen] b 1 even 0\n[ope] a b 0 = a\n[ope] a a 1 = 1\n"
    A = loads_algebra(text)
    assert not jacobi_modes(A["a"], A["a"], A["b"]).is_zero()
