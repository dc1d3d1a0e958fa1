import itertools
from fractions import Fraction as F

import pytest

from voalab.characters import (
    JacobiSeries,
    QSeries,
    bp_central_charge,
    bp_character,
    calibrate_bp,
    eta_product,
    jacobi_theta,
    lattice_theta,
    orthogonality_kernel,
    reduced_length_sl2,
    singular_vector_count,
    universal_counts,
    verify_corollary,
    verify_decomposition,
    w_minimal_character,
)


def partitions(n):
    p = [1] + [0] * n
    for k in range(1, n + 1):
        for i in range(k, n + 1):
            p[i] += p[i - k]
    return p


def test_euler_pentagonal():
    e = eta_product(40)
    expected = {}
    for k in range(-6, 7):
        expected[F(k * (3 * k - 1), 2)] = (-1) ** k
    assert e.terms == {x: c for x, c in expected.items() if x < 40}


def test_partition_function():
    inv = eta_product(30).inverse()
    assert [inv.coefficient(n) for n in range(30)] == partitions(29)


def test_qseries_arithmetic():
    a = QSeries({F(0): 1, F(1, 2): 3, F(2): -1}, 6)
    b = QSeries({F(0): 2, F(1): 1}, 6)
    c = QSeries({F(1, 3): 1, F(3): 5}, 6)
    assert (a * b) * c == a * (b * c)
    assert (a * b) / b == a
    assert (a + b) * c == a * c + b * c
    with pytest.raises(ValueError):
        a.coefficient(6)


def test_triple_product():
    order = F(12)
    lhs = jacobi_theta(order, start=0)
    rhs = JacobiSeries({(F(n), F(n * n, 2)): (-1) ** n for n in range(-5, 6) if F(n * n, 2) < order}, order)
    assert lhs == rhs
    assert lhs.invariant_under_z_inversion()


def test_lattice_theta():
    assert lattice_theta(1, 0, 4) == JacobiSeries({(F(0), F(0)): 1, (F(3), F(3)): 1, (F(-3), F(3)): 1}, 4)
    assert lattice_theta(1, 3, 4).valuation() == F(3, 4)
    ell, order = 2, F(10)
    for s in range(4):
        a = lattice_theta(ell, s + 6 * ell, order)
        b = lattice_theta(ell, s, order)
        assert a.at_one() == b.at_one()
        assert a == JacobiSeries({(z + 3 * ell, e): c for (z, e), c in b.terms.items()}, order) or \
            a == JacobiSeries({(z - 3 * ell, e): c for (z, e), c in b.terms.items()}, order) or a == b
    with pytest.raises(ValueError):
        lattice_theta(1, 0, 2, "other")


def test_central_charge():
    assert bp_central_charge(1) == F(-1, 60) * -24
    assert bp_central_charge(2) == F(5, 42) * -24
    assert bp_character(1, 3).valuation() == F(-1, 60)
    assert bp_character(2, 3).valuation() == F(5, 42)


def free_generating_counts(order):
    """Monomial counts from the product formula of a freely generated algebra with fields of weight 1, 3/2, 3/2, 2."""
    out = JacobiSeries({(F(0), F(0)): 1}, order)
    for w, z in [(F(1), 0), (F(2), 0), (F(3, 2), 1), (F(3, 2), -1)]:
        k = w
        while k < order:
            geo = {}
            j = 0
            while j * k < order:
                geo[(F(j * z), j * k)] = 1
                j += 1
            out = out * JacobiSeries(geo, order)
            k += 1
    return out


def test_universal_counts_match_product_formula():
    order = F(5)
    prod = free_generating_counts(order)
    counts = universal_counts(1, order)
    assert {k: v for k, v in prod.terms.items()} == counts


def test_small_character():
    ch = bp_character(1, 3, normalized=True)
    assert ch.at_one().terms == {F(0): 1, F(1): 1, F(3, 2): 2, F(2): 3, F(5, 2): 4}
    assert ch.coefficient(1, F(3, 2)) == 1
    assert ch.invariant_under_z_inversion()


@pytest.mark.parametrize("ell", [1, 2])
def test_quotient_agrees_with_universal_below_singular_weight(ell):
    bound = F(2 * ell + 1)
    ch = bp_character(ell, bound + F(1, 2), normalized=True)
    univ = universal_counts(ell, bound + F(1, 2))
    below = {k: v for k, v in univ.items() if k[1] < bound}
    assert {k: v for k, v in ch.terms.items() if k[1] < bound} == below
    # exactly one state goes missing at the singular weight, and the oracle sees one singular vector
    assert univ[(F(0), bound)] - ch.coefficient(0, bound) == 1
    assert singular_vector_count(ell, bound, 0) == 1


def test_no_singular_vectors_earlier():
    assert singular_vector_count(1, 2, 0) == 0
    assert singular_vector_count(1, F(5, 2), 1) == 0


def test_calibration_is_recorded():
    cal = calibrate_bp(1)
    ch = cal.choices()
    assert ch and cal.log


def rocha_caridi(p, pp, r, s, order):
    """Virasoro minimal-model character, normalised to q^{h - c/24}."""
    c = 1 - F(6 * (p - pp) ** 2, p * pp)
    terms = {}
    for k in range(-20, 21):
        for sign, b in ((1, pp * r - p * s), (-1, pp * r + p * s)):
            e = F((2 * p * pp * k + b) ** 2 - (pp - p) ** 2, 4 * p * pp)
            if e < order + 1:
                terms[e] = terms.get(e, 0) + sign
    num = QSeries(terms, order + 1)
    return (num * eta_product(order + 1).inverse()).shift(-c / 24).truncate(order)


@pytest.mark.parametrize("s, rs", [(0, (1, 1)), (1, (1, 4))])
def test_w_sl2_is_virasoro(s, rs):
    order = F(8)
    assert w_minimal_character(2, s, order) == rocha_caridi(3, 5, *rs, order)


def test_exponent_gaps():
    # leading exponents of lattice theta functions, relative to s = 0
    ell = 2
    for s in range(2 * ell):
        v = lattice_theta(ell, 3 * s, 6).valuation()
        assert v == min(F((6 * ell * n + 3 * s) ** 2, 12 * ell) for n in range(-2, 3))
        ws = w_minimal_character(2 * ell, s, 3).valuation() - w_minimal_character(2 * ell, 0, 3).valuation()
        assert ws == F(3 * s, 2) - F(3 * s * s, 4 * ell)


@pytest.mark.parametrize("ell", [1, 2])
def test_orthogonality(ell):
    n = 2 * ell
    for a, b in itertools.product(range(n), repeat=2):
        assert orthogonality_kernel(ell, a, b) == (1 if a == b else 0)


def test_translation_lengths():
    for b in range(-5, 6):
        assert reduced_length_sl2(b) == 2 * abs(b)
        assert reduced_length_sl2(b) % 2 == 0


@pytest.mark.parametrize("ell", [1, 2])
def test_decomposition(ell):
    rep = verify_decomposition(ell, 6)
    assert rep.passed, rep.attempts
    assert rep.calibration_choices["theta_index"] == "3s"


@pytest.mark.parametrize("ell, s", [(1, 0), (1, 1), (2, 0), (2, 3)])
def test_corollary(ell, s):
    rep = verify_corollary(ell, s, 6)
    assert rep.passed, rep.attempts
    assert rep.extra["kernel_orthogonal"]
    assert any("printed" in a and "differs" in a for a in rep.attempts)
