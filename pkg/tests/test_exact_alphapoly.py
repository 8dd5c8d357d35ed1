from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, strategies as st

from pertseries.exact import AlphaPolynomial, as_fraction, binom_alpha

fracs = st.fractions(min_value=-100, max_value=100, max_denominator=50)
polys = st.lists(fracs, max_size=6).map(AlphaPolynomial)


def test_as_fraction_inputs():
    assert as_fraction(0.1) == F(1, 10)
    assert as_fraction("25/16") == F(25, 16)
    assert as_fraction(" 3 ") == F(3)
    assert as_fraction(F(2, 3)) == F(2, 3)


def test_trailing_zeros_stripped():
    p = AlphaPolynomial([1, 2, 0, 0])
    assert p.degree == 1
    assert AlphaPolynomial([0, 0]).is_zero()


def test_format_reads_like_the_table():
    assert AlphaPolynomial([F(1, 2), -1]).format("a") == "-a + 1/2"
    assert AlphaPolynomial([F(5, 32), F(-11, 8), F(9, 4), -1]).format() == "-a^3 + 9/4*a^2 - 11/8*a + 5/32"


@given(polys, polys, fracs)
def test_ring_operations_agree_with_evaluation(p, q, x):
    assert (p + q)(x) == p(x) + q(x)
    assert (p * q)(x) == p(x) * q(x)
    assert (p - q)(x) == p(x) - q(x)


@given(polys)
def test_json_round_trip(p):
    assert AlphaPolynomial.from_json(p.to_json()) == p


@given(polys, polys)
def test_derivative_obeys_product_rule(p, q):
    assert (p * q).derivative() == p.derivative() * q + p * q.derivative()


@pytest.mark.parametrize("m", range(0, 7))
@pytest.mark.parametrize("a", [F(1, 3), F(-5, 2), F(7, 4)])
def test_binomial_matches_mpmath(m, a):
    assert float(binom_alpha(m)(a)) == pytest.approx(float(mpmath.binomial(float(a), m)), rel=1e-12)


def test_evaluation_in_mpmath_context(mp128):
    p = AlphaPolynomial([F(1, 3), 1])
    v = p(mp128.mpf(1) / 7)
    assert v.context is mp128
    assert abs(v - (mp128.mpf(1) / 3 + mp128.mpf(1) / 7)) < mp128.mpf(2) ** -120


def test_scale_variable():
    p = AlphaPolynomial([1, 2, 3])
    assert p.scale_variable(2)(F(1, 2)) == p(1)
