from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, strategies as st

from pertseries.exact import AlphaPolynomial, PowerSeries, RationalFunction, expand_rational, expand_shifted_power


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=4),
       st.lists(st.integers(-5, 5), min_size=1, max_size=4).filter(lambda d: d[-1] != 0))
def test_rational_expansion_times_denominator_gives_numerator(num, den):
    r = RationalFunction(num, den)
    if r.is_zero():
        return
    order = 8
    lead, s = expand_rational(r, order)
    # r(n) n^{-lead} = sum s_j w^j, so den(1/w) w^{deg den} * sum s_j w^j = num(1/w) w^{deg num}
    dn = [c for c in r.denominator_coeffs()][::-1]
    nm = [c for c in r.numerator_coeffs()][::-1]
    prod = [sum(dn[i] * s[m - i][0] for i in range(len(dn)) if 0 <= m - i <= order) for m in range(order + 1)]
    want = nm + [F(0)] * (order + 1 - len(nm))
    assert prod == want[: order + 1]
    assert lead == r.num_degree - r.den_degree


@pytest.mark.parametrize("delta", [-3, -1, 2, 5])
@pytest.mark.parametrize("alpha", [F(1, 2), F(3, 2), F(-1, 3)])
def test_shifted_power_series_matches_mpmath(delta, alpha):
    s = expand_shifted_power(delta, 10)
    w = F(1, 1000)  # keeps the truncated tail (5w)^11 below 1e-20
    approx = float(s.evaluate(alpha, w))
    exact = float(mpmath.power(1 + delta * mpmath.mpf(w.numerator) / w.denominator, float(alpha)))
    assert approx == pytest.approx(exact, rel=1e-12)


def test_truncation_order_of_products():
    a = PowerSeries([AlphaPolynomial([1]), AlphaPolynomial([0, 1])], 5)
    b = PowerSeries([AlphaPolynomial([1])] * 4, 2)
    assert (a * b).order == 2


def test_shift_and_json():
    a = PowerSeries([AlphaPolynomial([1, 1])], 3).shift(2)
    assert a[0].is_zero() and a[2] == AlphaPolynomial([1, 1])
    assert PowerSeries.from_json(a.to_json()).coeffs[:3] == a.coeffs[:3]
