from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from pertseries.exact import (AlphaPolynomial, Interval, bound_violations, certify_bound, isolate_roots,
                              merge_intervals, roots_in_closed, sturm_roots)

roots = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=9), min_size=1, max_size=6)
ends = st.fractions(min_value=-6, max_value=6, max_denominator=8)


@given(roots, ends, ends, st.integers(1, 3))
def test_count_matches_known_roots(rs, a, b, lead):
    if a == b:
        return
    lo, hi = min(a, b), max(a, b)
    p = AlphaPolynomial.from_roots(rs, lead)  # repeated roots allowed
    expected = len({r for r in rs if lo < r <= hi})
    assert sturm_roots(p, lo, hi) == expected
    assert roots_in_closed(p, lo, hi) == len({r for r in rs if lo <= r <= hi})


def test_irrational_roots():
    p = AlphaPolynomial([-2, 0, 1])  # +-sqrt 2
    assert sturm_roots(p, 0, 2) == 1
    assert sturm_roots(p, -2, 2) == 2
    (a, b), = isolate_roots(p, 1, 2, F(1, 1000))
    assert a < F(14142, 10000) < b and b - a <= F(1, 1000)


def test_interval_parsing_and_membership():
    iv = Interval.parse("[3/4, 1)")
    assert F(3, 4) in iv and 1 not in iv
    assert str(Interval.parse("0.4:0.6")) == "[2/5, 3/5]"
    with pytest.raises(ValueError):
        Interval.parse("(1, 0)")
    with pytest.raises(ValueError):
        Interval.parse("nonsense")


def test_merge_fuses_touching_pieces():
    pieces = [Interval.parse(s) for s in ["[1, 2)", "[0, 1)", "[2, 3]"]]
    assert merge_intervals(pieces) == [Interval(F(0), F(3), True, True)]
    gap = [Interval.parse("[0, 1)"), Interval.parse("(1, 2]")]
    assert len(merge_intervals(gap)) == 2


def test_certify_strictness_at_closed_endpoint():
    p = AlphaPolynomial([0, 1])  # p(a) = a
    assert certify_bound(p, F(1, 2), Interval.parse("(1/2, 1]"))
    assert not certify_bound(p, F(1, 2), Interval.parse("[1/2, 1]"))


def test_certify_negative_control_and_violations():
    p = AlphaPolynomial([F(1, 2), -1])
    assert certify_bound(p, F(1, 8), Interval.parse("[0, 1/4]"))
    iv = Interval.parse("[2/5, 3/5]")
    assert not certify_bound(p, F(1, 8), iv)
    assert bound_violations(p, F(1, 8), iv) == [iv]


@given(st.lists(st.integers(-4, 4), min_size=2, max_size=5), ends, ends, st.fractions(F(1, 20), 3, max_denominator=20))
def test_certificate_is_sound_on_a_grid(cs, a, b, bound):
    if a == b or not any(cs[1:]):
        return
    p = AlphaPolynomial(cs)
    iv = Interval(min(a, b), max(a, b), True, True)
    if certify_bound(p, bound, iv):
        for i in range(41):
            x = iv.lo + (iv.hi - iv.lo) * F(i, 40)
            assert abs(p(x)) > bound
