from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from pertseries.exact import RationalFunction, rf_arith

small = st.integers(-6, 6)
rfs = st.tuples(st.lists(small, min_size=1, max_size=3), st.lists(small, min_size=1, max_size=3)) \
    .filter(lambda t: any(t[1])).map(lambda t: RationalFunction(t[0], t[1]))
points = st.fractions(min_value=F(11, 3), max_value=50, max_denominator=7)


def _safe(r, x):
    try:
        return r(x)
    except ZeroDivisionError:
        return None


@given(rfs, rfs, points, st.sampled_from(["add", "sub", "mul", "div"]))
def test_arithmetic_matches_pointwise(a, b, x, op):
    va, vb = _safe(a, x), _safe(b, x)
    if va is None or vb is None or (op == "div" and (vb == 0 or b.is_zero())):
        return
    got = _safe(rf_arith(a, b, op), x)
    want = {"add": va + vb, "sub": va - vb, "mul": va * vb, "div": va / vb if vb else None}[op]
    if got is not None:
        assert got == want


def test_reduction_to_lowest_terms():
    r = RationalFunction([-1, 0, 1], [1, 1])  # (n^2 - 1)/(n + 1)
    assert r.den_degree == 0
    assert r == RationalFunction([-1, 1])


def test_linear_inverse():
    r = RationalFunction.linear_inverse(4, 4)
    assert r(3) == F(1, 16)


def test_pole_raises():
    with pytest.raises(ZeroDivisionError):
        RationalFunction.linear_inverse(2, -1)(2)


def test_unknown_operation():
    with pytest.raises(ValueError):
        rf_arith(RationalFunction.n(), RationalFunction.n(), "pow")
