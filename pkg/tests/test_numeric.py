from fractions import Fraction as F

import pytest

from pertseries.family import FamilySpec
from pertseries.numeric import (ContourConvergenceError, PrecisionError, TaylorCoefficients, a2_closed_form,
                                asymptotic_check, contour_coefficient, make_context, rs_numeric)


@pytest.mark.parametrize("kind,n,want", [("power", 2, F(2, 15)), ("power", 1, F(-1, 3)),
                                         ("alternating", 3, F(58, 35)), ("alternating", 2, F(-22, 15))])
def test_second_order_against_hand_values(kind, n, want):
    tc = rs_numeric(FamilySpec(kind, 0), n, 2, 128)
    ctx = make_context(128)
    assert abs(tc[2] - ctx.mpf(want.numerator) / want.denominator) < ctx.mpf(2) ** -120


@pytest.mark.parametrize("kind", ["power", "alternating", "block2"])
@pytest.mark.parametrize("alpha", [0, F(1, 2), F(3, 2)])
@pytest.mark.parametrize("n", [1, 2, 7])
def test_second_order_closed_form(kind, alpha, n):
    spec = FamilySpec(kind, alpha)
    ctx = make_context(128)
    assert abs(rs_numeric(spec, n, 2, 128)[2] - a2_closed_form(spec, n, ctx)) < ctx.mpf(10) ** -30


def test_truncation_beyond_support_is_exact():
    spec = FamilySpec("power", F(1, 2))
    a = rs_numeric(spec, 5, 12, 192)
    b = rs_numeric(spec, 5, 12, 192, N=5 + 12 + 7)
    assert a.values == b.values


def test_odd_coefficients_vanish_exactly():
    tc = rs_numeric(FamilySpec("alternating", F(1, 4)), 6, 15, 128)
    assert all(tc[k] == 0 for k in range(1, 16, 2))


@pytest.mark.parametrize("alpha", [0, F(1, 2), 1])
@pytest.mark.parametrize("n,k", [(3, 2), (4, 4), (8, 6)])
def test_contour_matches_recursion(alpha, n, k):
    spec = FamilySpec("power", alpha)
    got = contour_coefficient(spec, n, k)
    want = complex(rs_numeric(spec, n, k, 128)[k])
    assert abs(got - want) <= 1e-8 * abs(want)


def test_contour_rejects_bad_input():
    with pytest.raises(ValueError):
        contour_coefficient(FamilySpec("power", 0), 1, 2)
    with pytest.raises(ValueError):
        contour_coefficient(FamilySpec("power", 0), 3, 2, quad_points=16)


def test_contour_reports_non_convergence():
    with pytest.raises(ContourConvergenceError) as info:
        contour_coefficient(FamilySpec("power", 0), 3, 2, tol=1e-300, max_points=128)
    assert info.value.previous != info.value.current


def test_precision_limits():
    with pytest.raises(PrecisionError):
        make_context(32)
    with pytest.raises(PrecisionError):
        rs_numeric(FamilySpec("power", 0), 3, 4, precision_bits=10000)


def test_json_and_csv_round_trip():
    tc = rs_numeric(FamilySpec("alternating", F(1, 2)), 4, 6, 128)
    back = TaylorCoefficients.from_json(tc.to_json())
    ctx = make_context(128)
    assert all(abs(x - y) < ctx.mpf(10) ** -35 for x, y in zip(tc.values, back.values))
    assert tc.to_csv().splitlines()[0] == "k,re,im,method,precision"


def test_second_order_residual_rate():
    rep = asymptotic_check(F(3, 2), 2, [10, 20, 50, 100, 200, 500, 1000])
    assert rep.decay_exponent == pytest.approx(-1, abs=0.1)
    assert rep.limit == pytest.approx(-1.0)
