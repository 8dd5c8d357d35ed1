import hashlib
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from pertseries.exact import Interval
from pertseries.family import FamilySpec
from pertseries.numeric import TaylorCoefficients, rs_numeric
from pertseries.spectra import RadiusEstimate, radius_by_collision
from pertseries.verify import (GOLDEN_SHA256, bound_constants, certified_floor, certify_inequality_table,
                               certify_row, check_coefficient_bound, golden_bytes, golden_polynomials,
                               lower_bound_constant, ms_bound_rhs, radius_upper_from_ak, verify_bound)


def test_golden_file_checksum():
    assert hashlib.sha256(golden_bytes()).hexdigest() == GOLDEN_SHA256


def test_golden_spot_values():
    p = golden_polynomials()
    assert p[12].leading == F(-221321, 2400) and p[12][0] == F(121191, 262144)
    assert p[4].coeffs == (F(5, 32), F(-11, 8), F(9, 4), F(-1))


def test_constants_at_zero_exponent():
    # the exponent 2/(2-a) is 1 at a = 0, so C_1 = 5M
    assert bound_constants(0, 1) == (5.0, 3.0)
    assert bound_constants(0, 2) == (10.0, 6.0)
    assert ms_bound_rhs(0, 1, 7, 0.5, 3) == pytest.approx(3 * 0.5**-2 * 2)


def test_constants_at_unit_exponent():
    c1, c = bound_constants(1, 1)
    assert c1 == pytest.approx(25) and c == pytest.approx(3 * math.sqrt(52))


def test_first_order_rhs_depends_on_rho_only_through_last_term():
    r1 = ms_bound_rhs(F(1, 2), 1, 4, 0.3, 1)
    r2 = ms_bound_rhs(F(1, 2), 1, 4, 3.0, 1)
    _, c = bound_constants(F(1, 2), 1)
    assert r1 - r2 == pytest.approx(c * (0.3 ** (1 / 3) - 3.0 ** (1 / 3)))


@given(st.fractions(0, F(19, 10)), st.floats(0.1, 5), st.integers(1, 50), st.floats(0.1, 10), st.integers(1, 20))
def test_rhs_monotone_in_M_and_n(alpha, M, n, rho, k):
    base = ms_bound_rhs(alpha, M, n, rho, k)
    assert ms_bound_rhs(alpha, M * 1.5, n, rho, k) > base
    assert ms_bound_rhs(alpha, M, n + 1, rho, k) >= base


def test_rhs_rejects_bad_exponent():
    with pytest.raises(ValueError):
        ms_bound_rhs(2, 1, 1, 1, 1)


def test_synthetic_violation_is_reported():
    vals = tuple(10.0**k for k in range(21))
    tc = TaylorCoefficients(1, FamilySpec("power", 0), 20, vals)
    reps = check_coefficient_bound(tc, rhos=[1.0])
    assert len(reps) == 20
    assert not any(r.satisfied for r in reps)


def test_block2_bound_holds():
    ok, reps, est = verify_bound(FamilySpec("block2", 0), 1)
    assert ok and len(reps) == 20 and est.value == pytest.approx(0.75)


def test_power_bound_at_half_radius():
    for n in range(1, 7):
        spec = FamilySpec("power", 0)
        est = radius_by_collision(spec, n)
        reps = check_coefficient_bound(rs_numeric(spec, n, 20), radius_est=est, rho_fracs=(0.5,))
        assert all(r.satisfied for r in reps)


def test_radius_upper_bound():
    assert math.isfinite(radius_upper_from_ak(F(1, 2), 1, 0.1, 2, 5))
    with pytest.raises(ValueError):
        radius_upper_from_ak(1, 1, 0.1, 2, 5)
    # gamma = (1/5) / (12/5 - 2) = 1/2 at k = 12, a = 9/5
    _, c = bound_constants(F(9, 5), 1)
    got = radius_upper_from_ak(F(9, 5), 1, 1e-3, 12, 1)
    assert got == pytest.approx(max(1.0, (2 * c / 1e-3) ** 0.5))


def test_table_negative_control():
    row = certify_row(2, ["0.4:0.6"], F(1, 8), golden_polynomials()[2])
    assert not row.certified and row.violations


def test_certified_rows_and_coverage():
    rep = certify_inequality_table(floors=False)
    by_k = {r.k: r for r in rep.rows}
    for k in (2, 6, 10, 12):
        assert by_k[k].certified
    assert rep.coverage_ok and rep.union == [Interval(F(0), F(11, 6), True, False)]


def test_engine_and_golden_certify_identically():
    a = certify_inequality_table(use_golden_polys=True, floors=False)
    b = certify_inequality_table(use_golden_polys=False, floors=False)
    assert [r.certified for r in a.rows] == [r.certified for r in b.rows]


def test_certified_floor_is_certified():
    p = golden_polynomials()[8]
    piece = Interval.parse("[3/2, 25/16]")
    floor = certified_floor(p, piece, F(1, 10))
    from pertseries.exact import certify_bound
    assert certify_bound(p, floor, piece) and not certify_bound(p, F(1, 12), piece)


def test_lower_bound_constants():
    # a_2(n) n^2 = 2n^2 / (4n^2 - 1) at a = 0: decreases to 1/2 from above
    rep = lower_bound_constant(2, 0, range(2, 101))
    assert rep.n_at_min == 100 and rep.A == pytest.approx(2e4 / (4e4 - 1), rel=1e-14)
    rep = lower_bound_constant(4, F(1, 2), range(10, 101, 10))
    exact = abs(golden_polynomials()[4](F(1, 2)))
    assert rep.A == pytest.approx(float(exact), rel=0.05)
    near_root = lower_bound_constant(2, F(1, 2), range(10, 101, 10))
    assert near_root.A < 0.05
