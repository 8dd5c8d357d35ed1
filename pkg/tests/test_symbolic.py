from fractions import Fraction as F

import pytest
import sympy as sp

from pertseries.exact import AlphaPolynomial
from pertseries.numeric import make_context
from pertseries.symbolic import (CoefficientExpansion, SymbolicError, evaluate_coefficient, expand_ak,
                                 expansion, leading_polynomial, rs_symbolic, symbolic_coefficient,
                                 vanishing_orders)


def _sympy_second_order(order):
    """Series in w of n^{1-2a} a_2 for b_k = c_k = k^a: (1-w)^{2a}/(2-w) - 1/(2+w)."""
    a, w = sp.symbols("a w")
    expr = (1 - w) ** (2 * a) / (2 - w) - 1 / (2 + w)
    ser = sp.series(expr, w, 0, order + 1).removeO()
    out = []
    for j in range(order + 1):
        c = sp.Poly(sp.expand(sp.simplify(ser.coeff(w, j))), a)
        out.append(AlphaPolynomial([F(str(x)) for x in reversed(c.all_coeffs())]))
    return out


def test_second_order_series_matches_sympy():
    ours = expansion(2, 4)
    for j, want in enumerate(_sympy_second_order(4)):
        assert ours.P(j) == want, j


def test_odd_orders_vanish():
    for k, terms in rs_symbolic(7):
        if k % 2:
            assert len(terms) == 0


@pytest.mark.parametrize("k", [2, 4, 6, 8])
def test_low_orders_of_expansion_vanish(k):
    assert vanishing_orders(k) == list(range(k - 1))


def test_unmerged_terms_agree_numerically():
    ctx = make_context(200)
    for k in (2, 4):
        merged = evaluate_coefficient(k, 30, F(3, 4), ctx)
        raw = symbolic_coefficient(k, merge=False).evaluate(ctx.mpf(30), ctx.mpf(3) / 4)
        assert abs(merged - raw) <= abs(merged) * ctx.mpf(10) ** -50


def test_leading_polynomial_errors():
    with pytest.raises(SymbolicError):
        leading_polynomial(3)
    with pytest.raises(SymbolicError):
        rs_symbolic(0)
    with pytest.raises(SymbolicError):
        expand_ak(symbolic_coefficient(4), 4, w_order=1)


def test_expansion_json_round_trip():
    e = expansion(4)
    back = CoefficientExpansion.from_json(e.to_json())
    assert back.P(3) == e.P(3)


def test_progress_callback_reports_each_order():
    seen = []
    rs_symbolic(4, progress=lambda k, n: seen.append(k))
    assert seen == [1, 2, 3, 4]
