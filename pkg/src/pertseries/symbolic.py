"""Exact Rayleigh-Schroedinger coefficients ``a_k(n, alpha)`` for the power family.

Every quantity is a sum of terms ``r(n) * prod_i (n + d_i)**alpha`` with ``r`` a
rational function of ``n``.  Vectors are indexed by the offset ``j`` of the basis
vector ``e_{n+j}`` from the unperturbed state; the formal results are valid for
``n > k`` (no boundary at index 1).
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Optional

from .exact.alphapoly import AlphaPolynomial
from .exact.rational import RationalFunction
from .exact.series import PowerSeries, expand_rational

log = logging.getLogger(__name__)

K_MAX_LIMIT = 14
TABLE_ORDERS = (2, 4, 6, 8, 10, 12)


class SymbolicError(ArithmeticError):
    pass


class ShiftedPowerProduct(tuple):
    """Sorted multiset of shifts ``d``; stands for ``prod (n + d)**alpha``."""

    __slots__ = ()

    def __new__(cls, shifts=()):
        return super().__new__(cls, sorted(shifts))

    def extend(self, d: int) -> "ShiftedPowerProduct":
        return ShiftedPowerProduct(self + (d,))

    def merge(self, other: "ShiftedPowerProduct") -> "ShiftedPowerProduct":
        return ShiftedPowerProduct(self + other)

    def multiplicities(self) -> Counter:
        return Counter(self)

    def evaluate(self, n, alpha):
        out = 1
        for d in self:
            out = out * (n + d) ** alpha
        return out

    def __repr__(self) -> str:
        return f"ShiftedPowerProduct({list(self)})"


@dataclass(frozen=True)
class SymbolicTerm:
    coeff: RationalFunction
    powers: ShiftedPowerProduct

    def evaluate(self, n, alpha):
        return self.coeff(n) * self.powers.evaluate(n, alpha)


class TermSum:
    """Sum of symbolic terms; terms sharing a power product are merged unless ``merge=False``."""

    __slots__ = ("merge", "_terms")

    def __init__(self, merge: bool = True):
        self.merge = merge
        self._terms = {} if merge else []

    def add(self, powers: ShiftedPowerProduct, coeff: RationalFunction) -> None:
        if coeff.is_zero():
            return
        if not self.merge:
            self._terms.append((powers, coeff))
            return
        old = self._terms.get(powers)
        if old is None:
            self._terms[powers] = coeff
            return
        total = old + coeff
        if total.is_zero():
            del self._terms[powers]
        else:
            self._terms[powers] = total

    def items(self) -> Iterator[tuple[ShiftedPowerProduct, RationalFunction]]:
        return iter(self._terms.items() if self.merge else self._terms)

    def terms(self) -> list[SymbolicTerm]:
        return [SymbolicTerm(c, p) for p, c in self.items()]

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def scaled(self, r: RationalFunction) -> "TermSum":
        out = TermSum(self.merge)
        for p, c in self.items():
            out.add(p, c * r)
        return out

    def add_product(self, a: "TermSum", b: "TermSum") -> None:
        for pa, ca in a.items():
            for pb, cb in b.items():
                self.add(pa.merge(pb), ca * cb)

    def evaluate(self, n, alpha):
        """Numeric value; ``n``/``alpha`` should share one arithmetic (e.g. mpmath)."""
        total = 0
        for p, c in self.items():
            total = total + c(n) * p.evaluate(n, alpha)
        return total


class SymbolicVector(dict):
    """Mapping ``offset j -> TermSum`` for the component along ``e_{n+j}``."""

    def __init__(self, *args, merge: bool = True, **kw):
        super().__init__(*args, **kw)
        self.merge = merge

    @classmethod
    def unit(cls, merge: bool = True) -> "SymbolicVector":
        v = cls(merge=merge)
        t = TermSum(merge)
        t.add(ShiftedPowerProduct(), RationalFunction.constant(1))
        v[0] = t
        return v

    def support(self) -> list[int]:
        return sorted(j for j, t in self.items() if t)

    def term_count(self) -> int:
        return sum(len(t) for t in self.values())


def apply_B_symbolic(v: SymbolicVector) -> SymbolicVector:
    """``B v`` for ``b_k = c_k = k**alpha``.

    Moving from offset ``i`` to ``i+1`` uses ``b_{n+i}`` (shift ``i``); moving to
    ``i-1`` uses ``c_{n+i-1}`` (shift ``i-1``).
    """
    out = SymbolicVector(merge=v.merge)
    for i, terms in v.items():
        for target, shift in ((i + 1, i), (i - 1, i - 1)):
            dst = out.get(target)
            if dst is None:
                dst = out[target] = TermSum(v.merge)
            for p, c in terms.items():
                dst.add(p.extend(shift), c)
    for j in [j for j, t in out.items() if not t]:
        del out[j]
    return out


def _gap_inverse(j: int) -> RationalFunction:
    # 1 / ((n+j)^2 - n^2) = 1 / (j^2 + 2 j n)
    return RationalFunction.linear_inverse(j * j, 2 * j)


def _rs_run(k_max: int, merge: bool, progress: Optional[Callable[[int, int], None]]):
    psi = [SymbolicVector.unit(merge)]
    coeffs: list[TermSum] = [TermSum(merge)]  # placeholder for a_0
    for k in range(1, k_max + 1):
        Bpsi = apply_B_symbolic(psi[-1])
        a_k = Bpsi.get(0) or TermSum(merge)
        coeffs.append(a_k)
        nxt = SymbolicVector(merge=merge)
        for j, bterms in Bpsi.items():
            if j == 0:
                continue
            acc = TermSum(merge)
            for p, c in bterms.items():
                acc.add(p, -c)
            for l in range(1, k):
                prev = psi[k - l].get(j)
                if coeffs[l] and prev:
                    acc.add_product(coeffs[l], prev)
            if acc:
                nxt[j] = acc.scaled(_gap_inverse(j))
        psi.append(nxt)
        if progress is not None:
            progress(k, nxt.term_count() + len(a_k))
        log.debug("order %d: %d terms in a_k, %d in psi", k, len(a_k), nxt.term_count())
    return coeffs


@lru_cache(maxsize=4)
def _rs_cached(k_max: int, merge: bool):
    return tuple(_rs_run(k_max, merge, None))


def rs_symbolic(k_max: int, *, merge: bool = True,
                progress: Optional[Callable[[int, int], None]] = None) -> list[tuple[int, TermSum]]:
    """Symbolic ``a_1 .. a_{k_max}`` under intermediate normalization.

    ``a_k`` is the offset-0 component of ``B psi_{k-1}``; for ``j != 0``

        psi_k[j] = (sum_{l=1}^{k-1} a_l psi_{k-l}[j] - (B psi_{k-1})[j]) / ((n+j)^2 - n^2).
    """
    if not 1 <= k_max <= K_MAX_LIMIT:
        raise SymbolicError(f"k_max must lie in [1, {K_MAX_LIMIT}]")
    if progress is None:
        coeffs = _rs_cached(k_max, merge)
    else:
        coeffs = _rs_run(k_max, merge, progress)
    return [(k, coeffs[k]) for k in range(1, k_max + 1)]


def symbolic_coefficient(k: int, *, merge: bool = True) -> TermSum:
    return rs_symbolic(k, merge=merge)[-1][1]


# -- expansion in w = 1/n ------------------------------------------------------

@dataclass(frozen=True)
class CoefficientExpansion:
    """``a_k = n**(k alpha - (k-1)) * sum_j P_k(j, alpha) w**j``."""

    k: int
    series: PowerSeries

    @property
    def lead_exponent(self) -> str:
        return f"{self.k}*alpha - {self.k - 1}"

    def P(self, j: int) -> AlphaPolynomial:
        return self.series[j]

    def to_json(self) -> dict:
        return {"k": self.k, "lead_exponent": self.lead_exponent,
                "powers": [[j, c.to_json()] for j, c in enumerate(self.series.coeffs)]}

    @classmethod
    def from_json(cls, data: dict) -> "CoefficientExpansion":
        coeffs = [AlphaPolynomial.from_json(c) for _, c in sorted(data["powers"])]
        return cls(int(data["k"]), PowerSeries(coeffs))


@lru_cache(maxsize=None)
def _power_block(delta: int, mult: int, order: int) -> PowerSeries:
    """Series of ``(1 + delta w)**(mult*alpha)``."""
    from .exact.alphapoly import binom_alpha

    return PowerSeries([binom_alpha(m).scale_variable(mult) * Fraction(delta) ** m
                        for m in range(order + 1)], order)


def shifted_product_series(powers: ShiftedPowerProduct, order: int) -> PowerSeries:
    """``prod (1 + d w)**alpha`` over the multiset, i.e. the power product divided by n**(m alpha)."""
    out = PowerSeries.one(order)
    for d, e in sorted(powers.multiplicities().items()):
        if d:
            out = out * _power_block(d, e, order)
    return out


def expand_ak(terms: TermSum, k: int, w_order: Optional[int] = None) -> CoefficientExpansion:
    """Collect ``a_k`` as ``n**(k alpha - (k-1)) f_alpha(1/n)`` with exact ``P_k(j, alpha)``."""
    if w_order is None:
        w_order = max(k - 1, 0)
    if w_order < k - 1:
        raise SymbolicError("w_order must be at least k-1")
    total = PowerSeries([], w_order)
    for powers, coeff in terms.items():
        if len(powers) != k:
            raise SymbolicError(f"term with {len(powers)} power factors at order {k}")
        lead, rseries = expand_rational(coeff, w_order)
        shift = -(k - 1) - lead
        if shift < 0:
            raise SymbolicError(f"term lead power n^{lead} exceeds n^{-(k - 1)} at order {k}")
        piece = rseries * shifted_product_series(powers, w_order)
        total = total + (piece.shift(shift) if shift else piece)
    return CoefficientExpansion(k, total)


@lru_cache(maxsize=None)
def expansion(k: int, w_order: Optional[int] = None) -> CoefficientExpansion:
    return expand_ak(symbolic_coefficient(k), k, w_order)


def leading_polynomial(k: int) -> AlphaPolynomial:
    """``P_k(k-1, alpha)``, the coefficient of ``n**(k alpha - 2(k-1))`` in ``a_k``."""
    if k % 2:
        raise SymbolicError(f"a_{k} vanishes identically for odd k")
    if not 2 <= k <= K_MAX_LIMIT:
        raise SymbolicError(f"k must be even in [2, {K_MAX_LIMIT}]")
    if k not in TABLE_ORDERS:
        log.warning("k=%d lies beyond the tabulated range; result is experimental", k)
    return expansion(k).P(k - 1)


def vanishing_orders(k: int) -> list[int]:
    """Indices ``j <= k-2`` where ``P_k(j, alpha)`` is the zero polynomial."""
    exp = expansion(k)
    return [j for j in range(k - 1) if exp.P(j).is_zero()]


def evaluate_coefficient(k: int, n, alpha, ctx) -> object:
    """Exact-formula value of ``a_k(n)`` in the mpmath context ``ctx`` (for ``n > k``)."""
    terms = symbolic_coefficient(k)
    nn = ctx.mpf(n)
    a = alpha if not isinstance(alpha, Fraction) else ctx.mpf(alpha.numerator) / alpha.denominator
    return terms.evaluate(nn, a)
