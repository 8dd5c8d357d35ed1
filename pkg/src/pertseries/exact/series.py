"""Truncated power series in ``w = 1/n`` with :class:`AlphaPolynomial` coefficients."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .alphapoly import AlphaPolynomial, binom_alpha
from .rational import RationalFunction

_ZERO = AlphaPolynomial()


class PowerSeries:
    """``c_0 + c_1 w + ... + c_order w^order + O(w^(order+1))``.

    Binary operations truncate at the smaller order of the two operands.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Iterable, order: int | None = None):
        cs = [c if isinstance(c, AlphaPolynomial) else AlphaPolynomial.constant(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("order must be non-negative")
        cs = cs[: order + 1] + [_ZERO] * (order + 1 - len(cs))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("PowerSeries is immutable")

    @classmethod
    def one(cls, order: int) -> "PowerSeries":
        return cls([1], order)

    def __getitem__(self, j: int) -> AlphaPolynomial:
        return self.coeffs[j]

    def __len__(self) -> int:
        return self.order + 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries(self.coeffs, min(order, self.order))

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        order = min(self.order, other.order)
        return PowerSeries((self.coeffs[i] + other.coeffs[i] for i in range(order + 1)), order)

    def __neg__(self) -> "PowerSeries":
        return PowerSeries((-c for c in self.coeffs), self.order)

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        return self + (-other)

    def __mul__(self, other) -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return PowerSeries((c * other for c in self.coeffs), self.order)
        order = min(self.order, other.order)
        out = [_ZERO] * (order + 1)
        a, b = self.coeffs, other.coeffs
        for i in range(order + 1):
            if not a[i]:
                continue
            for j in range(order + 1 - i):
                if b[j]:
                    out[i + j] = out[i + j] + a[i] * b[j]
        return PowerSeries(out, order)

    __rmul__ = __mul__

    def shift(self, s: int) -> "PowerSeries":
        """Multiply by ``w**s`` (``s >= 0``), keeping the order."""
        if s < 0:
            raise ValueError("negative shift would need Laurent terms")
        return PowerSeries([_ZERO] * s + list(self.coeffs[: self.order + 1 - s]), self.order)

    def evaluate(self, alpha, w):
        acc = 0 * w
        for c in reversed(self.coeffs):
            acc = acc * w + c(alpha)
        return acc

    def to_json(self) -> list[list[str]]:
        return [c.to_json() for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[str]]) -> "PowerSeries":
        return cls([AlphaPolynomial.from_json(c) for c in data])

    def __repr__(self) -> str:
        terms = ", ".join(str(c) for c in self.coeffs)
        return f"PowerSeries([{terms}], order={self.order})"


def _rational_series(num: Sequence[Fraction], den: Sequence[Fraction], order: int) -> list[Fraction]:
    """Coefficients of num(w)/den(w) through w^order, den(0) != 0."""
    d0 = den[0]
    out: list[Fraction] = []
    for m in range(order + 1):
        acc = num[m] if m < len(num) else Fraction(0)
        for i in range(1, min(m, len(den) - 1) + 1):
            acc -= den[i] * out[m - i]
        out.append(acc / d0)
    return out


@lru_cache(maxsize=None)
def expand_shifted_power(delta: int, order: int) -> PowerSeries:
    """Series of ``(1 + delta w)**alpha``: coefficient of ``w^m`` is binom(alpha, m) delta^m."""
    if order < 0:
        raise ValueError("order must be non-negative")
    return PowerSeries([binom_alpha(m) * Fraction(delta) ** m for m in range(order + 1)], order)


def expand_rational(r: RationalFunction, order: int) -> tuple[int, PowerSeries]:
    """Write ``r(n) = n**lead * (s_0 + s_1 w + ... + s_order w^order + ...)`` with ``w = 1/n``.

    Returns ``(lead, series)`` with ``lead = deg(num) - deg(den)``.
    """
    if r.is_zero():
        raise ValueError("cannot expand the zero rational function")
    num = r.numerator_coeffs()[::-1]
    den = r.denominator_coeffs()[::-1]
    lead = len(num) - len(den)
    return lead, PowerSeries(_rational_series(num, den, order), order)
