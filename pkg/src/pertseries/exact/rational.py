"""Rational functions of the formal variable ``n`` with exact rational coefficients.

Backed by FLINT's ``fmpq_poly`` (via python-flint) for the polynomial gcd, which
is the hot spot of the symbolic perturbation engine.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from flint import fmpq, fmpq_poly

from .alphapoly import as_fraction


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.p), int(q.q))


def _poly(coeffs) -> fmpq_poly:
    if isinstance(coeffs, fmpq_poly):
        return coeffs
    return fmpq_poly([fmpq(c.numerator, c.denominator) for c in map(as_fraction, coeffs)])


class RationalFunction:
    """``num(n) / den(n)``, kept reduced with a monic denominator.

    Parameters
    ----------
    num, den : sequence of rationals (lowest degree first) or ``fmpq_poly``
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Iterable = (1,), den: Iterable = (1,), *, _reduced: bool = False):
        num, den = _poly(num), _poly(den)
        if den == 0:
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            if num == 0:
                den = fmpq_poly([1])
            else:
                g = num.gcd(den)
                if g.degree() > 0:
                    num, den = num // g, den // g
                lc = den[den.degree()]
                if lc != 1:
                    num, den = num / lc, den / lc
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls((c,), (1,), _reduced=True)

    @classmethod
    def n(cls) -> "RationalFunction":
        return cls((0, 1), (1,), _reduced=True)

    @classmethod
    def linear_inverse(cls, a, b) -> "RationalFunction":
        """``1 / (a + b n)``."""
        return cls((1,), (a, b))

    def is_zero(self) -> bool:
        return self.num == 0

    @property
    def num_degree(self) -> int:
        return self.num.degree()

    @property
    def den_degree(self) -> int:
        return self.den.degree()

    def numerator_coeffs(self) -> list[Fraction]:
        return [_to_fraction(c) for c in self.num.coeffs()]

    def denominator_coeffs(self) -> list[Fraction]:
        return [_to_fraction(c) for c in self.den.coeffs()]

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        return RationalFunction.constant(other)

    def __add__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den, _reduced=True)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalFunction":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RationalFunction":
        return self._coerce(other) / self

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            try:
                other = RationalFunction.constant(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((str(self.num), str(self.den)))

    def __call__(self, n):
        """Evaluate; exact for int/Fraction ``n``, else in the arithmetic of ``n``."""
        if isinstance(n, (int, Fraction)):
            n = Fraction(n)
            num = _horner(self.numerator_coeffs(), n)
            den = _horner(self.denominator_coeffs(), n)
            if den == 0:
                raise ZeroDivisionError(f"pole at n={n}")
            return num / den
        ctx = getattr(n, "context", None)
        lift = (lambda q: ctx.mpf(q.numerator) / q.denominator) if ctx else (
            lambda q: q.numerator / q.denominator
        )
        num = _horner([lift(c) for c in self.numerator_coeffs()], n)
        den = _horner([lift(c) for c in self.denominator_coeffs()], n)
        return num / den

    def __repr__(self) -> str:
        return f"RationalFunction(({self.num}) / ({self.den}))".replace("x", "n")

    __str__ = __repr__


def _horner(coeffs, x):
    acc = 0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def rf_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    """Exact ``add``/``sub``/``mul``/``div`` of two rational functions."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")
