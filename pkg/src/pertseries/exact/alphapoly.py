"""Polynomials in the exponent parameter ``a`` (alpha) over exact rationals."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence


def as_fraction(x) -> Fraction:
    """Convert ints, Fractions, ``"p/q"`` strings and decimal strings exactly.

    Floats are converted through their shortest repr, so ``0.1`` becomes 1/10.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    # gmpy2.mpq, flint.fmpq, numpy integers ...
    try:
        return Fraction(int(x.numerator), int(x.denominator))
    except AttributeError:
        return Fraction(str(x))


def _strip(coeffs: Iterable[Fraction]) -> tuple[Fraction, ...]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def format_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class AlphaPolynomial:
    """Immutable polynomial in alpha with :class:`~fractions.Fraction` coefficients.

    ``coeffs[i]`` is the coefficient of ``alpha**i``.  The zero polynomial has
    an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs", _strip(as_fraction(c) for c in coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("AlphaPolynomial is immutable")

    @classmethod
    def constant(cls, c) -> "AlphaPolynomial":
        return cls((c,))

    @classmethod
    def alpha(cls) -> "AlphaPolynomial":
        return cls((0, 1))

    @classmethod
    def from_roots(cls, roots: Sequence, lead=1) -> "AlphaPolynomial":
        p = cls.constant(lead)
        for r in roots:
            p = p * cls((-as_fraction(r), 1))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, AlphaPolynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _strip((Fraction(other),))
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def _coerce(self, other) -> "AlphaPolynomial":
        if isinstance(other, AlphaPolynomial):
            return other
        return AlphaPolynomial.constant(other)

    def __add__(self, other) -> "AlphaPolynomial":
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return AlphaPolynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "AlphaPolynomial":
        return AlphaPolynomial(-c for c in self.coeffs)

    def __sub__(self, other) -> "AlphaPolynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "AlphaPolynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "AlphaPolynomial":
        if not isinstance(other, AlphaPolynomial):
            c = as_fraction(other)
            return AlphaPolynomial(x * c for x in self.coeffs)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return AlphaPolynomial()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return AlphaPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "AlphaPolynomial":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        out = AlphaPolynomial.constant(1)
        for _ in range(e):
            out = out * self
        return out

    def scale_variable(self, s) -> "AlphaPolynomial":
        """Return p(s*alpha)."""
        s = as_fraction(s)
        return AlphaPolynomial(c * s**i for i, c in enumerate(self.coeffs))

    def derivative(self) -> "AlphaPolynomial":
        return AlphaPolynomial(i * c for i, c in enumerate(self.coeffs) if i)

    def __call__(self, x):
        """Horner evaluation; exact for int/Fraction ``x``, else in ``x``'s arithmetic."""
        if isinstance(x, (int, Fraction)):
            cs = self.coeffs
        else:
            cs = [_lift(c, x) for c in self.coeffs]
        acc = 0 * x
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    def to_json(self) -> list[str]:
        return [format_fraction(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "AlphaPolynomial":
        return cls(Fraction(s) for s in data)

    def __repr__(self) -> str:
        return f"AlphaPolynomial({self.to_json()!r})"

    def __str__(self) -> str:
        return self.format()

    def format(self, var: str = "a") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                mono = var if i == 1 else f"{var}^{i}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def _lift(c: Fraction, like):
    """Convert a Fraction into the arithmetic of ``like`` (float, complex, mpmath)."""
    ctx = getattr(like, "context", None)
    if ctx is not None:
        return ctx.mpf(c.numerator) / c.denominator
    return c.numerator / c.denominator


def binom_alpha(m: int) -> AlphaPolynomial:
    """Generalized binomial coefficient ``alpha (alpha-1) ... (alpha-m+1) / m!``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    return AlphaPolynomial.from_roots(range(m), lead=Fraction(1, factorial(m)))
