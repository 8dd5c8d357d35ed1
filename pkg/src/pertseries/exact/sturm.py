"""Exact real-root counting with Sturm chains, and interval certificates built on it."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from .alphapoly import AlphaPolynomial, as_fraction, format_fraction

# Integer polynomials below are lists of ints, lowest degree first, no trailing zeros.


def _primitive(coeffs: Sequence[Fraction]) -> list[int]:
    """Positive multiple of ``coeffs`` with coprime integer coefficients."""
    den = lcm(*(c.denominator for c in coeffs)) if coeffs else 1
    ints = [int(c * den) for c in coeffs]
    g = 0
    for c in ints:
        g = gcd(g, c)
    return [c // g for c in ints] if g > 1 else ints


def _strip(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _content_strip(p: list[int]) -> list[int]:
    g = 0
    for c in p:
        g = gcd(g, c)
    return [c // g for c in p] if g > 1 else p


def _prem(a: list[int], b: list[int]) -> tuple[list[int], int]:
    """Pseudo-remainder; returns ``(r, e)`` with ``lc(b)**e * a = q*b + r``."""
    r = list(a)
    db, lb = len(b) - 1, b[-1]
    e = 0
    while r and len(r) - 1 >= db:
        lr, shift = r[-1], len(r) - 1 - db
        r = [lb * c for c in r]
        for i, c in enumerate(b):
            r[i + shift] -= lr * c
        _strip(r)
        e += 1
    return r, e


def _derivative(p: list[int]) -> list[int]:
    return [i * c for i, c in enumerate(p)][1:]


def _fraction_gcd(a: list[int], b: list[int]) -> list[int]:
    while b:
        r, _ = _prem(a, b)
        a, b = b, _content_strip(r)
    return _content_strip(a) if a else a


def _exact_quotient(a: list[int], b: list[int]) -> list[Fraction]:
    r = [Fraction(c) for c in a]
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = r[i + len(b) - 1] / b[-1]
        q[i] = c
        for j, bj in enumerate(b):
            r[i + j] -= c * bj
    if any(r):
        raise ArithmeticError("inexact polynomial division")
    return q


def sturm_chain(p: AlphaPolynomial) -> list[list[int]]:
    """Sturm chain of the square-free part of ``p`` with content-stripped integer members."""
    if p.is_zero():
        raise ValueError("Sturm chain of the zero polynomial")
    f = _primitive(p.coeffs)
    if len(f) > 1:
        g = _fraction_gcd(f, _derivative(f))
        if len(g) > 1:
            f = _primitive(_exact_quotient(f, g))
    chain = [f]
    if len(f) > 1:
        chain.append(_content_strip(_derivative(f)))
    while len(chain[-1]) > 1:
        a, b = chain[-2], chain[-1]
        r, e = _prem(a, b)
        if not r:
            break
        # lc(b)**e * rem; flip so the member is a positive multiple of -rem
        positive = b[-1] > 0 or e % 2 == 0
        chain.append(_content_strip([-c for c in r] if positive else r))
    return chain


def _sign_at(p: list[int], x: Fraction) -> int:
    # sign of q**d * p(x) with x = s/q, q > 0
    s, q = x.numerator, x.denominator
    d = len(p) - 1
    acc = 0
    qp = 1
    for i in range(d, -1, -1):
        acc += p[i] * s**i * qp
        qp *= q
    return (acc > 0) - (acc < 0)


def _variations(chain: list[list[int]], x: Fraction) -> int:
    signs = [s for s in (_sign_at(p, x) for p in chain) if s]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def sturm_roots(p: AlphaPolynomial, lo, hi) -> int:
    """Number of distinct real roots of ``p`` in the half-open interval ``(lo, hi]``."""
    lo, hi = as_fraction(lo), as_fraction(hi)
    if not lo < hi:
        raise ValueError("need lo < hi")
    chain = sturm_chain(p)
    return _variations(chain, lo) - _variations(chain, hi)


def roots_in_closed(p: AlphaPolynomial, lo, hi) -> int:
    lo, hi = as_fraction(lo), as_fraction(hi)
    return sturm_roots(p, lo, hi) + (1 if p(lo) == 0 else 0)


def isolate_roots(p: AlphaPolynomial, lo, hi, width=Fraction(1, 10**6)) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals ``(a, b]`` of width <= ``width``, one per distinct root in ``(lo, hi]``."""
    lo, hi, width = as_fraction(lo), as_fraction(hi), as_fraction(width)
    chain = sturm_chain(p)
    out = []
    stack = [(lo, hi, _variations(chain, lo), _variations(chain, hi))]
    while stack:
        a, b, va, vb = stack.pop()
        count = va - vb
        if count == 0:
            continue
        if count == 1 and b - a <= width:
            out.append((a, b))
            continue
        m = (a + b) / 2
        vm = _variations(chain, m)
        stack.append((m, b, vm, vb))
        stack.append((a, m, va, vm))
    return sorted(out)


_INTERVAL_RE = re.compile(r"^\s*([\[\(])\s*([^,]+?)\s*,\s*([^\]\)]+?)\s*([\]\)])\s*$")


@dataclass(frozen=True, order=True)
class Interval:
    """Real interval with exact rational endpoints and explicit bracket types."""

    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", as_fraction(self.lo))
        object.__setattr__(self, "hi", as_fraction(self.hi))
        if self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed)):
            raise ValueError(f"empty interval {self}")

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """Parse ``"[0, 1/4]"``, ``"[3/4, 1)"`` and the CLI shorthand ``"0.4:0.6"`` (closed)."""
        m = _INTERVAL_RE.match(text)
        if m:
            lb, a, b, rb = m.groups()
            return cls(as_fraction(a), as_fraction(b), lb == "[", rb == "]")
        if ":" in text:
            a, b = text.split(":", 1)
            return cls(as_fraction(a), as_fraction(b), True, True)
        raise ValueError(f"cannot parse interval {text!r}")

    def __contains__(self, x) -> bool:
        x = as_fraction(x)
        above = x > self.lo or (self.lo_closed and x == self.lo)
        below = x < self.hi or (self.hi_closed and x == self.hi)
        return above and below

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __str__(self) -> str:
        lb = "[" if self.lo_closed else "("
        rb = "]" if self.hi_closed else ")"
        return f"{lb}{format_fraction(self.lo)}, {format_fraction(self.hi)}{rb}"

    def to_json(self) -> str:
        return str(self)


def merge_intervals(intervals: Iterable[Interval]) -> list[Interval]:
    """Union of intervals as a sorted list of disjoint intervals (touching pieces fused)."""
    items = sorted(intervals, key=lambda iv: (iv.lo, not iv.lo_closed))
    out: list[Interval] = []
    for iv in items:
        if out:
            cur = out[-1]
            touches = iv.lo < cur.hi or (iv.lo == cur.hi and (cur.hi_closed or iv.lo_closed))
            if touches:
                if iv.hi > cur.hi:
                    hi, hi_closed = iv.hi, iv.hi_closed
                elif iv.hi == cur.hi:
                    hi, hi_closed = cur.hi, cur.hi_closed or iv.hi_closed
                else:
                    hi, hi_closed = cur.hi, cur.hi_closed
                out[-1] = Interval(cur.lo, hi, cur.lo_closed, hi_closed)
                continue
        out.append(iv)
    return out


def _open_roots(q: AlphaPolynomial, iv: Interval) -> int:
    """Roots of ``q`` strictly inside ``iv``."""
    if iv.lo == iv.hi:
        return 0
    return sturm_roots(q, iv.lo, iv.hi) - (1 if q(iv.hi) == 0 else 0)


def certify_bound(p: AlphaPolynomial, bound, interval: Interval) -> bool:
    """True iff ``|p(alpha)| > bound`` for every alpha in ``interval``.

    ``p - bound`` and ``p + bound`` must have no root in the open interior; closed
    endpoints are checked by direct evaluation, and one interior sign test fixes
    which side of the band ``p`` lies on.
    """
    bound = as_fraction(bound)
    if bound <= 0:
        raise ValueError("bound must be positive")
    if p.is_constant():
        return abs(p[0]) > bound
    for x, closed in ((interval.lo, interval.lo_closed), (interval.hi, interval.hi_closed)):
        if closed and not abs(p(x)) > bound:
            return False
    if _open_roots(p - bound, interval) or _open_roots(p + bound, interval):
        return False
    return abs(p(interval.midpoint())) > bound


def bound_violations(p: AlphaPolynomial, bound, interval: Interval) -> list[Interval]:
    """Small closed intervals locating where ``|p| <= bound`` fails to be excluded.

    Empty exactly when :func:`certify_bound` succeeds.
    """
    bound = as_fraction(bound)
    if certify_bound(p, bound, interval):
        return []
    if p.is_constant():
        return [interval]
    pts = []
    for q in (p - bound, p + bound):
        for a, b in isolate_roots(q, interval.lo, interval.hi):
            pts.append(Interval(a, b, True, True))
    if not pts:
        # no crossings: the whole interval sits inside the band
        return [interval]
    for x, closed in ((interval.lo, interval.lo_closed), (interval.hi, interval.hi_closed)):
        if closed and not abs(p(x)) > bound:
            pts.append(Interval(x, x, True, True))
    return sorted(set(pts))
