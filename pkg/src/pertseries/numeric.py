"""Multiprecision perturbation coefficients of ``E_n(z) = n^2 + sum a_k(n) z^k``.

Two independent routes: the Rayleigh-Schroedinger recursion on the finite
section (:func:`rs_numeric`) and contour quadrature of the resolvent expansion
around the square centred at ``n^2`` (:func:`contour_coefficient`).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .family import FamilySpec, couplings, entries, family_from_mapping

MIN_PRECISION = 53
MAX_PRECISION = 4096


class PrecisionError(ValueError):
    pass


class ContourConvergenceError(ArithmeticError):
    def __init__(self, message, previous, current):
        super().__init__(f"{message}: previous={previous!r}, current={current!r}")
        self.previous = previous
        self.current = current


def make_context(precision_bits: int) -> mpmath.ctx_mp.MPContext:
    if not MIN_PRECISION <= precision_bits <= MAX_PRECISION:
        raise PrecisionError(f"precision {precision_bits} bits outside [{MIN_PRECISION}, {MAX_PRECISION}]")
    ctx = mpmath.MPContext()
    ctx.prec = precision_bits
    return ctx


def default_precision(k_max: int) -> int:
    return 128 if k_max <= 8 else 256


@dataclass(frozen=True)
class TaylorCoefficients:
    """``a_0 .. a_{k_max}`` of ``E_n(z)`` for one family and state ``n``."""

    n: int
    family: FamilySpec
    k_max: int
    values: tuple
    method: str = "rs"
    precision_bits: int = 128
    truncation: Optional[int] = field(default=None, compare=False)

    def __getitem__(self, k: int):
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)

    def as_complex(self) -> np.ndarray:
        return np.array([complex(v) for v in self.values])

    def magnitudes(self) -> list[float]:
        return [float(abs(v)) for v in self.values]

    def to_rows(self) -> list[dict]:
        digits = max(17, int(self.precision_bits * math.log10(2)) + 2)
        rows = []
        for k, v in enumerate(self.values):
            ctx = getattr(v, "context", mpmath.mp)
            v = ctx.mpc(v)
            rows.append({"k": k, "re": ctx.nstr(v.real, digits), "im": ctx.nstr(v.imag, digits),
                         "method": self.method, "precision": self.precision_bits})
        return rows

    def to_json(self) -> dict:
        fam = self.family
        return {
            "schema": 1,
            "n": self.n,
            "family": {"kind": fam.kind, "alpha": str(fam.alpha), "M": fam.M, "symmetric": fam.symmetric},
            "k_max": self.k_max,
            "method": self.method,
            "precision": self.precision_bits,
            "coefficients": self.to_rows(),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["k", "re", "im", "method", "precision"], lineterminator="\n")
        w.writeheader()
        w.writerows(self.to_rows())
        return buf.getvalue()

    @classmethod
    def from_json(cls, data: dict | str) -> "TaylorCoefficients":
        if isinstance(data, str):
            data = json.loads(data)
        fam = data["family"]
        if fam.get("kind") == "custom":
            raise ValueError("custom-family coefficient files carry no table; rebuild from the config")
        spec = family_from_mapping({"kind": fam["kind"], "alpha": fam["alpha"], "M": fam.get("M"),
                                    "symmetric": fam.get("symmetric", True)})
        prec = int(data["precision"])
        ctx = make_context(max(prec, MIN_PRECISION))
        vals = tuple(ctx.mpc(ctx.mpf(r["re"]), ctx.mpf(r["im"])) for r in data["coefficients"])
        return cls(int(data["n"]), spec, int(data["k_max"]), vals, data.get("method", "rs"), prec)


def rs_numeric(spec: FamilySpec, n: int, k_max: int, precision_bits: Optional[int] = None,
               N: Optional[int] = None) -> TaylorCoefficients:
    """Rayleigh-Schroedinger coefficients on the ``N x N`` finite section.

    The default ``N = n + k_max + 2`` exceeds the support of every correction
    vector, so the values equal those of the infinite operator.  Indices below 1
    simply do not exist, which is the correct boundary behaviour for small ``n``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    if precision_bits is None:
        precision_bits = default_precision(k_max)
    ctx = make_context(precision_bits)
    if N is None:
        N = n + k_max + 2
    if N < n:
        raise ValueError("truncation must contain the state n")
    bs, cs = couplings(spec, N + 1, ctx)  # b_k, c_k for k = 1..N
    b = [None] + bs  # 1-based
    c = [None] + cs
    gap = [None] + [ctx.mpf(i * i - n * n) for i in range(1, N + 1)]

    zero = ctx.mpf(0)
    psi = [{n: ctx.mpf(1)}]
    a = [ctx.mpf(n * n)]
    for k in range(1, k_max + 1):
        prev = psi[-1]
        lo, hi = max(1, n - k), min(N, n + k)
        Bp = {}
        for i in range(lo, hi + 1):
            s = zero
            if i + 1 <= N and i + 1 in prev:
                s += b[i] * prev[i + 1]
            if i - 1 >= 1 and i - 1 in prev:
                s += c[i - 1] * prev[i - 1]
            Bp[i] = s
        ak = Bp.get(n, zero)
        a.append(ak)
        nxt = {}
        for i in range(lo, hi + 1):
            if i == n:
                continue
            s = -Bp[i]
            for l in range(1, k):
                v = psi[k - l].get(i)
                if v is not None and a[l]:
                    s += a[l] * v
            nxt[i] = s / gap[i]
        psi.append(nxt)
    return TaylorCoefficients(n, spec, k_max, tuple(a), "rs", precision_bits, N)


def a2_closed_form(spec: FamilySpec, n: int, ctx=None):
    """``b_{n-1} c_{n-1} / (2n-1) - b_n c_n / (2n+1)``; the first term is absent for ``n = 1``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if ctx is None:
        ctx = make_context(128)
    _, bn, cn = entries(spec, n, ctx)
    val = -bn * cn / (2 * n + 1)
    if n > 1:
        _, bm, cm = entries(spec, n - 1, ctx)
        val += bm * cm / (2 * n - 1)
    return val


# -- contour oracle --------------------------------------------------------------

def _contour_integrand(lam: np.ndarray, n: int, k: int, bs: np.ndarray, cs: np.ndarray, N: int) -> np.ndarray:
    """``sum_{|j-n|<=k} (lam - n^2) <R (B R)^k e_j, e_j>`` at each point of ``lam``."""
    idx = np.arange(1, N + 1)
    R = 1.0 / (lam[:, None] - (idx * idx)[None, :])  # (P, N)
    total = np.zeros(lam.shape, dtype=complex)
    for j in range(max(1, n - k), min(N, n + k) + 1):
        u = np.zeros((lam.size, N), dtype=complex)
        u[:, j - 1] = R[:, j - 1]
        for _ in range(k):
            Bu = np.zeros_like(u)
            Bu[:, :-1] += bs[None, :] * u[:, 1:]
            Bu[:, 1:] += cs[None, :] * u[:, :-1]
            u = R * Bu
        total += u[:, j - 1]
    return (lam - n * n) * total


def contour_coefficient(spec: FamilySpec, n: int, k: int, quad_points: int = 64,
                        tol: float = 1e-10, max_points: int = 1 << 15) -> complex:
    """``a_k(n)`` by quadrature over the square of half-width ``n`` centred at ``n^2``.

    Composite midpoint rule on each side, doubling the node count and Richardson
    extrapolating in ``h^2`` until two successive diagonal estimates agree.
    """
    if n < 2:
        raise ValueError("the square only isolates n^2 from its neighbours for n >= 2")
    if quad_points < 64:
        raise ValueError("quad_points must be >= 64")
    N = n + k + 1
    bs_l, cs_l = couplings(spec, N)
    bs = np.array([complex(x) for x in bs_l])
    cs = np.array([complex(x) for x in cs_l])
    c0 = float(n * n)
    h = float(n)
    corners = [complex(c0 - h, -h), complex(c0 + h, -h), complex(c0 + h, h), complex(c0 - h, h)]
    sides = list(zip(corners, corners[1:] + corners[:1]))

    def midpoint(m: int) -> tuple[complex, float]:
        t = (np.arange(m) + 0.5) / m
        total = 0j
        scale = 0.0
        for A, B in sides:
            lam = A + t * (B - A)
            f = _contour_integrand(lam, n, k, bs, cs, N)
            total += (B - A) / m * f.sum()
            scale = max(scale, float(np.abs(f).max()))
        return total, scale

    table: list[list[complex]] = []
    m = quad_points
    prev_best = None
    while m <= max_points:
        val, scale = midpoint(m)
        row = [val]
        for j, older in enumerate(table[-1] if table else [], start=1):
            row.append(row[j - 1] + (row[j - 1] - older) / (4**j - 1))
        table.append(row)
        best = row[-1]
        floor = 64 * np.finfo(float).eps * scale * 8 * h
        if prev_best is not None and abs(best - prev_best) <= max(tol * abs(best), floor):
            return best / (2j * math.pi)
        prev_best = best
        m *= 2
    raise ContourConvergenceError("contour quadrature did not converge",
                                  table[-2][-1] / (2j * math.pi), table[-1][-1] / (2j * math.pi))


# -- asymptotics -------------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticReport:
    alpha: Fraction
    k: int
    limit: float
    ns: tuple
    residuals: tuple
    decay_exponent: float
    decay_intercept: float

    def bound_constant(self) -> float:
        """Smallest ``C`` with ``residual <= C / n`` over the sampled ``n``."""
        return max(r * n for n, r in zip(self.ns, self.residuals))


def fit_loglog(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept)


def asymptotic_check(alpha, k: int, n_list: Sequence[int], precision_bits: Optional[int] = None,
                     limit=None) -> AsymptoticReport:
    """Residuals ``|a_k(n) n^{2(k-1) - k alpha} - P_k(k-1, alpha)|`` for the power family."""
    from .exact.alphapoly import as_fraction
    from .symbolic import leading_polynomial

    alpha = as_fraction(alpha)
    if not 0 <= alpha < 2:
        raise ValueError("alpha must lie in [0, 2)")
    if k % 2 or not 2 <= k <= 12:
        raise ValueError("k must be even and at most 12")
    spec = FamilySpec("power", alpha)
    if limit is None:
        limit = leading_polynomial(k)(alpha)
    prec = precision_bits or default_precision(k)
    ctx = make_context(prec)
    a_mp = ctx.mpf(alpha.numerator) / alpha.denominator
    lim = ctx.mpf(Fraction(limit).numerator) / Fraction(limit).denominator
    residuals = []
    for n in n_list:
        ak = rs_numeric(spec, n, k, prec)[k]
        scaled = ctx.mpc(ak) * ctx.mpf(n) ** (2 * (k - 1) - k * a_mp)
        residuals.append(float(abs(scaled - lim)))
    slope, intercept = fit_loglog(n_list, residuals)
    return AsymptoticReport(alpha, k, float(lim), tuple(n_list), tuple(residuals), slope, intercept)
