"""Executable checks: the coefficient bound with explicit constants, the radius upper
bound from a nonvanishing coefficient, the polynomial inequality table and the
empirical lower-bound constant."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, Optional, Sequence

from .exact.alphapoly import AlphaPolynomial, as_fraction, format_fraction
from .exact.sturm import Interval, bound_violations, certify_bound, merge_intervals
from .family import FamilySpec
from .numeric import TaylorCoefficients, make_context, rs_numeric
from .spectra import RadiusEstimate

GOLDEN_FILE = "golden_tables.json"
GOLDEN_SHA256 = "1dffc414076650f98e2458c2ab4f5f1d38075c57f9e4c964d8ba1ef777918a00"
COVERAGE = Interval(Fraction(0), Fraction(11, 6), True, False)


class GoldenDataError(RuntimeError):
    pass


# -- golden data ------------------------------------------------------------------------

def golden_bytes() -> bytes:
    return resources.files("pertseries").joinpath("data", GOLDEN_FILE).read_bytes()


def load_golden(check: bool = True) -> dict:
    raw = golden_bytes()
    if check:
        digest = hashlib.sha256(raw).hexdigest()
        if digest != GOLDEN_SHA256:
            raise GoldenDataError(f"golden table checksum mismatch: {digest}")
    data = json.loads(raw)
    if data.get("schema") != 1:
        raise GoldenDataError("unsupported golden schema")
    return data


def golden_polynomials() -> dict[int, AlphaPolynomial]:
    data = load_golden()
    return {int(k): AlphaPolynomial.from_json(v) for k, v in data["leading_polynomials"].items()}


# -- coefficient bound -------------------------------------------------------------------

def _check_alpha(alpha) -> float:
    a = float(alpha)
    if not 0 <= a < 2:
        raise ValueError(f"alpha={alpha} outside [0, 2)")
    return a


def bound_constants(alpha, M: float) -> tuple[float, float]:
    """``(C_1, C)`` with ``C_1 = (1 - a/2)(5 M 2^{a/2})^{2/(2-a)}`` and ``C = 3 M (2 + 2 C_1)^{a/2}``."""
    a = _check_alpha(alpha)
    c1 = (1 - a / 2) * (5 * M * 2 ** (a / 2)) ** (2 / (2 - a))
    c = 3 * M * (2 + 2 * c1) ** (a / 2)
    return c1, c


def ms_bound_rhs(alpha, M: float, n: int, rho: float, k: int) -> float:
    """``C rho^{-(k-1)} (n^a + rho^{a/(2-a)})``."""
    a = _check_alpha(alpha)
    if k < 1:
        raise ValueError("k must be >= 1")
    if not rho > 0:
        raise ValueError("rho must be positive")
    _, c = bound_constants(a, M)
    return c * rho ** (-(k - 1)) * (n**a + rho ** (a / (2 - a)))


@dataclass(frozen=True)
class BoundReport:
    alpha: float
    M: float
    n: int
    k: int
    rho: float
    lhs: float
    rhs: float
    C1: float
    C: float

    @property
    def satisfied(self) -> bool:
        return self.lhs <= self.rhs

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "M": self.M, "n": self.n, "k": self.k, "rho": self.rho,
                "lhs": self.lhs, "rhs": self.rhs, "satisfied": self.satisfied,
                "constants": {"C_1": self.C1, "C": self.C}}


def check_coefficient_bound(coeffs: TaylorCoefficients, M: Optional[float] = None,
                            radius_est: Optional[RadiusEstimate] = None,
                            rho_fracs: Sequence[float] = (0.9,), rhos: Sequence[float] = ()) -> list[BoundReport]:
    """One report per ``(k, rho)`` for ``k = 1..k_max``.

    ``rho = frac * (value - uncertainty)`` for each fraction, plus any explicit ``rhos``.
    Violations are returned, never filtered.
    """
    spec = coeffs.family
    if not (spec.symmetric or spec.alpha < 1):
        raise ValueError("the bound covers symmetric families or alpha < 1")
    M = spec.M if M is None else M
    radii = list(rhos)
    if radius_est is not None:
        base = radius_est.value - radius_est.uncertainty
        if not base > 0:
            raise ValueError("radius estimate minus uncertainty is not positive")
        for f in rho_fracs:
            if not 0 < f < 1:
                raise ValueError("rho fractions must lie in (0, 1)")
            radii.append(f * base)
    if not radii:
        raise ValueError("no rho values given")
    c1, c = bound_constants(spec.alpha, M)
    out = []
    for rho in radii:
        for k in range(1, coeffs.k_max + 1):
            lhs = float(abs(coeffs[k]))
            out.append(BoundReport(float(spec.alpha), M, coeffs.n, k, rho, lhs,
                                   ms_bound_rhs(spec.alpha, M, coeffs.n, rho, k), c1, c))
    return out


def radius_upper_from_ak(alpha, M: float, A: float, k: int, n: int) -> float:
    """``C~ n^{2-a}`` with ``C~ = max(1, (2C/A)^g)``, ``g = (2-a)/(k(2-a) - 2)``."""
    a = float(as_fraction(alpha))
    if not a < 2 - 2 / k:
        raise ValueError(f"need alpha < 2 - 2/k = {2 - 2 / k:g}")
    if not A > 0:
        raise ValueError("A must be positive")
    _, c = bound_constants(a, M)
    g = (2 - a) / (k * (2 - a) - 2)
    return max(1.0, (2 * c / A) ** g) * n ** (2 - a)


# -- inequality table --------------------------------------------------------------------

@dataclass
class InequalityTableRow:
    k: int
    pieces: list
    bound: Fraction
    certified: bool = False
    violations: dict = field(default_factory=dict)
    floors: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "bound": format_fraction(self.bound),
            "set": [str(p) for p in self.pieces],
            "certified": self.certified,
            "violations": {str(p): [str(v) for v in vs] for p, vs in self.violations.items()},
            "certified_floor": {str(p): format_fraction(f) for p, f in self.floors.items()},
        }


@dataclass
class TableReport:
    rows: list
    union: list
    coverage: Interval
    coverage_ok: bool

    @property
    def passed(self) -> bool:
        return self.coverage_ok and all(r.certified for r in self.rows)

    def to_json(self) -> dict:
        return {"rows": [r.to_json() for r in self.rows], "union": [str(u) for u in self.union],
                "coverage": str(self.coverage), "coverage_ok": self.coverage_ok, "passed": self.passed}


def certified_floor(p: AlphaPolynomial, piece: Interval, ceiling: Fraction, steps: int = 24) -> Fraction:
    """Largest ``b`` found by bisection on ``[0, ceiling]`` with ``|p| > b`` certified on ``piece``."""
    lo, hi = Fraction(0), as_fraction(ceiling)
    if certify_bound(p, hi, piece):
        return hi
    for _ in range(steps):
        mid = (lo + hi) / 2
        if certify_bound(p, mid, piece):
            lo = mid
        else:
            hi = mid
    return lo


def certify_row(k: int, pieces: Iterable[Interval | str], bound, poly: Optional[AlphaPolynomial] = None,
                floors: bool = True) -> InequalityTableRow:
    """Certify ``|P_k(k-1, a)| > bound`` on every piece with Sturm sequences."""
    from .symbolic import leading_polynomial

    pieces = [Interval.parse(p) if isinstance(p, str) else p for p in pieces]
    bound = as_fraction(bound)
    p = poly if poly is not None else leading_polynomial(k)
    row = InequalityTableRow(k, pieces, bound)
    ok = True
    for piece in pieces:
        bad = bound_violations(p, bound, piece)
        if bad:
            ok = False
            row.violations[piece] = bad
            if floors:
                row.floors[piece] = certified_floor(p, piece, bound)
    row.certified = ok
    return row


def certify_inequality_table(rows: Optional[Sequence[dict]] = None, use_golden_polys: bool = True,
                             floors: bool = True) -> TableReport:
    """Certify each tabulated row and check that the union of the sets is ``[0, 11/6)``.

    Polynomials come from the checksummed golden file unless ``use_golden_polys=False``,
    in which case the symbolic engine recomputes them.
    """
    data = load_golden()
    rows = rows if rows is not None else data["inequality_table"]
    polys = golden_polynomials() if use_golden_polys else {}
    out = [certify_row(int(r["k"]), r["set"], r["bound"], polys.get(int(r["k"])), floors) for r in rows]
    union = merge_intervals(piece for r in out for piece in r.pieces)
    coverage = Interval.parse(data.get("coverage", str(COVERAGE)))
    return TableReport(out, union, coverage, union == [coverage])


# -- empirical lower-bound constant ------------------------------------------------------

@dataclass(frozen=True)
class LowerBoundReport:
    k: int
    alpha: Fraction
    A: float
    n_at_min: int
    values: tuple
    ns: tuple
    zero_flag: bool
    onset: Optional[int] = None

    def to_json(self) -> dict:
        return {"k": self.k, "alpha": str(self.alpha), "A": self.A, "n_at_min": self.n_at_min,
                "zero_flag": self.zero_flag, "onset": self.onset}


def lower_bound_constant(k: int, alpha, n_list: Sequence[int], family: str = "power",
                         threshold=None, precision_bits: Optional[int] = None) -> LowerBoundReport:
    """``A = min_n |a_k(n)| / n^{k a - 2(k-1)}`` over ``n_list``.

    With ``threshold`` the onset is the smallest sampled ``n`` from which every
    scaled value stays above it (an empirical stand-in for the unspecified ``N_a``).
    """
    alpha = as_fraction(alpha)
    spec = FamilySpec(family, alpha)
    ctx = make_context(precision_bits or (128 if k <= 8 else 256))
    a_mp = ctx.mpf(alpha.numerator) / alpha.denominator
    ns = sorted(n_list)
    if not ns:
        raise ValueError("n_list is empty")
    vals = []
    for n in ns:
        ak = rs_numeric(spec, n, k, ctx.prec)[k]
        vals.append(float(abs(ak) / ctx.mpf(n) ** (k * a_mp - 2 * (k - 1))))
    i = min(range(len(vals)), key=vals.__getitem__)
    onset = None
    if threshold is not None:
        t = float(as_fraction(threshold))
        for j in range(len(ns) - 1, -1, -1):
            if vals[j] <= t:
                break
            onset = ns[j]
    return LowerBoundReport(k, alpha, vals[i], ns[i], tuple(vals), tuple(ns), vals[i] == 0, onset)


# -- reports -----------------------------------------------------------------------------

@dataclass
class VerificationReport:
    sections: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, details) -> None:
        self.sections[name] = {"passed": bool(passed), "details": details}

    @property
    def passed(self) -> bool:
        return all(s["passed"] for s in self.sections.values())

    def to_json(self) -> dict:
        return {"schema": 1, "passed": self.passed, "sections": self.sections}

    def to_text(self) -> str:
        width = max([len("overall")] + [len(n) for n in self.sections])
        lines = [f"{'check':<{width}}  result"]
        for name, s in self.sections.items():
            lines.append(f"{name:<{width}}  {'PASS' if s['passed'] else 'FAIL'}")
        lines.append(f"{'overall':<{width}}  {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def table_text(report: TableReport) -> str:
    lines = []
    for r in report.rows:
        status = "certified" if r.certified else "NOT certified"
        lines.append(f"k={r.k:<3} |P| > {format_fraction(r.bound):<6} on {' U '.join(map(str, r.pieces))}: {status}")
        for piece, bad in r.violations.items():
            floor = r.floors.get(piece)
            extra = f"; certified floor {format_fraction(floor)} (~{float(floor):.6g})" if floor is not None else ""
            lines.append(f"    {piece}: offending {', '.join(map(str, bad[:4]))}{' ...' if len(bad) > 4 else ''}{extra}")
    cov = "ok" if report.coverage_ok else "MISMATCH"
    lines.append(f"union = {' U '.join(map(str, report.union))} vs {report.coverage}: {cov}")
    return "\n".join(lines)


def verify_bound(spec: FamilySpec, n: int, k_max: int = 20, rho_frac: float = 0.9,
                 radius: Optional[RadiusEstimate] = None) -> tuple[bool, list[BoundReport], RadiusEstimate]:
    from .spectra import radius_by_collision

    est = radius if radius is not None else radius_by_collision(spec, n)
    if not est.finite:
        raise ArithmeticError(f"no finite collision radius for n={n}")
    coeffs = rs_numeric(spec, n, k_max)
    reports = check_coefficient_bound(coeffs, spec.M, est, (rho_frac,))
    return all(r.satisfied for r in reports), reports, est


def verify_radius_upper_bound(alpha, n_list: Sequence[int], k: Optional[int] = None) -> dict:
    """Compare ``radius_upper_from_ak`` (empirical ``A``) against collision radii, power family."""
    from .spectra import radius_by_collision

    alpha = as_fraction(alpha)
    if k is None:
        k = next(int(r["k"]) for r in load_golden()["inequality_table"]
                 if any(alpha in Interval.parse(p) for p in r["set"]))
    spec = FamilySpec("power", alpha)
    lb = lower_bound_constant(k, alpha, n_list)
    rows = []
    ok = True
    for n in n_list:
        est = radius_by_collision(spec, n)
        upper = radius_upper_from_ak(alpha, spec.M, lb.A, k, n)
        good = (not est.finite) or est.value <= upper
        ok &= good
        rows.append({"n": n, "collision": est.value if est.finite else None, "upper": upper, "ok": good})
    return {"passed": ok, "k": k, "A": lb.A, "rows": rows}
