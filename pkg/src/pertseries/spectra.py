"""Finite-section spectra of ``L + zB``, eigenvalue continuation in ``z``, branch-point
search and convergence-radius estimates."""

from __future__ import annotations

import cmath
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .family import FamilySpec, couplings, entries, truncate
from .numeric import TaylorCoefficients, fit_loglog

log = logging.getLogger(__name__)

MAX_HALVINGS = 40


class EigenSolverError(ArithmeticError):
    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


class CollisionDetected(ArithmeticError):
    """Continuation could not separate the tracked eigenvalue from a neighbour."""

    def __init__(self, z: complex, value: complex, candidates: Sequence[complex]):
        super().__init__(f"eigenvalue collision near z={z:.12g} (E~{value:.12g})")
        self.z = z
        self.value = value
        self.candidates = list(candidates)


class DegenerateEigenvalueError(ArithmeticError):
    def __init__(self, n: int, other: int, gap: float, where: str = ""):
        msg = f"E_{n} is not simple: eigenvalue #{other} lies within {gap:.3g}"
        super().__init__(f"{msg} ({where})" if where else msg)
        self.n = n
        self.other = other
        self.gap = gap


class TruncationSensitivityError(ArithmeticError):
    pass


def default_truncation(n: int) -> int:
    return max(2 * n, n + 20)


def _sort_key(lam: complex):
    return (round(lam.real, 9), lam.imag)


def _dense(spec: FamilySpec, z: complex, N: int, _cache={}) -> np.ndarray:
    key = (spec, N)
    base = _cache.get(key)
    if base is None:
        bs, cs = couplings(spec, N)
        base = (np.diag(np.arange(1, N + 1, dtype=float) ** 2).astype(complex),
                np.array(bs, dtype=complex), np.array(cs, dtype=complex))
        if len(_cache) > 64:
            _cache.clear()
        _cache[key] = base
    D, bs, cs = base
    A = D.copy()
    idx = np.arange(N - 1)
    A[idx, idx + 1] = z * bs
    A[idx + 1, idx] = z * cs
    return A


def eigenvalues(spec: FamilySpec, z: complex, N: int) -> np.ndarray:
    """All eigenvalues of the ``N x N`` section (unsorted, no residual check)."""
    return np.linalg.eigvals(_dense(spec, complex(z), N))


def eigs_truncated(spec: FamilySpec, z: complex, N: int, tol: float = 1e-10) -> list[complex]:
    """Eigenvalues of the ``N x N`` section sorted by ascending real part.

    Every eigenpair is checked: ``||(A - lam) v|| / ||A|| <= tol``.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    A = _dense(spec, complex(z), N)
    try:
        w, V = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigensolver failed: {exc}", []) from exc
    norm = max(np.linalg.norm(A, 2), 1e-300)
    res = np.linalg.norm(A @ V - V * w[None, :], axis=0) / (norm * np.linalg.norm(V, axis=0))
    vals = sorted((complex(x) for x in w), key=_sort_key)
    if np.any(res > tol):
        raise EigenSolverError(f"eigen-residual {res.max():.3g} exceeds {tol:g}", vals)
    return vals


# -- continuation -------------------------------------------------------------------

def _match(vals: np.ndarray, target: complex) -> tuple[int, float, float]:
    d = np.abs(vals - target)
    order = np.argsort(d)
    d1 = float(d[order[0]])
    d2 = float(d[order[1]]) if len(order) > 1 else math.inf
    return int(order[0]), d1, d2


def _step(spec, N, z0, E0, slope, z1, depth=0):
    """Continue ``E`` from ``z0`` to ``z1``; returns ``(E1, slope1)``."""
    vals = eigenvalues(spec, z1, N)
    pred = E0 + slope * (z1 - z0)
    i, d1, d2 = _match(vals, pred)
    if d2 >= 2 * d1:
        E1 = complex(vals[i])
        dz = z1 - z0
        return E1, ((E1 - E0) / dz if dz else slope)
    if depth >= MAX_HALVINGS:
        raise CollisionDetected(z1, pred, sorted(vals, key=lambda v: abs(v - pred))[:2])
    zm = z0 + (z1 - z0) / 2
    Em, sm = _step(spec, N, z0, E0, slope, zm, depth + 1)
    return _step(spec, N, zm, Em, sm, z1, depth + 1)


def track_eigenvalue(spec: FamilySpec, n: int, z_path: Sequence[complex], N: Optional[int] = None) -> list[complex]:
    """Analytic continuation of ``E_n`` from ``E_n(0) = n^2`` along ``z_path``.

    Each step picks the eigenvalue nearest a linear prediction; when the two best
    candidates are within a factor 2 of each other the step is halved, and after
    40 halvings :class:`CollisionDetected` is raised.
    """
    if not z_path:
        return []
    if z_path[0] != 0:
        raise ValueError("z_path must start at 0")
    N = N or default_truncation(n)
    if n > N:
        raise ValueError("state n lies outside the truncation")
    E = complex(n * n)
    slope = 0j
    out = [E]
    z = 0j
    for z1 in z_path[1:]:
        z1 = complex(z1)
        if z1 == z:
            out.append(E)
            continue
        E, slope = _step(spec, N, z, E, slope, z1)
        z = z1
        out.append(E)
    return out


def tracked_state(spec: FamilySpec, n: int, z: complex, N: Optional[int] = None, steps: int = 32) -> complex:
    z = complex(z)
    if z == 0:
        return complex(n * n)
    path = [z * t for t in np.linspace(0.0, 1.0, steps + 1)]
    return track_eigenvalue(spec, n, path, N)[-1]


# -- radius estimates ------------------------------------------------------------------

@dataclass(frozen=True)
class RadiusEstimate:
    n: int
    value: float
    method: str
    uncertainty: float
    witness: Optional[complex] = None
    diagnostics: dict = field(default_factory=dict, compare=False)
    status: str = "ok"  # ok | no_collision | infinite
    flagged: bool = False
    N: Optional[int] = None
    family: Optional[FamilySpec] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("radius estimate must be positive")
        if self.method == "collision" and self.status == "ok" and self.witness is None:
            raise ValueError("collision estimates need a witness")

    @property
    def finite(self) -> bool:
        return self.status == "ok" and math.isfinite(self.value)

    def to_json(self) -> dict:
        fam = self.family
        return {
            "n": self.n,
            "alpha": str(fam.alpha) if fam else None,
            "family": fam.kind if fam else None,
            "method": self.method,
            "value": self.value if math.isfinite(self.value) else "inf",
            "uncertainty": self.uncertainty if math.isfinite(self.uncertainty) else "inf",
            "witness_re": None if self.witness is None else self.witness.real,
            "witness_im": None if self.witness is None else self.witness.imag,
            "N": self.N,
            "status": self.status,
            "flagged": self.flagged,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False)


def block_branch_points(m: int, alpha, coupling_scale: float = 2.0) -> tuple[complex, complex]:
    """Branch points ``+-i (V - T) / (2 b)`` of the m-th 2x2 block.

    ``T = (2m-1)^2``, ``V = (2m)^2`` and ``b = coupling_scale * (2m-1)^alpha``.  The
    block2 family has ``b_{2m-1} = 2 (2m-1)^alpha``, hence the default scale 2;
    ``coupling_scale=1`` gives the undoubled normalisation ``(4m-1)/(2(2m-1)^alpha)``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    b = coupling_scale * (2 * m - 1) ** float(alpha)
    r = (4 * m - 1) / (2 * b)
    return complex(0, r), complex(0, -r)


def radius_by_roottest(coeffs: TaylorCoefficients, tail_start: Optional[int] = None) -> RadiusEstimate:
    """Cauchy-Hadamard estimate from the even coefficients.

    ``log|a_k| / k`` is extrapolated linearly in ``1/k`` through consecutive even
    orders; the estimate is the last extrapolant.  The uncertainty is the larger of
    the spread of the last three extrapolants and the size of the last correction.
    """
    k_max = coeffs.k_max
    if tail_start is None:
        tail_start = max(2, k_max // 2)
    ks, ys = [], []
    for k in range(tail_start, k_max + 1):
        if k % 2 or k == 0:
            continue
        v = abs(coeffs.values[k])
        if v == 0:
            continue
        ks.append(k)
        ys.append(float(_mplog(v)) / k)
    even_total = len([k for k in range(tail_start, k_max + 1) if k % 2 == 0 and k > 0])
    if not ks and even_total >= 6:
        return RadiusEstimate(coeffs.n, math.inf, "root_test", math.inf, status="infinite",
                              diagnostics={"reason": "all tail coefficients vanish"}, family=coeffs.family)
    if len(ks) < 6:
        raise ValueError(f"root test needs >= 6 nonzero even coefficients from k={tail_start}; have {len(ks)}")
    extrap = []
    for i in range(1, len(ks)):
        x0, x1 = 1.0 / ks[i - 1], 1.0 / ks[i]
        slope = (ys[i] - ys[i - 1]) / (x1 - x0)
        intercept = ys[i] - slope * x1
        extrap.append(math.exp(-intercept))
    last3 = extrap[-3:]
    raw = [math.exp(-y) for y in ys]
    spread = max(last3) - min(last3)
    # the spread alone misses the bias of a k^(-3/2) prefactor; the applied correction bounds it
    correction = abs(extrap[-1] - raw[-1])
    return RadiusEstimate(coeffs.n, extrap[-1], "root_test", max(spread, correction),
                          diagnostics={"orders": ks, "extrapolants": extrap, "raw": raw,
                                       "spread": spread, "correction": correction},
                          N=coeffs.truncation, family=coeffs.family)


def _mplog(v):
    try:
        return math.log(v)
    except (OverflowError, ValueError, TypeError):
        import mpmath

        return float(mpmath.log(v))


# collision search --------------------------------------------------------------------

@dataclass
class _RayScan:
    theta: float
    rhos: list
    values: list
    gaps: list
    collision: Optional[CollisionDetected] = None


def _scan_ray(spec, n, N, theta, r_max, gap_tol, max_step) -> _RayScan:
    u = cmath.exp(1j * theta)
    scan = _RayScan(theta, [0.0], [complex(n * n)], [])
    vals = eigenvalues(spec, 0, N)
    scan.gaps.append(_gap(vals, complex(n * n)))
    rho, E, slope = 0.0, complex(n * n), 0j
    step = max_step / 4
    while rho < r_max:
        r1 = min(rho + step, r_max)
        try:
            E1, s1 = _step(spec, N, rho * u, E, slope, r1 * u)
        except CollisionDetected as hit:
            scan.collision = hit
            break
        vals = eigenvalues(spec, r1 * u, N)
        g = _gap(vals, E1)
        # shrink the step if the eigenvalue moved a large fraction of the gap
        if abs(E1 - E) > 0.25 * max(g, scan.gaps[-1]) and step > max_step * 2.0**-30:
            step /= 2
            continue
        rho, E, slope = r1, E1, s1
        scan.rhos.append(rho)
        scan.values.append(E)
        scan.gaps.append(g)
        if g < gap_tol:
            scan.collision = CollisionDetected(rho * u, E, [E])
            break
        step = min(step * 1.5, max_step)
    return scan


def _gap(vals: np.ndarray, E: complex) -> float:
    d = np.sort(np.abs(vals - E))
    return float(d[1]) if len(d) > 1 else math.inf


def _candidates(scan: _RayScan, limit: int = 3) -> list[int]:
    g = scan.gaps
    idx = [i for i in range(1, len(g) - 1) if g[i] <= g[i - 1] and g[i] <= g[i + 1]]
    if scan.collision is not None or (len(g) > 1 and g[-1] < g[-2]):
        idx.append(len(g) - 1)
    return idx[:limit]


def _pair(vals: np.ndarray, center: complex) -> tuple[complex, complex]:
    order = np.argsort(np.abs(vals - center))
    return complex(vals[order[0]]), complex(vals[order[1]])


def refine_branch_point(spec: FamilySpec, N: int, z0: complex, E_a: complex, E_b: complex,
                        max_iter: int = 80) -> tuple[complex, complex, float]:
    """Secant iteration on ``h(z) = (E_a(z) - E_b(z))^2``, analytic near an exceptional point.

    Returns ``(z*, E*, last_step)``.
    """
    center = (E_a + E_b) / 2

    def h(z):
        nonlocal center
        a, b = _pair(eigenvalues(spec, z, N), center)
        center = (a + b) / 2
        return (a - b) ** 2, center

    za = complex(z0)
    zb = za * (1 + 1e-3) if za != 0 else 1e-3j
    ha, _ = h(za)
    hb, cb = h(zb)
    step = abs(zb - za)
    for _ in range(max_iter):
        if hb == ha:
            break
        zc = zb - hb * (zb - za) / (hb - ha)
        za, ha = zb, hb
        zb = zc
        hb, cb = h(zb)
        step = abs(zb - za)
        if step <= 1e-13 * max(1.0, abs(zb)):
            break
    return zb, cb, step


def _coalesced(spec, N, z_star, E_star) -> bool:
    # a defective pair only separates to ~sqrt(eps) times the matrix scale
    a, b = _pair(eigenvalues(spec, z_star, N), E_star)
    return abs(a - b) <= 1e-6 * N * N


def _validate(spec, n, N, z_star, E_star) -> bool:
    """Does the principal branch of ``E_n`` run into the collision at ``z_star``?"""
    if abs(z_star) == 0 or not _coalesced(spec, N, z_star, E_star):
        return False
    try:
        path = [z_star * t for t in np.linspace(0.0, 0.995, 64)]
        E = track_eigenvalue(spec, n, path, N)[-1]
    except CollisionDetected:
        return False
    vals = eigenvalues(spec, path[-1], N)
    a, b = _pair(vals, E_star)
    sep = abs(a - b)
    return min(abs(E - a), abs(E - b)) <= 1e-6 * max(1.0, abs(E)) + 1e-9 * sep and sep < _gap(vals, a) * 4


def radius_by_collision(spec: FamilySpec, n: int, theta_count: int = 16, r_max: Optional[float] = None,
                        N: Optional[int] = None, gap_tol: Optional[float] = None,
                        stability_check: bool = True) -> RadiusEstimate:
    """Distance to the nearest eigenvalue collision on the principal branch of ``E_n``.

    Rays ``theta = i pi / theta_count`` on ``[0, pi)`` are scanned (only ``[0, pi/2]``
    when the family is conjugation-symmetric); gap minima along each ray seed a
    secant refinement of the exceptional point, which is then checked against the
    continued branch.  The result is re-derived at ``N + 10``.
    """
    if theta_count < 8:
        raise ValueError("theta_count must be >= 8")
    N = N or default_truncation(n)
    if N < n + 2:
        raise ValueError("truncation too small for state n")
    r_max_auto = r_max is None
    if r_max_auto:
        r_max = default_r_max(spec, n)
    if gap_tol is None:
        gap_tol = 1e-6 * max(1.0, n * n)
    thetas = [i * math.pi / theta_count for i in range(theta_count)]
    if _conjugation_symmetric(spec):
        thetas = [t for t in thetas if t <= math.pi / 2 + 1e-12]

    found = _search(spec, n, N, thetas, r_max, gap_tol)
    widen = 0
    while not found and r_max_auto and widen < 2:
        r_max *= 2
        widen += 1
        found = _search(spec, n, N, thetas, r_max, gap_tol)

    if not found:
        return RadiusEstimate(n, r_max, "collision", 0.0, None,
                              diagnostics={"rays": len(thetas), "reason": "no collision found"},
                              status="no_collision", N=N, family=spec)
    found.sort(key=lambda t: t[0])
    R, z_star, E_star, step = found[0]
    uncertainty = max(step, 1e-12 * R)
    diagnostics = {"rays": len(thetas), "candidates": len(found), "E_star": [E_star.real, E_star.imag],
                   "r_max": r_max}
    flagged = False
    if stability_check:
        vals = eigenvalues(spec, z_star, N + 10)
        a, b = _pair(vals, E_star)
        z2, E2, step2 = refine_branch_point(spec, N + 10, z_star, a, b)
        move = abs(abs(z2) - R) if _coalesced(spec, N + 10, z2, E2) else math.inf
        diagnostics["stability_move"] = move
        flagged = move > max(uncertainty, 1e-9 * R)
        uncertainty = max(uncertainty, move, step2)
    return RadiusEstimate(n, R, "collision", uncertainty, z_star, diagnostics, "ok", flagged, N, spec)


def _search(spec, n, N, thetas, r_max, gap_tol):
    found: list[tuple[float, complex, complex, float]] = []
    max_step = r_max / 48
    for theta in thetas:
        scan = _scan_ray(spec, n, N, theta, r_max, gap_tol, max_step)
        u = cmath.exp(1j * theta)
        for i in _candidates(scan):
            if scan.collision is not None and i == len(scan.gaps) - 1:
                z0 = scan.collision.z
                Ea = scan.collision.value
            else:
                z0 = scan.rhos[i] * u
                Ea = scan.values[i]
            vals = eigenvalues(spec, z0, N)
            a, b = _pair(vals, Ea)
            z_star, E_star, step = refine_branch_point(spec, N, z0, a, b)
            if not _validate(spec, n, N, z_star, E_star):
                continue
            if abs(z_star) > 2 * r_max:
                continue
            found.append((abs(z_star), z_star, E_star, step))
            break
    return found


def _conjugation_symmetric(spec: FamilySpec) -> bool:
    if spec.kind != "custom":
        return True
    return spec.symmetric and all(b.imag == 0 and c.imag == 0 for b, c in spec.table)


def default_r_max(spec: FamilySpec, n: int) -> float:
    """Search radius: the larger of twice the root-test estimate and a growth-law guess."""
    from .numeric import rs_numeric

    guess = 2.0 * (n + 1) ** max(2 - float(spec.alpha), 1.0) / spec.M
    try:
        est = radius_by_roottest(rs_numeric(spec, n, 40, 128))
        if est.finite:
            guess = max(guess, 2.0 * est.value)
    except ValueError:
        pass
    return guess


# -- Rayleigh quotient diagnostics -------------------------------------------------------

@dataclass(frozen=True)
class RayleighDiagnostics:
    n: int
    z: complex
    energy: complex
    ell: float
    b_form: complex
    identity_residual: float
    holder_slack: float


def rayleigh_diagnostics(spec: FamilySpec, n: int, z: complex, N: Optional[int] = None,
                         gap_tol: float = 1e-8) -> RayleighDiagnostics:
    """``ell = <Lg, g>`` and ``b = <Bg, g>`` for the normalized eigenvector ``g`` of ``E_n(z)``."""
    N = N or default_truncation(n)
    z = complex(z)
    A = _dense(spec, z, N)
    w, V = np.linalg.eig(A)
    try:
        E_track = tracked_state(spec, n, z, N)
    except CollisionDetected as hit:
        order = np.argsort(np.abs(w - hit.value))
        raise DegenerateEigenvalueError(n, int(order[1]) + 1, 0.0,
                                        f"continuation from 0 meets a collision near z={hit.z:.6g}") from hit
    d = np.abs(w - E_track)
    order = np.argsort(d)
    i = int(order[0])
    E = complex(w[i])
    others = np.abs(w - E)
    others[i] = np.inf
    j = int(np.argmin(others))
    if others[j] < gap_tol * max(1.0, abs(E)):
        raise DegenerateEigenvalueError(n, j + 1, float(others[j]))
    g = V[:, i] / np.linalg.norm(V[:, i])
    k = np.arange(1, N + 1, dtype=float)
    ell = float(np.sum(k * k * np.abs(g) ** 2))
    bs, cs = couplings(spec, N)
    bs = np.array(bs, dtype=complex)
    cs = np.array(cs, dtype=complex)
    b_form = complex(np.sum(cs * g[:-1] * np.conj(g[1:]) + bs * g[1:] * np.conj(g[:-1])))
    residual = abs(ell + z * b_form - E)
    slack = 2 * spec.M * ell ** (float(spec.alpha) / 2) - abs(b_form)
    return RayleighDiagnostics(n, z, E, ell, b_form, residual, slack)


# -- scaling fits --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    residuals: tuple
    ns: tuple
    excluded: tuple

    def csv_rows(self, estimates: Sequence[RadiusEstimate]) -> list[tuple[float, float]]:
        return [(math.log(e.n), math.log(e.value)) for e in estimates if e.n in self.ns]


def radius_scaling_fit(estimates: Sequence[RadiusEstimate], min_points: int = 5) -> ScalingFit:
    """Least-squares slope of ``log R_n`` against ``log n`` over usable estimates.

    Infinite, collision-less and truncation-flagged estimates are excluded and listed.
    """
    use = [e for e in estimates if e.finite and not e.flagged]
    excluded = tuple(e.n for e in estimates if not (e.finite and not e.flagged))
    if len(use) < min_points:
        raise ValueError(f"need >= {min_points} usable estimates, have {len(use)}")
    ns = [e.n for e in use]
    vals = [e.value for e in use]
    slope, intercept = fit_loglog(ns, vals)
    resid = tuple(float(math.log(v) - (slope * math.log(n) + intercept)) for n, v in zip(ns, vals))
    return ScalingFit(slope, intercept, resid, tuple(ns), excluded)
