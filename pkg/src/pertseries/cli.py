"""``pertseries`` command line: polys, coeffs, radius, verify, families.

Exit status: 0 success, 1 verification failure, 2 usage error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

from .family import FamilyError, FamilySpec, family_from_mapping, kinds, parse_config

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

FAMILY_KEYS = {"kind", "alpha", "M", "symmetric", "table", "extension"}
RUN_KEYS = {"n", "n_range", "k_max", "precision_bits", "method", "jobs", "oracle"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    family: Optional[FamilySpec] = None
    n_values: list = field(default_factory=list)
    k_values: list = field(default_factory=list)
    k_max: int = 20
    precision_bits: Optional[int] = None
    method: str = "collision"
    jobs: int = 1
    json: bool = False
    csv: bool = False
    out: Optional[Path] = None
    check_golden: bool = False
    oracle: Optional[str] = None
    which: str = "all"
    row: Optional[int] = None
    interval: Optional[str] = None

    def validate(self) -> "RunConfig":
        if self.command in ("coeffs", "radius") and not self.n_values:
            raise UsageError("empty n range")
        if any(n < 1 for n in self.n_values):
            raise UsageError("n must be >= 1")
        if self.k_max < 1:
            raise UsageError("--k-max must be >= 1")
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        if self.json and self.csv:
            raise UsageError("choose one of --json and --csv")
        return self


def parse_n_range(text: str) -> list[int]:
    """``"a:b"`` or ``"a:b:step"``, inclusive."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"bad range {text!r}; use a:b or a:b:step")
    try:
        a, b = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}") from exc
    if step < 1 or b < a:
        raise UsageError(f"empty range {text!r}")
    return list(range(a, b + 1, step))


def _k_list(values: Optional[list[str]]) -> list[int]:
    out = []
    for v in values or []:
        for piece in v.split(","):
            piece = piece.strip()
            if piece:
                try:
                    out.append(int(piece))
                except ValueError as exc:
                    raise UsageError(f"bad k value {piece!r}") from exc
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    file_cfg: dict = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            file_cfg = parse_config(path.read_text(), path.parent)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        unknown = set(file_cfg) - FAMILY_KEYS - RUN_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")

    def pick(name, default=None):
        v = getattr(args, name, None)
        if v is not None:
            return v
        return file_cfg.get(name, default)

    fam_cfg = {k: v for k, v in file_cfg.items() if k in FAMILY_KEYS}
    if getattr(args, "family", None):
        fam_cfg["kind"] = args.family
    if getattr(args, "alpha", None) is not None:
        fam_cfg["alpha"] = args.alpha
    if getattr(args, "M", None) is not None:
        fam_cfg["M"] = args.M
    family = family_from_mapping(fam_cfg) if fam_cfg or args.command in ("coeffs", "radius", "verify") else None

    n_values: list[int] = []
    if pick("n_range"):
        n_values = parse_n_range(str(pick("n_range")))
    elif pick("n") is not None:
        n_values = [int(pick("n"))]
    prec = pick("precision_bits")
    cfg = RunConfig(
        command=args.command,
        family=family,
        n_values=n_values,
        k_values=_k_list(getattr(args, "k", None)),
        k_max=int(pick("k_max", 20)),
        precision_bits=int(prec) if prec is not None else None,
        method=str(pick("method", "collision")),
        jobs=int(pick("jobs", 1)),
        json=bool(getattr(args, "json", False)),
        csv=bool(getattr(args, "csv", False)),
        out=Path(args.out) if getattr(args, "out", None) else None,
        check_golden=bool(getattr(args, "check_golden", False)),
        oracle=pick("oracle"),
        which=getattr(args, "which", "all") or "all",
        row=getattr(args, "row", None),
        interval=getattr(args, "interval", None),
    )
    return cfg.validate()


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out is not None:
        cfg.out.write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _map(fn: Callable, items: Sequence, jobs: int) -> list:
    # results come back in input order whatever the scheduling
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -- polys -------------------------------------------------------------------------------

def cmd_polys(cfg: RunConfig) -> int:
    from .symbolic import TABLE_ORDERS, K_MAX_LIMIT, expansion, rs_symbolic, vanishing_orders
    from .verify import golden_polynomials

    ks = cfg.k_values or (list(TABLE_ORDERS) if cfg.check_golden else [2])
    if any(not 1 <= k <= K_MAX_LIMIT for k in ks):
        raise UsageError(f"k must lie in [1, {K_MAX_LIMIT}]")
    top = max(ks)
    if top >= 10:
        rs_symbolic(top, progress=lambda k, terms: _progress(f"order {k}: {terms} terms"))
    golden = golden_polynomials() if cfg.check_golden else {}
    records, lines, ok = [], [], True
    for k in ks:
        if k % 2:
            records.append({"k": k, "zero": True})
            lines.append(f"a_{k} = 0 identically (odd order)")
            continue
        exp = expansion(k)
        lead = exp.P(k - 1)
        vanish = vanishing_orders(k)
        rec = {"k": k, "j": k - 1, "coeffs": lead.to_json(), "text": lead.format("a"),
               "vanishing_orders": vanish, "vanishing_ok": vanish == list(range(k - 1))}
        lines.append(f"P_{k}({k - 1}) = {lead.format('a')}")
        if not rec["vanishing_ok"]:
            ok = False
            lines.append(f"  P_{k}(j) nonzero for some j <= {k - 2}")
        if cfg.check_golden:
            if k in golden:
                match = golden[k] == lead
                rec["golden_match"] = match
                ok &= match
                lines.append(f"  golden table: {'match' if match else 'MISMATCH'}")
                lines.append(f"  P_{k}(j) = 0 for j <= {k - 2}: {'yes' if rec['vanishing_ok'] else 'NO'}")
            else:
                lines.append("  golden table: no entry")
        records.append(rec)
    if cfg.json:
        _emit(cfg, json.dumps({"schema": 1, "polynomials": records}, indent=2))
    else:
        _emit(cfg, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


# -- coeffs ------------------------------------------------------------------------------

def _coeffs_job(args):
    from .numeric import contour_coefficient, rs_numeric

    spec, n, k_max, prec, oracle = args
    tc = rs_numeric(spec, n, k_max, prec)
    extra = None
    if oracle == "contour":
        extra = [None] + [contour_coefficient(spec, n, k) if n >= 2 else None for k in range(1, k_max + 1)]
    return tc, extra


def cmd_coeffs(cfg: RunConfig) -> int:
    if cfg.oracle not in (None, "contour"):
        raise UsageError("--oracle accepts only 'contour'")
    jobs = [(cfg.family, n, cfg.k_max, cfg.precision_bits, cfg.oracle) for n in cfg.n_values]
    results = _map(_coeffs_job, jobs, cfg.jobs)
    if cfg.json:
        docs = []
        for tc, extra in results:
            doc = tc.to_json()
            if extra:
                for row, v in zip(doc["coefficients"], extra):
                    row["oracle"] = None if v is None else [float(v.real), float(v.imag)]
            docs.append(doc)
        _emit(cfg, json.dumps(docs[0] if len(docs) == 1 else docs, indent=2))
        return EXIT_OK
    if cfg.csv:
        buf = io.StringIO()
        fields = ["n", "k", "re", "im", "method", "precision"] + (["oracle_re", "oracle_im"] if cfg.oracle else [])
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for tc, extra in results:
            for row in tc.to_rows():
                row = {"n": tc.n, **row}
                if extra:
                    v = extra[row["k"]]
                    row["oracle_re"] = "" if v is None else repr(float(v.real))
                    row["oracle_im"] = "" if v is None else repr(float(v.imag))
                w.writerow(row)
        _emit(cfg, buf.getvalue())
        return EXIT_OK
    lines = [f"# {cfg.family.label}, precision {results[0][0].precision_bits} bits"]
    for tc, extra in results:
        lines.append(f"n = {tc.n}")
        for k, v in enumerate(tc.values):
            v = complex(v)
            s = f"  a_{k:<3} = {v.real:.16g}" + (f" {v.imag:+.16g}i" if v.imag else "")
            if extra and extra[k] is not None:
                s += f"   contour {extra[k].real:.16g}"
            lines.append(s)
    _emit(cfg, "\n".join(lines))
    return EXIT_OK


# -- radius ------------------------------------------------------------------------------

def _radius_job(args):
    from .numeric import rs_numeric
    from .spectra import radius_by_collision, radius_by_roottest

    spec, n, method, k_max, prec = args
    out = []
    if method in ("collision", "both"):
        out.append(radius_by_collision(spec, n))
    if method in ("roottest", "both"):
        out.append(radius_by_roottest(rs_numeric(spec, n, max(k_max, 12), prec or 256)))
    return out


def _target_slope(spec: FamilySpec) -> float:
    a = float(spec.alpha)
    return 2 - a if spec.kind == "power" else 1 - a


def cmd_radius(cfg: RunConfig) -> int:
    from .spectra import radius_scaling_fit

    if cfg.method not in ("collision", "roottest", "both"):
        raise UsageError("--method must be collision, roottest or both")
    k_max = cfg.k_max if cfg.k_max != 20 else 40
    results = _map(_radius_job, [(cfg.family, n, cfg.method, k_max, cfg.precision_bits)
                                 for n in cfg.n_values], cfg.jobs)
    estimates = [e for group in results for e in group]
    primary = [group[0] for group in results]
    fit = None
    if len(primary) >= 5:
        try:
            fit = radius_scaling_fit(primary)
        except ValueError:
            fit = None
    if cfg.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["log_n", "log_R", "n", "R", "method", "flagged"])
        for e in primary:
            if e.finite:
                w.writerow([repr(math.log(e.n)), repr(math.log(e.value)), e.n, repr(e.value), e.method, e.flagged])
        _emit(cfg, buf.getvalue())
    elif cfg.json:
        lines = [e.to_json_line() for e in estimates]
        if fit is not None:
            lines.append(json.dumps({"fit": {"slope": fit.slope, "intercept": fit.intercept,
                                             "target": _target_slope(cfg.family), "excluded": list(fit.excluded)}}))
        _emit(cfg, "\n".join(lines))
    else:
        lines = [f"# {cfg.family.label}"]
        for e in estimates:
            if e.finite:
                w = f"  witness {e.witness.real:.6g}{e.witness.imag:+.6g}i" if e.witness is not None else ""
                flag = "  [truncation-sensitive]" if e.flagged else ""
                lines.append(f"n={e.n:<4} {e.method:<10} R = {e.value:.10g} +- {e.uncertainty:.2g}{w}{flag}")
            else:
                lines.append(f"n={e.n:<4} {e.method:<10} {e.status} (value {e.value})")
        if fit is not None:
            lines.append(f"slope {fit.slope:.4f} (target {_target_slope(cfg.family):g}); excluded n: {list(fit.excluded)}")
        _emit(cfg, "\n".join(lines))
    return EXIT_OK


# -- verify ------------------------------------------------------------------------------

BOUND_GRID = (("power", 0, (1, 2, 3, 4)), ("alternating", 0, (2, 3, 4)), ("block2", 0, (1, 3, 5)),
              ("power", Fraction(1, 2), (2, 3, 4)))


def _table_section(cfg: RunConfig, report):
    from .exact.sturm import Interval
    from .verify import certify_inequality_table, certify_row, golden_polynomials, load_golden, table_text

    if cfg.row is not None or cfg.interval is not None:
        rows = {int(r["k"]): r for r in load_golden()["inequality_table"]}
        k = cfg.row if cfg.row is not None else 2
        if k not in rows:
            raise UsageError(f"no table row for k={k}")
        try:
            pieces = [Interval.parse(cfg.interval)] if cfg.interval else rows[k]["set"]
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        row = certify_row(k, pieces, rows[k]["bound"], golden_polynomials()[k])
        text = f"k={k} |P| > {rows[k]['bound']} on {' U '.join(map(str, row.pieces))}: " + \
               ("certified" if row.certified else "NOT certified")
        for piece, bad in row.violations.items():
            text += f"\n    {piece}: offending {', '.join(map(str, bad[:4]))}"
        report.add("table", row.certified, row.to_json())
        return text
    tab = certify_inequality_table()
    report.add("table", tab.passed, tab.to_json())
    return table_text(tab)


def _bound_section(cfg: RunConfig, report):
    from .verify import verify_bound

    grid = [(cfg.family, n) for n in cfg.n_values] if cfg.n_values else \
        [(FamilySpec(kind, a), n) for kind, a, ns in BOUND_GRID for n in ns]
    lines, details, ok = [], [], True
    for spec, n in grid:
        good, reps, est = verify_bound(spec, n, k_max=20)
        ok &= good
        bad = [r.k for r in reps if not r.satisfied]
        details.append({"family": spec.kind, "alpha": str(spec.alpha), "n": n, "radius": est.value,
                        "rho": reps[0].rho, "violations": bad})
        lines.append(f"{spec.label} n={n}: R~{est.value:.6g}, rho={reps[0].rho:.6g}, k<=20 "
                     + ("all satisfied" if good else f"VIOLATED at k={bad}"))
    report.add("bound", ok, details)
    return "\n".join(lines)


def _radius_upper_section(cfg: RunConfig, report):
    from .verify import verify_radius_upper_bound

    alpha = cfg.family.alpha if cfg.family is not None and cfg.family.kind == "power" else Fraction(0)
    ns = cfg.n_values or [2, 3, 4, 5, 6]
    res = verify_radius_upper_bound(alpha, ns)
    report.add("lemma3", res["passed"], res)
    lines = [f"power alpha={alpha}: k={res['k']}, A={res['A']:.6g}"]
    for r in res["rows"]:
        lines.append(f"  n={r['n']}: collision {r['collision']}, upper {r['upper']:.6g} {'ok' if r['ok'] else 'EXCEEDED'}")
    return "\n".join(lines)


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import VerificationReport

    report = VerificationReport()
    sections = {"table": _table_section, "bound": _bound_section, "lemma3": _radius_upper_section}
    which = list(sections) if cfg.which == "all" else [cfg.which]
    texts = []
    for name in which:
        texts.append(f"== {name} ==\n" + sections[name](cfg, report))
    if cfg.json:
        _emit(cfg, json.dumps(report.to_json(), indent=2, default=str))
    else:
        _emit(cfg, "\n".join(texts) + "\n\n" + report.to_text())
    return EXIT_OK if report.passed else EXIT_FAIL


# -- families ----------------------------------------------------------------------------

FAMILY_TEXT = {
    "power": "b_k = c_k = k^alpha",
    "alternating": "b_k = c_k = (2 + (-1)^k) k^alpha",
    "block2": "b_k = c_k = (1 + (-1)^(k-1)) k^alpha",
    "custom": "table of (b_k, c_k) plus extension rule",
}


def cmd_families(cfg: RunConfig) -> int:
    from .family import entries

    if cfg.family is not None and cfg.family.kind != "custom" or (cfg.family and cfg.family.table):
        spec = cfg.family
        rows = [{"k": k, "q": q, "b": complex(b), "c": complex(c)}
                for k in range(1, min(cfg.k_max, 50) + 1) for q, b, c in [entries(spec, k)]]
        if cfg.json:
            _emit(cfg, json.dumps({"schema": 1, "family": spec.label, "M": spec.M,
                                   "entries": [{"k": r["k"], "q": r["q"], "b": [r["b"].real, r["b"].imag],
                                                "c": [r["c"].real, r["c"].imag]} for r in rows]}, indent=2))
        else:
            lines = [f"# {spec.label}, M = {spec.M:g}"]
            lines += [f"k={r['k']:<3} q={r['q']:<6} b={r['b'].real:.10g} c={r['c'].real:.10g}" for r in rows]
            _emit(cfg, "\n".join(lines))
        return EXIT_OK
    if cfg.json:
        _emit(cfg, json.dumps({"schema": 1, "families": [{"kind": k, "rule": FAMILY_TEXT[k]} for k in kinds()]},
                              indent=2))
    else:
        _emit(cfg, "\n".join(f"{k:<12} {FAMILY_TEXT[k]}" for k in kinds()))
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------

def _add_family(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=[k for k in kinds() if k != "custom"])
    p.add_argument("--alpha", type=str)
    p.add_argument("--M", type=float)
    p.add_argument("--config", help="key=value file with family and run settings")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pertseries", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("polys", help="exact asymptotic polynomials P_k(j, alpha)")
    p.add_argument("-k", "--k", action="append", help="order(s); repeat or comma-separate")
    p.add_argument("--check-golden", action="store_true")
    _add_output(p)

    p = sub.add_parser("coeffs", help="Taylor coefficients a_k(n)")
    _add_family(p)
    p.add_argument("--n", type=int)
    p.add_argument("--n-range")
    p.add_argument("--k-max", type=int)
    p.add_argument("--precision-bits", type=int)
    p.add_argument("--oracle", choices=["contour"])
    p.add_argument("--jobs", type=int)
    _add_output(p)

    p = sub.add_parser("radius", help="convergence radius estimates and scaling fit")
    _add_family(p)
    p.add_argument("--n", type=int)
    p.add_argument("--n-range")
    p.add_argument("--k-max", type=int)
    p.add_argument("--precision-bits", type=int)
    p.add_argument("--method", choices=["collision", "roottest", "both"])
    p.add_argument("--jobs", type=int)
    _add_output(p)

    p = sub.add_parser("verify", help="certify the inequality table and check the bounds")
    p.add_argument("which", nargs="?", default="all", choices=["bound", "table", "lemma3", "all"])
    _add_family(p)
    p.add_argument("--n", type=int)
    p.add_argument("--n-range")
    p.add_argument("--row", type=int)
    p.add_argument("--interval")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("families", help="list families or print entries")
    _add_family(p)
    p.add_argument("--k-max", type=int)
    _add_output(p)
    return parser


COMMANDS = {"polys": cmd_polys, "coeffs": cmd_coeffs, "radius": cmd_radius,
            "verify": cmd_verify, "families": cmd_families}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        cfg = build_config(args)
        if cfg.command == "families" and cfg.k_max == 20 and getattr(args, "k_max", None) is None:
            cfg.k_max = 10
        return COMMANDS[cfg.command](cfg)
    except (UsageError, FamilyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
