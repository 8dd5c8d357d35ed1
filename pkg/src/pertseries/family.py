"""Tri-diagonal operator families ``L + zB`` and their finite sections.

``L = diag(k**2)`` and ``B`` has ``b_k`` on the super-diagonal and ``c_k`` on the
sub-diagonal, so ``b_k`` couples positions ``(k, k+1)``.  Indices are 1-based.
"""

from __future__ import annotations

import ast
import csv
import io
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .exact.alphapoly import as_fraction

KINDS = ("power", "alternating", "block2", "custom")

# Tight growth constants |b_k| <= M k^alpha for the built-in kinds.
_DEFAULT_M = {"power": 1.0, "alternating": 3.0, "block2": 2.0}


class FamilyError(ValueError):
    pass


class OutOfRangeError(FamilyError, IndexError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    """Immutable description of a family ``b_k, c_k`` with ``q_k = k**2``.

    ``power``        b_k = c_k = k^alpha
    ``alternating``  b_k = c_k = (2 + (-1)^k) k^alpha
    ``block2``       b_k = c_k = (1 + (-1)^(k-1)) k^alpha   (2x2 diagonal blocks)
    ``custom``       explicit ``table`` of (b_k, c_k) pairs plus an ``extension`` rule:
                     ``"zero"`` or a formula in ``k`` and ``alpha`` (``"b; c"`` for two).

    ``alpha`` is stored as an exact Fraction; floats are read via their repr.
    """

    kind: str
    alpha: Fraction = Fraction(0)
    M: Optional[float] = None
    symmetric: bool = True
    table: tuple = ()
    extension: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FamilyError(f"unknown family kind {self.kind!r}; expected one of {KINDS}")
        alpha = as_fraction(self.alpha)
        if not -4 < alpha < 2:
            raise FamilyError(f"alpha={alpha} outside (-4, 2)")
        object.__setattr__(self, "alpha", alpha)
        M = self.M
        if M is None:
            if self.kind == "custom":
                raise FamilyError("custom families must state their growth constant M")
            M = _DEFAULT_M[self.kind]
        if not M > 0:
            raise FamilyError("M must be positive")
        object.__setattr__(self, "M", float(M))
        table = tuple((complex(b), complex(c)) for b, c in self.table)
        object.__setattr__(self, "table", table)
        if self.kind == "custom":
            if self.extension is None:
                raise FamilyError("custom families must declare an extension rule ('zero' or a formula)")
            if self.extension != "zero":
                _compile_extension(self.extension)
            if self.symmetric:
                for k, (b, c) in enumerate(table, 1):
                    if b != c.conjugate():
                        raise FamilyError(f"symmetric custom family has b_{k} != conj(c_{k})")
        elif table or self.extension:
            raise FamilyError("table/extension only apply to custom families")

    @property
    def label(self) -> str:
        return f"{self.kind}(alpha={self.alpha})"

    def weight(self, k: int) -> int:
        """Integer prefactor of ``k**alpha`` for the built-in kinds."""
        if self.kind == "power":
            return 1
        if self.kind == "alternating":
            return 3 if k % 2 == 0 else 1
        if self.kind == "block2":
            return 2 if k % 2 == 1 else 0
        raise FamilyError("custom families have no closed-form weight")

    def to_config(self, table_path: str | None = None) -> str:
        lines = [f"kind={self.kind}", f"alpha={self.alpha}", f"M={self.M!r}",
                 f"symmetric={'true' if self.symmetric else 'false'}"]
        if self.kind == "custom":
            lines.append(f"extension={self.extension}")
            if table_path:
                lines.append(f"table={table_path}")
        return "\n".join(lines) + "\n"


def _kpow(k: int, alpha: Fraction, ctx=None):
    if ctx is None:
        return float(k) ** float(alpha) if alpha else 1.0
    if not alpha:
        return ctx.mpf(1)
    return ctx.mpf(k) ** (ctx.mpf(alpha.numerator) / alpha.denominator)


def entries(spec: FamilySpec, k: int, ctx=None):
    """``(q_k, b_k, c_k)`` for ``k >= 1``.

    With ``ctx=None`` values are Python floats (complex for custom tables);
    pass an mpmath context to get multiprecision values.
    """
    if k < 1:
        raise OutOfRangeError(f"index k={k} must be >= 1")
    q = k * k
    if spec.kind != "custom":
        w = spec.weight(k)
        b = w * _kpow(k, spec.alpha, ctx) if w else (ctx.mpf(0) if ctx else 0.0)
        return q, b, b
    if k <= len(spec.table):
        b, c = spec.table[k - 1]
        if ctx is not None:
            b, c = ctx.mpc(b), ctx.mpc(c)
        return q, b, c
    if spec.extension == "zero":
        z = ctx.mpc(0) if ctx else 0j
        return q, z, z
    fb, fc = _compile_extension(spec.extension)
    kk = ctx.mpf(k) if ctx else float(k)
    a = (ctx.mpf(spec.alpha.numerator) / spec.alpha.denominator) if ctx else float(spec.alpha)
    b = fb(kk, a)
    c = fc(kk, a) if fc is not None else b
    conv = ctx.mpc if ctx else complex
    return q, conv(b), conv(c)


def couplings(spec: FamilySpec, N: int, ctx=None) -> tuple[list, list]:
    """Lists ``b_1..b_{N-1}`` and ``c_1..c_{N-1}``."""
    bs, cs = [], []
    for k in range(1, N):
        _, b, c = entries(spec, k, ctx)
        bs.append(b)
        cs.append(c)
    return bs, cs


@dataclass(frozen=True)
class TriDiagonalMatrix:
    """N x N tri-diagonal matrix; ``upper[k-1] = z b_k``, ``lower[k-1] = z c_k``."""

    diagonal: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    z: complex = 0j
    family: Optional[FamilySpec] = field(default=None, compare=False)

    @property
    def N(self) -> int:
        return len(self.diagonal)

    def to_dense(self) -> np.ndarray:
        A = np.diag(self.diagonal.astype(complex))
        idx = np.arange(self.N - 1)
        A[idx, idx + 1] = self.upper
        A[idx + 1, idx] = self.lower
        return A

    def is_real_symmetric(self) -> bool:
        return (not np.any(np.imag(self.diagonal)) and not np.any(np.imag(self.upper))
                and np.array_equal(self.upper, self.lower))

    def to_csv(self, fh=None) -> str:
        """Nonzero entries as ``row,col,re,im`` (1-based); returns the text."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row", "col", "re", "im"])
        for i, v in enumerate(self.diagonal, 1):
            w.writerow([i, i, repr(float(np.real(v))), repr(float(np.imag(v)))])
        for i, (u, l) in enumerate(zip(self.upper, self.lower), 1):
            if u != 0:
                w.writerow([i, i + 1, repr(float(u.real)), repr(float(u.imag))])
            if l != 0:
                w.writerow([i + 1, i, repr(float(l.real)), repr(float(l.imag))])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text


def truncate(spec: FamilySpec, z: complex, N: int) -> TriDiagonalMatrix:
    """Leading N x N principal submatrix of ``L + zB``."""
    if N < 2:
        raise FamilyError("truncation size N must be >= 2")
    z = complex(z)
    bs, cs = couplings(spec, N)
    diag = np.array([k * k for k in range(1, N + 1)], dtype=complex)
    upper = z * np.array(bs, dtype=complex)
    lower = z * np.array(cs, dtype=complex)
    return TriDiagonalMatrix(diag, upper, lower, z, spec)


def validate_growth(spec: FamilySpec, k_max: int) -> bool:
    """True iff ``|b_k|, |c_k| <= M k**alpha`` for ``1 <= k <= k_max``."""
    if k_max < 1:
        raise FamilyError("k_max must be >= 1")
    for k in range(1, k_max + 1):
        _, b, c = entries(spec, k)
        cap = spec.M * _kpow(k, spec.alpha)
        slack = cap * 1e-12
        if abs(b) > cap + slack or abs(c) > cap + slack:
            return False
    return True


# -- formula extensions ------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _check_formula(node: ast.AST) -> None:
    if isinstance(node, ast.Expression):
        return _check_formula(node.body)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        _check_formula(node.left)
        _check_formula(node.right)
    elif isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        _check_formula(node.operand)
    elif isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
        pass
    elif isinstance(node, ast.Name) and node.id in ("k", "alpha"):
        pass
    else:
        raise FamilyError(f"unsupported element in extension formula: {ast.dump(node)}")


def _eval(node: ast.AST, k, alpha):
    if isinstance(node, ast.Expression):
        return _eval(node.body, k, alpha)
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, k, alpha), _eval(node.right, k, alpha))
    if isinstance(node, ast.UnaryOp):
        return _UNOPS[type(node.op)](_eval(node.operand, k, alpha))
    if isinstance(node, ast.Constant):
        return node.value
    return k if node.id == "k" else alpha


def _compile_extension(text: str):
    parts = [p.strip() for p in text.split(";")]
    if not 1 <= len(parts) <= 2 or not all(parts):
        raise FamilyError(f"bad extension formula {text!r}")
    fns = []
    for p in parts:
        try:
            tree = ast.parse(p, mode="eval")
        except SyntaxError as exc:
            raise FamilyError(f"bad extension formula {p!r}: {exc}") from None
        _check_formula(tree)
        fns.append(lambda k, a, _t=tree: _eval(_t, k, a))
    return fns[0], (fns[1] if len(fns) == 2 else None)


# -- config files -------------------------------------------------------------

def read_table(path: str | Path) -> list[tuple[complex, complex]]:
    """Table file: one ``b, c`` pair per line (Python complex literals), ``#`` comments."""
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip().replace(" ", "") for p in line.split(",")]
        if len(parts) != 2:
            raise FamilyError(f"table line needs two values: {line!r}")
        rows.append((complex(parts[0]), complex(parts[1])))
    return rows


def parse_config(text: str, base_dir: str | Path = ".") -> dict:
    out = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FamilyError(f"config line is not key=value: {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    if "table" in out:
        p = Path(out["table"])
        out["table"] = p if p.is_absolute() else Path(base_dir) / p
    return out


def family_from_mapping(cfg: dict) -> FamilySpec:
    known = {"kind", "alpha", "M", "symmetric", "table", "extension"}
    unknown = set(cfg) - known
    if unknown:
        raise FamilyError(f"unknown family keys: {sorted(unknown)}")
    kw = {"kind": cfg.get("kind", "power")}
    if "alpha" in cfg:
        kw["alpha"] = as_fraction(cfg["alpha"])
    if cfg.get("M") is not None:
        kw["M"] = float(cfg["M"])
    if "symmetric" in cfg:
        s = cfg["symmetric"]
        kw["symmetric"] = s if isinstance(s, bool) else str(s).lower() in ("1", "true", "yes")
    if cfg.get("table"):
        kw["table"] = tuple(read_table(cfg["table"]))
    if cfg.get("extension"):
        kw["extension"] = cfg["extension"]
    return FamilySpec(**kw)


def load_family(path: str | Path) -> FamilySpec:
    path = Path(path)
    return family_from_mapping(parse_config(path.read_text(), path.parent))


def builtin(kind: str, alpha=0, M=None) -> FamilySpec:
    return FamilySpec(kind=kind, alpha=as_fraction(alpha), M=M)


def kinds() -> Sequence[str]:
    return KINDS
