"""Command-line front end.

    boxgalerkin element 4 4 4 [--normalized]
    boxgalerkin coeff periodic 4 4 0
    boxgalerkin hamiltonian --basis legendre:4 --n 6
    boxgalerkin sweep --config run.json --out run.csv --svg run.svg
    boxgalerkin selftest

Exit codes: 0 ok, 1 usage error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

import mpmath
from mpmath import mp, mpc, mpf

from .basis import (
    BasisSpec,
    BoundaryCondition,
    DegenerateBasis,
    UnsupportedPair,
    coeff_dirichlet,
    coeff_neumann,
    coeff_periodic,
)
from .evolution import SimTime
from .experiment import DEFAULT_N_VALUES, DEFAULT_T_VALUES, ExperimentSpec, SweepError, SweepRow, run_sweep
from .numerics import DEFAULT_DIGITS, BudgetExceeded, NonConvergence, PrecisionContext
from .operator import SingularTruncation, normalized_matrix_element, raw_matrix_element, truncated_hamiltonian

CSV_HEADER = "basis,m,bc,j,n,t,error,lambda_min,unitarity_defect"
NUMERICAL_ERRORS = (ArithmeticError, NonConvergence, BudgetExceeded, SingularTruncation, DegenerateBasis)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# formatting ------------------------------------------------------------------

def sci(x, digits: int = 30) -> str:
    """Scientific notation with ``digits`` significant digits."""
    x = mpf(x)
    if x == 0:
        return "0." + "0" * (digits - 1) + "e+0"
    s = mpmath.nstr(x, digits, min_fixed=mpmath.inf, max_fixed=-mpmath.inf, strip_zeros=False)
    # nstr keeps exponent-zero values in fixed notation
    return s if "e" in s else s + "e+0"


def format_value(x) -> str:
    """Integers and exact rationals verbatim, big floats at full working precision."""
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, mpc):
        if x.imag == 0:
            return format_value(x.real)
        sign = "-" if x.imag < 0 else "+"
        re = format_value(x.real) if x.real != 0 else ""
        return f"{re}{sign}{format_value(abs(x.imag))}i"
    x = mpf(x)
    if x == mpmath.floor(x) and abs(x) < mpf(10) ** (mp.dps - 1):
        return str(int(x))
    return mpmath.nstr(x, mp.dps)


# config --------------------------------------------------------------------

def parse_n_values(value) -> tuple[int, ...]:
    """List of ints, a comma list, or ``start:stop:step`` (stop inclusive)."""
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    s = str(value).strip()
    if not s:
        return ()
    if ":" in s:
        parts = [int(p) for p in s.split(":")]
        if len(parts) not in (2, 3):
            raise UsageError(f"bad range {s!r}; use start:stop[:step]")
        step = parts[2] if len(parts) == 3 else 1
        if step <= 0:
            raise UsageError("range step must be positive")
        return tuple(range(parts[0], parts[1] + 1, step))
    return tuple(int(p) for p in s.split(",") if p.strip())


def parse_t_values(value) -> tuple[SimTime, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(SimTime.parse(v) for v in value)
    return tuple(SimTime.parse(p) for p in str(value).split(",") if p.strip())


@dataclass
class RunConfig:
    basis: str = "legendre:4"
    bc: str = "dirichlet"
    j: int = 5
    form: str = "exp"
    n_values: tuple = DEFAULT_N_VALUES
    t_values: tuple = tuple(t.tag for t in DEFAULT_T_VALUES)
    digits: int = DEFAULT_DIGITS
    workers: int = 1
    out: str | None = None
    svg: str | None = None

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def experiment(self) -> ExperimentSpec:
        try:
            basis = BasisSpec.parse(self.basis)
            bc = BoundaryCondition.parse(self.bc)
            ns = parse_n_values(self.n_values)
            ts = parse_t_values(self.t_values)
            if not ns:
                raise UsageError("n_values is empty")
            return ExperimentSpec(basis, bc, int(self.j), ns, ts, int(self.digits), self.form)
        except UsageError:
            raise
        except (ValueError, TypeError) as exc:
            raise UsageError(str(exc)) from None


# output --------------------------------------------------------------------

def row_to_csv(row: SweepRow) -> str:
    return ",".join([
        row.basis, str(row.m), row.bc, str(row.j), str(row.n), row.t.tag,
        sci(row.error), sci(row.lambda_min), sci(row.unitarity_defect),
    ])


def rows_to_csv(rows, incomplete: str | None = None) -> str:
    lines = [CSV_HEADER] + [row_to_csv(r) for r in rows]
    if incomplete is not None:
        lines.append(f"# INCOMPLETE: {incomplete}")
    return "\n".join(lines) + "\n"


_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def render_svg(rows, title: str = "", width: int = 640, height: int = 420) -> str:
    """Error vs n on a log10 y axis, one polyline per t.  Zero errors are dropped."""
    series: dict[str, list] = {}
    for r in rows:
        series.setdefault(r.t.tag, [])
        if r.error > 0:
            series[r.t.tag].append((r.n, float(mpmath.log10(r.error))))
    pts = [p for s in series.values() for p in s]
    left, right, top, bottom = 70, 20, 30, 50
    pw, ph = width - left - right, height - top - bottom
    if pts:
        nmin, nmax = min(p[0] for p in pts), max(p[0] for p in pts)
        ymin, ymax = math.floor(min(p[1] for p in pts)), math.ceil(max(p[1] for p in pts))
    else:
        nmin, nmax, ymin, ymax = 0, 1, -1, 0
    nmax = nmax if nmax > nmin else nmin + 1
    ymax = ymax if ymax > ymin else ymin + 1

    def sx(n):
        return left + pw * (n - nmin) / (nmax - nmin)

    def sy(y):
        return top + ph * (ymax - y) / (ymax - ymin)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle">{title}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    ystep = max(1, (ymax - ymin) // 8)
    for y in range(ymin, ymax + 1, ystep):
        out.append(f'<line x1="{left - 4}" y1="{sy(y):.1f}" x2="{left}" y2="{sy(y):.1f}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{sy(y) + 4:.1f}" text-anchor="end">1e{y}</text>')
    ns = sorted({p[0] for p in pts})
    nstep = max(1, len(ns) // 10)
    for n in ns[::nstep]:
        out.append(f'<text x="{sx(n):.1f}" y="{top + ph + 16}" text-anchor="middle">{n}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">n</text>')
    out.append(f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" transform="rotate(-90 16 {top + ph / 2:.1f})">error</text>')
    for i, (tag, s) in enumerate(series.items()):
        color = _COLORS[i % len(_COLORS)]
        if s:
            path = " ".join(f"{sx(n):.2f},{sy(y):.2f}" for n, y in s)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{path}"/>')
        ly = top + 14 * (i + 1)
        out.append(f'<line x1="{left + pw - 90}" y1="{ly - 4}" x2="{left + pw - 70}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw - 65}" y="{ly}">t = {tag}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# commands ------------------------------------------------------------------

def cmd_element(args) -> int:
    if args.normalized:
        print(format_value(normalized_matrix_element(args.l, args.k, args.m)))
    else:
        print(format_value(raw_matrix_element(args.l, args.k, args.m)))
    return 0


_COEFFS = {"dirichlet": coeff_dirichlet, "neumann": coeff_neumann, "periodic": coeff_periodic}


def cmd_coeff(args) -> int:
    if args.family == "dirichlet" and args.j < 1:
        raise UsageError("Dirichlet modes start at j = 1")
    if args.family == "neumann" and args.j < 0:
        raise UsageError("Neumann modes start at j = 0")
    print(format_value(_COEFFS[args.family](args.l, args.m, args.j)))
    return 0


def cmd_hamiltonian(args) -> int:
    try:
        spec = BasisSpec.parse(args.basis)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    h = truncated_hamiltonian(spec, args.n)
    lines = ["i,k,value"]
    for i in range(h.n):
        for k in range(h.n):
            v = h.matrix[i, k]
            lines.append(f"{i},{k},{sci(v.real) if isinstance(v, mpc) else sci(v)}"
                         + (f",{sci(v.imag)}" if isinstance(v, mpc) and v.imag else ""))
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def build_run_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {}
    for name in ("basis", "bc", "j", "form", "n_values", "t_values", "out", "svg"):
        v = getattr(args, name, None)
        if v is not None:
            overrides[name] = v
    if args.digits is not None:
        overrides["digits"] = args.digits
    if args.workers is not None:
        overrides["workers"] = args.workers
    return replace(cfg, **overrides)


def cmd_sweep(args) -> int:
    cfg = build_run_config(args)
    spec = cfg.experiment()
    try:
        rows = run_sweep(spec, cfg.workers)
    except SweepError as exc:
        _write(cfg.out, rows_to_csv(exc.rows, incomplete=str(exc)))
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write(cfg.out, rows_to_csv(rows))
    if cfg.svg:
        title = f"{spec.basis.tag}, {spec.bc.tag} j={spec.j}"
        Path(cfg.svg).write_text(render_svg(rows, title))
    return 0


def cmd_selftest(args) -> int:
    from .oracle import oracle_equivalence

    m_values = (4, 6) if args.full else (4,)
    span, jmax = (8, 5) if args.full else (4, 3)
    checks = oracle_equivalence(m_values, span, jmax, digits=50)
    failed = [c for c in checks if not c.passed]
    worst = max(checks, key=lambda c: c.rel_error)
    print(f"{len(checks)} checks, {len(failed)} failed, worst {mpmath.nstr(worst.rel_error, 3)} "
          f"({worst.kind} l={worst.l} k/j={worst.k} m={worst.m})")
    for c in failed[:20]:
        print(f"FAIL {c.kind} l={c.l} k/j={c.k} m={c.m}: {mpmath.nstr(c.rel_error, 3)}")
    return 0 if not failed else 2


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="boxgalerkin", description="Galerkin truncations of the particle in a box.")
    p.add_argument("--digits", type=int, default=None, help=f"working precision (default {DEFAULT_DIGITS})")
    p.add_argument("--workers", type=int, default=None, help="processes for sweeps")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("element", help="matrix element <P_l^m, -(P_k^m)''>")
    e.add_argument("l", type=int)
    e.add_argument("k", type=int)
    e.add_argument("m", type=int)
    e.add_argument("--normalized", action="store_true")
    e.set_defaults(func=cmd_element)

    c = sub.add_parser("coeff", help="coefficient <P_l^m, psi_j>")
    c.add_argument("family", choices=sorted(_COEFFS))
    c.add_argument("l", type=int)
    c.add_argument("m", type=int)
    c.add_argument("j", type=int)
    c.set_defaults(func=cmd_coeff)

    h = sub.add_parser("hamiltonian", help="dump the truncated Hamiltonian as CSV")
    h.add_argument("--basis", default="legendre:4")
    h.add_argument("--n", type=int, required=True)
    h.add_argument("--out", default=None)
    h.set_defaults(func=cmd_hamiltonian)

    s = sub.add_parser("sweep", help="approximation error over an (n, t) grid")
    s.add_argument("--config", default=None, help="JSON RunConfig; flags override it")
    s.add_argument("--basis")
    s.add_argument("--bc")
    s.add_argument("--j", type=int)
    s.add_argument("--form", choices=("exp", "cos", "sin"))
    s.add_argument("--n-values", dest="n_values", help="8:40:2 or 8,16,24")
    s.add_argument("--t-values", dest="t_values", help="comma list, e.g. 0.1,1,4/1/pi")
    s.add_argument("--out", default=None)
    s.add_argument("--svg", default=None)
    s.add_argument("--digits", dest="sweep_digits", type=int, default=None, help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("selftest", help="closed forms vs quadrature oracle")
    t.add_argument("--full", action="store_true", help="m in {4, 6}, l, k <= m + 8, |j| <= 5")
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "sweep_digits", None) is not None:
        args.digits = args.sweep_digits
    try:
        if args.command == "sweep":
            return args.func(args)
        with PrecisionContext(args.digits if args.digits is not None else DEFAULT_DIGITS):
            return args.func(args)
    except (UsageError, UnsupportedPair) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
