"""Command-line front end: ``riceie eval | sweep | figure | validate``.

Exit codes: 0 success, 1 domain or usage error, 2 numerical non-convergence,
3 validation failure.
"""

from __future__ import annotations

import argparse
import enum
import io
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .bounds import bracket, eps_ar
from .errors import ConvergenceError, DomainError
from .ie import DEFAULT_MAX_TERMS, EvalPoint, Method, applicable_methods, evaluate, ie_eq1
from .validate import run_suites

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_NONCONVERGENCE = 2
EXIT_VALIDATION = 3

CSV_COLUMNS = [
    "k", "x", "oracle", "eq1", "eq2", "eq3", "eq4", "eq5", "eq6",
    "upper", "lower", "eps_ar_upper", "eps_ar_lower", "disagreement", "status",
]
ROUTE_TAGS = ["eq1", "eq2", "eq3", "eq4", "eq5", "eq6"]
DEFAULT_K = [round(0.1 * i, 10) for i in range(1, 10)]
DEFAULT_X = [0.5, 1.0, 2.0, 5.0, 7.0, 10.0, 20.0, 40.0, 80.0]


class Spacing(str, enum.Enum):
    LINEAR = "linear"
    LOG = "log"


class FigureId(enum.Enum):
    FIG3 = 3
    FIG4 = 4
    FIG5 = 5
    FIG6 = 6


@dataclass
class SweepSpec:
    k_values: list[float]
    x_values: list[float]
    spacing: Spacing = Spacing.LINEAR
    methods: list[str] = field(default_factory=lambda: list(ROUTE_TAGS))
    oracle_tol: float = 1e-12
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self):
        if not self.k_values or not self.x_values:
            raise DomainError("sweep grids must be non-empty")
        if any(not (0.0 <= k <= 1.0) for k in self.k_values):
            raise DomainError("k values must lie in [0, 1]")
        if any(not (x >= 0.0 and math.isfinite(x)) for x in self.x_values):
            raise DomainError("x values must be finite and >= 0")
        for m in self.methods:
            if m not in ROUTE_TAGS:
                raise DomainError(f"unknown method {m!r}; sweep supports {', '.join(ROUTE_TAGS)}")
        if not self.oracle_tol > 0:
            raise DomainError("oracle tolerance must be positive")


def fmt(v) -> str:
    """Fixed 17-significant-digit scientific notation; blank for missing."""
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return f"{float(v):.16e}"


def figure_grid(fig: FigureId) -> list[tuple[float, float]]:
    """(k, x) points behind each figure, in output order."""
    if fig is FigureId.FIG3:
        return [(0.5, float(x)) for x in np.geomspace(0.1, 20.0, 200)]
    ks = [round(0.02 + 0.01 * i, 10) for i in range(97)]
    x = {FigureId.FIG4: 7.0, FigureId.FIG5: 40.0, FigureId.FIG6: 80.0}[fig]
    return [(k, x) for k in ks]


FIGURE_COLUMNS = {
    FigureId.FIG3: ["k", "x", "oracle", "upper", "lower", "status"],
    FigureId.FIG4: ["k", "x", "oracle", "upper", "lower", "status"],
    FigureId.FIG5: ["k", "x", "oracle", "lower", "status"],
    FigureId.FIG6: ["k", "x", "eps_ar_lower", "status"],
}


def _row_values(k: float, x: float, methods, oracle_tol: float, max_terms: int) -> dict:
    """All metrics for one grid point; problems go into ``status``."""
    p = EvalPoint(k, x)
    row: dict = {"k": k, "x": x}
    status = []
    oracle = ie_eq1(p, oracle_tol)
    if oracle.converged:
        row["oracle"] = oracle.value
    else:
        status.append("oracle-nonconverged")
    valid = applicable_methods(p)
    values = []
    for tag in methods:
        m = Method(tag)
        if m not in valid:
            status.append(f"invalid-domain:{tag}")
            continue
        res = oracle if m is Method.EQ1_QUAD else evaluate(p, m, oracle_tol, max_terms)
        if res.converged:
            row[tag] = res.value
            values.append(res.value)
        else:
            status.append(f"nonconverged:{tag}")
    br = bracket(p)
    row["upper"] = br.upper
    if br.lower_valid:
        row["lower"] = br.lower
    else:
        status.append("lower-invalid")
    if "oracle" in row and row["oracle"] > 0:
        row["eps_ar_upper"] = eps_ar(row["oracle"], br.upper)
        if br.lower_valid:
            row["eps_ar_lower"] = eps_ar(row["oracle"], br.lower)
        if values:
            pool = values + [row["oracle"]]
            row["disagreement"] = (max(pool) - min(pool)) / row["oracle"]
    row["status"] = ";".join(status) if status else "ok"
    return row


def _write_csv(rows: list[dict], columns: list[str], out) -> None:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        cells = [row.get(c) if c == "status" else fmt(row.get(c)) for c in columns]
        buf.write(",".join("" if c is None else c for c in cells) + "\n")
    data = buf.getvalue()
    if out is None or str(out) == "-":
        sys.stdout.write(data)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)


def _failed(rows) -> bool:
    return any("nonconverged" in r["status"] for r in rows)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_eval(k: float, x: float, method: str | None = None, oracle_tol: float = 1e-12,
             max_terms: int = DEFAULT_MAX_TERMS, out=None) -> int:
    out = sys.stdout if out is None else out
    p = EvalPoint(k, x)
    res = evaluate(p, method, oracle_tol, max_terms)
    br = bracket(p)
    lines = [
        f"k              {k!r}",
        f"x              {x!r}",
        f"method         {res.method.value}",
        f"value          {fmt(res.value)}",
        f"error estimate {res.error_estimate:.3e}",
        f"terms/panels   {res.terms_or_panels}",
        f"converged      {'yes' if res.converged else 'no'}",
        f"upper bound    {fmt(br.upper)}",
        f"lower bound    {fmt(br.lower) if br.lower_valid else 'n/a (k = 1)'}",
    ]
    out.write("\n".join(lines) + "\n")
    return EXIT_OK if res.converged else EXIT_NONCONVERGENCE


def cmd_sweep(spec: SweepSpec, out_path) -> int:
    rows = [
        _row_values(k, x, spec.methods, spec.oracle_tol, spec.max_terms)
        for k in sorted(spec.k_values)
        for x in sorted(spec.x_values)
    ]
    _write_csv(rows, CSV_COLUMNS, out_path)
    return EXIT_NONCONVERGENCE if _failed(rows) else EXIT_OK


def cmd_figure(fig: FigureId, out_path, oracle_tol: float = 1e-12) -> int:
    rows = [_row_values(k, x, [], oracle_tol, DEFAULT_MAX_TERMS) for k, x in figure_grid(fig)]
    for row in rows:
        # figures only report what they plot; domain notes about unrequested
        # routes are irrelevant here
        row["status"] = "ok" if "oracle" in row else "oracle-nonconverged"
    _write_csv(rows, FIGURE_COLUMNS[fig], out_path)
    return EXIT_NONCONVERGENCE if _failed(rows) else EXIT_OK


def cmd_validate(level: str = "quick", out=None) -> int:
    out = sys.stdout if out is None else out
    reports = run_suites(level.lower())
    for rep in reports:
        out.write(rep.line() + f"  ({rep.seconds:.2f}s)\n")
    failed = [r.name for r in reports if not r.passed]
    out.write(f"{len(reports) - len(failed)}/{len(reports)} properties passed\n")
    return EXIT_VALIDATION if failed else EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _parse_values(text: str, spacing: Spacing) -> list[float]:
    """Comma list ``0.1,0.5`` or range ``start:stop:num``."""
    if ":" in text:
        try:
            start, stop, num = text.split(":")
            start, stop, n = float(start), float(stop), int(num)
        except ValueError:
            raise DomainError(f"bad range {text!r}; expected start:stop:num") from None
        if n < 1:
            raise DomainError("range needs at least one point")
        if spacing is Spacing.LOG:
            if start <= 0 or stop <= 0:
                raise DomainError("log spacing needs strictly positive endpoints")
            return [float(v) for v in np.geomspace(start, stop, n)]
        return [float(v) for v in np.linspace(start, stop, n)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise DomainError(f"bad value list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="riceie", description="Rice Ie-function evaluation and bound validation")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate Ie(k, x) at one point")
    ev.add_argument("--k", type=float, required=True)
    ev.add_argument("--x", type=float, required=True)
    ev.add_argument("--method", choices=[m.value for m in Method], default=None)
    ev.add_argument("--oracle-tol", type=float, default=1e-12)
    ev.add_argument("--max-terms", type=int, default=DEFAULT_MAX_TERMS)

    sw = sub.add_parser("sweep", help="evaluate a (k, x) grid and write CSV")
    sw.add_argument("--k", default=None, help="comma list or start:stop:num (default 0.1..0.9)")
    sw.add_argument("--x", default=None, help="comma list or start:stop:num (default 9-point grid)")
    sw.add_argument("--spacing", choices=[s.value for s in Spacing], default="linear")
    sw.add_argument("--method", default=",".join(ROUTE_TAGS), help="comma list of routes")
    sw.add_argument("--out", default="-")
    sw.add_argument("--oracle-tol", type=float, default=1e-12)
    sw.add_argument("--max-terms", type=int, default=DEFAULT_MAX_TERMS)

    fg = sub.add_parser("figure", help="write the data behind one figure as CSV")
    fg.add_argument("--fig", type=int, choices=[3, 4, 5, 6], required=True)
    fg.add_argument("--out", default="-")
    fg.add_argument("--oracle-tol", type=float, default=1e-12)

    va = sub.add_parser("validate", help="run the property suites")
    va.add_argument("--level", choices=["quick", "full"], default="quick")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_DOMAIN
    try:
        if args.command == "eval":
            return cmd_eval(args.k, args.x, args.method, args.oracle_tol, args.max_terms)
        if args.command == "sweep":
            spacing = Spacing(args.spacing)
            spec = SweepSpec(
                k_values=DEFAULT_K if args.k is None else _parse_values(args.k, spacing),
                x_values=DEFAULT_X if args.x is None else _parse_values(args.x, spacing),
                spacing=spacing,
                methods=[m.strip().lower() for m in args.method.split(",") if m.strip()],
                oracle_tol=args.oracle_tol,
                max_terms=args.max_terms,
            )
            return cmd_sweep(spec, args.out)
        if args.command == "figure":
            return cmd_figure(FigureId(args.fig), args.out, args.oracle_tol)
        if args.command == "validate":
            return cmd_validate(args.level)
    except DomainError as exc:
        print(f"riceie: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"riceie: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except OSError as exc:
        print(f"riceie: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
