"""Command-line front-end.

Commands: ``entropy``, ``expect``, ``coeffs``, ``sweep``, ``laplace``,
``validate``.  Results go to stdout as an aligned table, RFC-4180 CSV
(header row, 17 significant digits), or JSON mirroring the CSV columns.
Exit codes: 0 success, 1 computation error (the category is named on
stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Dict, List, Optional, Sequence

from . import acceptance, coeffs, oracle
from .distributions import (
    BetaBinomial,
    Binomial,
    Geometric,
    Hypergeometric,
    METHODS,
    NegBinomial,
    Poisson,
    entropy,
    log_expectation,
    log_gamma_expectation,
)
from .errors import (
    BudgetError,
    DomainError,
    IncompleteSupportError,
    PrecisionError,
    QuadratureDivergenceError,
    SeriesCancellationError,
)
from .transforms import laplace_E_poi_identity, laplace_H_poi_identity

_COMPUTE_ERRORS = (
    SeriesCancellationError,
    BudgetError,
    QuadratureDivergenceError,
    PrecisionError,
    IncompleteSupportError,
)


class UsageError(Exception):
    pass


# family name -> (constructor, [(flag, attribute, type)])
_FAMILIES = {
    "poisson": (Poisson, [("--lambda", "lam", float)]),
    "binomial": (Binomial, [("--n", "n", float), ("--p", "p", float)]),
    "beta-binomial": (BetaBinomial, [("--n", "n", int), ("--alpha", "alpha", float),
                                     ("--beta", "beta", float)]),
    "negative-binomial": (NegBinomial, [("--r", "r", float), ("--p", "p", float)]),
    "geometric": (Geometric, [("--p", "p", float)]),
    "hypergeometric": (Hypergeometric, [("--N", "N", int), ("--K", "K", int),
                                        ("--n", "n", int)]),
}

_PARAM_FLAGS = [
    ("--lambda", "lam", float), ("--n", "n", None), ("--p", "p", float),
    ("--alpha", "alpha", float), ("--beta", "beta", float), ("--r", "r", float),
    ("--N", "N", int), ("--K", "K", int),
]


def _add_dist_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dist", required=True, choices=sorted(_FAMILIES))
    parser.add_argument("--lambda", dest="lam", type=float)
    parser.add_argument("--n", dest="n", type=float)
    parser.add_argument("--p", dest="p", type=float)
    parser.add_argument("--alpha", dest="alpha", type=float)
    parser.add_argument("--beta", dest="beta", type=float)
    parser.add_argument("--r", dest="r", type=float)
    parser.add_argument("--N", dest="N", type=int)
    parser.add_argument("--K", dest="K", type=int)


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=float, default=1e-10)
    parser.add_argument("--base", choices=["e", "2", "10"], default="e")
    parser.add_argument("--output", choices=["table", "csv", "json"], default="table")
    parser.add_argument("--coeff-cache", metavar="PATH", default=None)


def _build_dist(args, overrides: Optional[Dict[str, float]] = None):
    ctor, flags = _FAMILIES[args.dist]
    kwargs = {}
    for flag, attr, typ in flags:
        value = getattr(args, attr, None)
        if overrides and attr in overrides:
            value = overrides[attr]
        if value is None:
            raise UsageError(f"{flag} is required for --dist {args.dist}")
        if typ is int:
            if float(value) != int(value):
                raise UsageError(f"invalid value for {flag}: must be an integer, got {value}")
            value = int(value)
        else:
            value = float(value)
        kwargs[attr] = value
    try:
        return ctor(**kwargs)
    except DomainError as exc:
        flag = next((f for f, a, _ in flags if a in str(exc) or a.lstrip("-") in str(exc)),
                    flags[0][0])
        raise UsageError(f"invalid value for {flag}: {exc}") from exc


def _dist_label(d) -> str:
    fields = ", ".join(f"{k}={v:g}" for k, v in vars(d).items())
    return f"{type(d).__name__.lower()}({fields})"


def _base_scale(base: str) -> float:
    return {"e": 1.0, "2": math.log(2.0), "10": math.log(10.0)}[base]


def _fmt(x) -> str:
    return f"{x:.17g}" if isinstance(x, float) else str(x)


def _emit(rows: List[Dict], columns: Sequence[str], fmt: str, out) -> None:
    if fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
    elif fmt == "json":
        payload = [{c: row[c] for c in columns} for row in rows]
        json.dump(payload, out, indent=2)
        out.write("\n")
    else:
        text = [[_fmt(row[c]) for c in columns] for row in rows]
        widths = [max(len(c), *(len(t[i]) for t in text)) if text else len(c)
                  for i, c in enumerate(columns)]
        out.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
        for t in text:
            out.write("  ".join(v.ljust(w) for v, w in zip(t, widths)).rstrip() + "\n")


def _result_row(param: str, result, scale: float) -> Dict:
    return {
        "param": param,
        "value": result.value / scale,
        "err_bound": result.err_bound / scale,
        "method": result.method,
        "work": result.work,
    }


_RESULT_COLUMNS = ("param", "value", "err_bound", "method", "work")


def _cmd_entropy(args, out) -> int:
    d = _build_dist(args)
    r = entropy(d, args.method, args.tol)
    _emit([_result_row(_dist_label(d), r, _base_scale(args.base))],
          _RESULT_COLUMNS, args.output, out)
    return 0


def _cmd_expect(args, out) -> int:
    d = _build_dist(args)
    if args.kind == "log-gamma":
        r = log_gamma_expectation(d, args.shift, args.method, args.tol)
    else:
        r = log_expectation(d, args.shift, args.method, args.tol)
    label = f"{_dist_label(d)}:{args.kind}:shift={args.shift:g}"
    _emit([_result_row(label, r, _base_scale(args.base))],
          _RESULT_COLUMNS, args.output, out)
    return 0


def _cmd_coeffs(args, out) -> int:
    table = coeffs.coeff_table(args.alpha, args.j_max)
    rows = [
        {"alpha": args.alpha, "j": e.j, "value": e.value,
         "err_bound": e.err_bound, "method": e.method}
        for e in table.entries
    ]
    _emit(rows, ("alpha", "j", "value", "err_bound", "method"), args.output, out)
    return 0


def _cmd_sweep(args, out) -> int:
    ctor, flags = _FAMILIES[args.dist]
    attrs = [a for _, a, _ in flags]
    if args.param not in attrs and f"--{args.param}" != "--lambda":
        raise UsageError(f"--param must name a {args.dist} parameter (one of {attrs})")
    attr = "lam" if args.param == "lambda" else args.param
    if attr not in attrs:
        raise UsageError(f"--param must name a {args.dist} parameter (one of {attrs})")
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise UsageError(f"unknown method {m!r} in --methods")
    scale = _base_scale(args.base)
    rows = []
    for i in range(args.steps):
        value = args.start + (args.stop - args.start) * i / (args.steps - 1)
        d = _build_dist(args, overrides={attr: value})
        for m in methods:
            r = entropy(d, m, args.tol)
            rows.append(_result_row(f"{value:.17g}", r, scale))
    _emit(rows, _RESULT_COLUMNS, args.output, out)
    return 0


def _cmd_laplace(args, out) -> int:
    try:
        z_grid = [float(z) for z in args.z_grid.split(",") if z.strip()]
    except ValueError as exc:
        raise UsageError(f"invalid --z-grid: {exc}") from exc
    if not z_grid or any(z <= 0 for z in z_grid):
        raise UsageError("--z-grid needs positive comma-separated values")
    rows = []
    for z in z_grid:
        if args.identity in ("entropy", "both"):
            p = laplace_H_poi_identity(z, args.tol)
            rows.append({"identity": "entropy", "z": z, "numeric": p.numeric,
                         "closed_form": p.closed_form, "abs_gap": p.abs_gap})
        if args.identity in ("log-factorial", "both"):
            p = laplace_E_poi_identity(z, args.tol)
            rows.append({"identity": "log-factorial", "z": z, "numeric": p.numeric,
                         "closed_form": p.closed_form, "abs_gap": p.abs_gap})
    _emit(rows, ("identity", "z", "numeric", "closed_form", "abs_gap"), args.output, out)
    return 0


def _cmd_validate(args, out) -> int:
    if args.regen_golden:
        records = oracle.write_golden()
        out.write(f"regenerated {len(records)} golden records at {oracle.golden_path()}\n")
    indices = None
    if args.criteria:
        try:
            indices = [int(x) for x in args.criteria.split(",") if x.strip()]
        except ValueError as exc:
            raise UsageError(f"invalid --criteria: {exc}") from exc
    results = acceptance.run_all(indices)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        out.write(f"{status}  [{r.index:2d}] {r.name} ({r.elapsed:.2f}s): {r.detail}\n")
    n_fail = sum(not r.passed for r in results)
    out.write(f"{len(results) - n_fail}/{len(results)} criteria passed\n")
    return 0 if n_fail == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entrokit",
        description="Entropies and log-gamma expectations of discrete distributions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="Shannon entropy of one distribution")
    _add_dist_flags(p)
    p.add_argument("--method", choices=METHODS, default="auto")
    _add_common_flags(p)

    p = sub.add_parser("expect", help="E[log Gamma(X+shift)] or E[log(X+shift)]")
    _add_dist_flags(p)
    p.add_argument("--kind", choices=["log-gamma", "log"], default="log-gamma")
    p.add_argument("--shift", type=float, default=1.0,
                   help="the shift parameter inside the expectation")
    p.add_argument("--method", choices=METHODS, default="auto")
    _add_common_flags(p)

    p = sub.add_parser("coeffs", help="table of logarithmic difference coefficients")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--j-max", type=int, required=True)
    _add_common_flags(p)

    p = sub.add_parser("sweep", help="sweep one parameter, CSV row per point/method")
    _add_dist_flags(p)
    p.add_argument("--param", required=True, help="parameter to sweep (e.g. lambda, p)")
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--methods", default="auto")
    _add_common_flags(p)

    p = sub.add_parser("laplace", help="two-sided Laplace identity evaluations")
    p.add_argument("--identity", choices=["entropy", "log-factorial", "both"],
                   default="both")
    p.add_argument("--z-grid", default="0.5,1,2,5")
    _add_common_flags(p)

    p = sub.add_parser("validate", help="run the acceptance suite")
    p.add_argument("--criteria", default=None, help="comma-separated criterion indices")
    p.add_argument("--regen-golden", action="store_true",
                   help="recompute and rewrite the golden record CSV first")
    p.add_argument("--coeff-cache", metavar="PATH", default=None)
    parser.set_defaults(output="table", base="e", tol=1e-10)
    return parser


_COMMANDS = {
    "entropy": _cmd_entropy,
    "expect": _cmd_expect,
    "coeffs": _cmd_coeffs,
    "sweep": _cmd_sweep,
    "laplace": _cmd_laplace,
    "validate": _cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "tol", None) is not None and not args.tol > 0:
        print("error: --tol must be > 0", file=sys.stderr)
        return 2
    cache = getattr(args, "coeff_cache", None)
    if cache and os.path.exists(cache):
        try:
            coeffs.load_cache(cache)
        except (OSError, ValueError) as exc:
            print(f"error: unreadable coefficient cache {cache}: {exc}", file=sys.stderr)
            return 2
    try:
        code = _COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _COMPUTE_ERRORS as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 1
    if cache:
        try:
            coeffs.save_cache(cache)
        except OSError as exc:
            print(f"error: cannot write coefficient cache {cache}: {exc}", file=sys.stderr)
            return 1
    return code


def render(argv: Sequence[str]) -> str:
    """Run a command and capture stdout; convenience for tests."""
    buf = io.StringIO()
    code = main(argv, out=buf)
    if code != 0:
        raise RuntimeError(f"exit code {code}")
    return buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
