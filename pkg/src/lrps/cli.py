"""Command-line front end.

    lrps solve --example 2 --gamma 3/4 --order 8
    lrps table --example 6 --gamma 1 --points 0.5,0.5 --times 0.15,0.3 --format csv
    lrps order-sweep --example 2 --points 0.5 --times 0.1,0.2 --orders 4,6,8
    lrps residual-check --example 4 --gammas 1/2,3/4,1
    lrps examples

Exit codes: 0 success, 2 invalid input, 3 Inapplicable, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import errors
from .engine import solve
from .fpe_model import EXAMPLES, builtin_example, parse_problem
from .report import COLUMNS, TableSpec, emit, run_order_sweep, run_residual_check, run_table

EXIT_OK, EXIT_INPUT, EXIT_INAPPLICABLE, EXIT_NUMERIC = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise errors.SchemaError(message)


def _rationals(text: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise errors.SchemaError(f"cannot read rationals from {text!r}") from exc


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise errors.SchemaError(f"cannot read numbers from {text!r}") from exc


def _points(text: str, d: int) -> list[tuple[float, ...]]:
    """Points separated by ';', coordinates by ','; a single number fills every coordinate."""
    out = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        coords = _floats(chunk)
        if len(coords) == 1:
            coords = coords * d
        if len(coords) != d:
            raise errors.DimensionError(f"point {chunk!r} needs {d} coordinates")
        out.append(tuple(coords))
    return out


def _load(args):
    if args.problem:
        try:
            text = Path(args.problem).read_text()
        except OSError as exc:
            raise errors.SchemaError(f"cannot read {args.problem}: {exc}") from exc
        problem = parse_problem(text)
    else:
        problem = builtin_example(args.example)
    if args.order is not None:
        problem = problem.with_order(args.order)
    return problem


def _gammas(args, problem) -> list[Fraction]:
    return _rationals(args.gamma) if args.gamma else [problem.gamma]


def cmd_solve(args, out) -> int:
    problem = _load(args)
    if args.gamma:
        problem = problem.with_gamma(_rationals(args.gamma)[0])
    sol, report = solve(problem)
    if args.format == "json":
        doc = {
            "gamma": str(problem.gamma),
            "order": sol.order,
            "outcome": report.outcome.value,
            "coefficients": [str(p) for p in sol.coefficients],
            "closed_form": str(sol.closed_form) if sol.closed_form else None,
            "warnings": sol.warnings,
        }
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write(f"{problem.name or 'problem'}  gamma={problem.gamma}  K={sol.order}  "
                  f"outcome={report.outcome.value}\n")
        for k, p in enumerate(sol.coefficients):
            out.write(f"p_{k} = {p}\n")
        if sol.closed_form is not None:
            out.write(f"closed form: v = {sol.closed_form}\n")
        for w in sol.warnings:
            out.write(f"warning: {w}\n")
    return EXIT_OK


def _spec(args, problem, columns=COLUMNS) -> TableSpec:
    d = problem.dimension
    points = _points(args.points, d) if args.points else [(0.5,) * d]
    times = _floats(args.times) if args.times else [0.15, 0.3, 0.45, 0.6, 0.75, 0.9]
    return TableSpec(points, times, _gammas(args, problem), columns)


def cmd_table(args, out) -> int:
    problem = _load(args)
    columns = [c.strip() for c in args.columns.split(",")] if args.columns else list(COLUMNS)
    if problem.exact_kind is None and args.columns is None:
        columns = ["value"]
    table = run_table(problem, None, _spec(args, problem, columns))
    emit(table, args.format, out)
    return EXIT_OK


def cmd_order_sweep(args, out) -> int:
    problem = _load(args)
    orders = [int(k) for k in _rationals(args.orders)]
    table = run_order_sweep(problem, _spec(args, problem), orders)
    emit(table, args.format, out)
    return EXIT_OK


def cmd_residual_check(args, out) -> int:
    problem = _load(args)
    gammas = _rationals(args.gammas) if args.gammas else [Fraction(1, 2), Fraction(3, 4), Fraction(1)]
    table = run_residual_check(problem, gammas)
    emit(table, args.format, out)
    inapplicable = any(row[1] == "Inapplicable" for row in table.rows)
    return EXIT_INAPPLICABLE if inapplicable else EXIT_OK


def cmd_examples(args, out) -> int:
    for info in EXAMPLES.values():
        out.write(f"{info.id:>4}  {info.summary}\n      exact: {info.exact}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lrps", description="Laplace residual power series solver for "
                     "time-fractional Fokker-Planck equations")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def problem_args(p, fmt_default="pretty", formats=("csv", "json", "pretty")):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--example", help="built-in example id (see `lrps examples`)")
        src.add_argument("--problem", help="path to a JSON problem file")
        p.add_argument("--gamma", help="fractional order, e.g. 3/4 (tables accept a comma list)")
        p.add_argument("--order", type=int, help="truncation order K")
        p.add_argument("--format", choices=formats, default=fmt_default)

    p = sub.add_parser("solve", help="compute p_0..p_K")
    problem_args(p, formats=("pretty", "json"))
    p.set_defaults(func=cmd_solve)

    for name, func, helptext in (("table", cmd_table, "values and errors on a grid"),
                                 ("order-sweep", cmd_order_sweep, "absolute error per truncation order")):
        p = sub.add_parser(name, help=helptext)
        problem_args(p, fmt_default="csv")
        p.add_argument("--points", help="points separated by ';', coordinates by ','")
        p.add_argument("--times", help="comma-separated tau values")
        if name == "table":
            p.add_argument("--columns", help=f"comma list from {','.join(COLUMNS)}")
        else:
            p.add_argument("--orders", default="4,6,8")
        p.set_defaults(func=func)

    p = sub.add_parser("residual-check", help="structural and numeric residual per gamma")
    problem_args(p)
    p.add_argument("--gammas", help="comma-separated gammas (default 1/2,3/4,1)")
    p.set_defaults(func=cmd_residual_check)

    p = sub.add_parser("examples", help="list the built-in problems")
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except errors.Inapplicable as exc:
        err.write(f"inapplicable: {exc}\n")
        return EXIT_INAPPLICABLE
    except (errors.SchemaError, errors.ParseError, errors.UnknownExample, errors.ExactUnavailable,
            errors.UnknownKind) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (errors.LrpsError, ArithmeticError, ValueError) as exc:
        err.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
