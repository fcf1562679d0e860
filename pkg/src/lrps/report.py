"""Solution, error, order-sweep and residual tables, and their CSV/JSON/text output."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence, TextIO

from .engine import solve, evaluate, structural_residual, Outcome
from .errors import DivisionByZeroExact, ExactUnavailable, Inapplicable, IoError, SchemaError
from .fpe_model import FpeProblem, FpsSolution
from .residual import sample_residuals
from .special_fn import exact_reference

COLUMNS = ("value", "exact", "abs_error", "rel_error")
_EXACT_COLUMNS = {"exact", "abs_error", "rel_error"}


@dataclass(frozen=True)
class TableSpec:
    points: tuple[tuple[float, ...], ...]
    times: tuple[float, ...]
    gammas: tuple[Fraction, ...]
    columns: tuple[str, ...] = COLUMNS

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(tuple(float(c) for c in p) for p in self.points))
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "gammas", tuple(Fraction(g) for g in self.gammas))
        object.__setattr__(self, "columns", tuple(self.columns))
        if any(t < 0 for t in self.times):
            raise SchemaError("times must be non-negative")
        if any(b < a for a, b in zip(self.times, self.times[1:])):
            raise SchemaError("times must be non-decreasing")
        if any(not 0 < g <= 1 for g in self.gammas):
            raise SchemaError("every gamma must lie in (0, 1]")
        bad = [c for c in self.columns if c not in COLUMNS]
        if bad:
            raise SchemaError(f"unknown column(s) {bad}; choose from {COLUMNS}")


@dataclass
class Table:
    title: str
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def column(self, name: str) -> list[Any]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _q(g: Fraction) -> str:
    return str(g.numerator) if g.denominator == 1 else f"{g.numerator}/{g.denominator}"


def _key_columns(d: int) -> list[str]:
    return ["gamma"] + [f"z{i + 1}" for i in range(d)] + ["tau"]


def _exact_fn(problem: FpeProblem, exact_kind: str | None):
    kind = exact_kind if exact_kind is not None else problem.exact_kind
    if kind is None:
        return None
    factor = problem.exact_factor.eval if problem.exact_factor is not None else None
    return lambda point, tau, g: exact_reference(kind, point, tau, g, factor=factor)


def _cells(value: float, exact: float | None, columns: Sequence[str]) -> list[float]:
    out = []
    for c in columns:
        if c == "value":
            out.append(value)
        elif c == "exact":
            out.append(exact)
        elif c == "abs_error":
            out.append(abs(value - exact))
        else:
            if exact == 0:
                raise DivisionByZeroExact("relative error requested where the exact solution is 0")
            out.append(abs(value - exact) / abs(exact))
    return out


def run_table(problem: FpeProblem, exact_kind: str | None, spec: TableSpec) -> Table:
    """Series values and errors against the closed form on a point x time x gamma grid."""
    exact = _exact_fn(problem, exact_kind)
    if exact is None and _EXACT_COLUMNS & set(spec.columns):
        raise ExactUnavailable(f"no exact solution known for {problem.name or 'this problem'}")
    table = Table(problem.name or "table", _key_columns(problem.dimension) + list(spec.columns))
    for g in spec.gammas:
        sol, _ = solve(problem.with_gamma(g))
        for point in spec.points:
            for tau in spec.times:
                v = evaluate(sol, point, tau)
                e = exact(point, tau, g) if exact is not None else None
                table.rows.append([_q(g), *point, tau, *_cells(v, e, spec.columns)])
    return table


def run_order_sweep(problem: FpeProblem, spec: TableSpec, orders: Sequence[int] = (4, 6, 8)) -> Table:
    """Absolute error per truncation order; one column per K."""
    orders = sorted(set(int(k) for k in orders))
    if not orders or orders[0] < 1:
        raise SchemaError("orders must be a non-empty list of positive integers")
    exact = _exact_fn(problem, None)
    if exact is None:
        raise ExactUnavailable(f"no exact solution known for {problem.name or 'this problem'}")
    table = Table(
        f"{problem.name or 'problem'} order sweep",
        _key_columns(problem.dimension) + [f"abs_error_K{k}" for k in orders],
    )
    for g in spec.gammas:
        full, _ = solve(problem.with_gamma(g).with_order(orders[-1]))
        # the recursion never revises earlier coefficients, so prefixes are the lower orders
        sols = [FpsSolution(full.problem, full.coefficients[: k + 1]) for k in orders]
        for point in spec.points:
            for tau in spec.times:
                e = exact(point, tau, g)
                table.rows.append([_q(g), *point, tau, *(abs(evaluate(s, point, tau) - e) for s in sols)])
    return table


RESIDUAL_COLUMNS = ["gamma", "outcome", "structural", "max_abs_residual", "max_oracle_mismatch", "note"]


def run_residual_check(problem: FpeProblem, gammas: Sequence, samples: int = 5) -> Table:
    """Structural and numeric residual per gamma.

    ``structural`` is "zero" when D^g v_K - FP[v_K] - g has no entries up to
    order (K-1) g. ``max_oracle_mismatch`` is the largest difference between
    the numeric residual (quadrature Caputo and numerical differentiation)
    and the symbolic residual of orders above (K-1) g; ``max_abs_residual``
    is the numeric residual itself. An Inapplicable gamma becomes a row
    whose note carries the witness.
    """
    table = Table(f"{problem.name or 'problem'} residual check", list(RESIDUAL_COLUMNS))
    for g in gammas:
        g = Fraction(g)
        try:
            sol, rep = solve(problem.with_gamma(g))
        except Inapplicable as exc:
            table.rows.append([_q(g), Outcome.INAPPLICABLE.value, "n/a", math.nan, math.nan,
                               f"p_{exc.k} undetermined: {exc.report.witness}"])
            continue
        structural = "zero" if not len(structural_residual(sol)) else "nonzero"
        got = sample_residuals(sol, samples)
        note = "all later p_k are zero" if rep.outcome is Outcome.EARLY_TERMINATED else ""
        table.rows.append([
            _q(g), rep.outcome.value, structural,
            max(abs(s.numeric) for s in got),
            max(s.discrepancy for s in got),
            note,
        ])
    return table


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def format_float(x: float) -> str:
    """Scientific notation with the fewest of 15, 16 or 17 digits that round-trips.

    The exponent carries no padding or plus sign: 0.580917121364088 becomes
    ``5.80917121364088e-1``.
    """
    if math.isnan(x) or math.isinf(x):
        return repr(x)
    for digits in (15, 16, 17):
        text = f"{x:.{digits - 1}e}"
        if float(text) == x:
            break
    mantissa, exp = text.split("e")
    return f"{mantissa}e{int(exp)}"


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return format_float(v)
    if v is None:
        return ""
    text = str(v)
    if any(ch in text for ch in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def _json_cell(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, Fraction):
        return _q(v)
    return v


def _pretty_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return "" if v is None else str(v)


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(table.columns)]
        lines += [",".join(_csv_cell(v) for v in row) for row in table.rows]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        doc = {
            "title": table.title,
            "columns": table.columns,
            "rows": [[_json_cell(v) for v in row] for row in table.rows],
            "notes": table.notes,
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "pretty":
        cells = [table.columns] + [[_pretty_cell(v) for v in row] for row in table.rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(table.columns))]
        out = [table.title]
        for n, r in enumerate(cells):
            out.append("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip())
            if n == 0:
                out.append("  ".join("-" * w for w in widths))
        out += [f"note: {x}" for x in table.notes]
        return "\n".join(out) + "\n"
    raise SchemaError(f"unknown format {fmt!r}; choose csv, json or pretty")


def emit(table: Table, fmt: str = "csv", stream: TextIO | None = None) -> str:
    """Render the table and write it to ``stream`` when one is given."""
    text = render(table, fmt)
    if stream is not None:
        try:
            stream.write(text)
            stream.flush()
        except (OSError, ValueError) as exc:
            raise IoError(f"could not write table: {exc}") from exc
    return text
