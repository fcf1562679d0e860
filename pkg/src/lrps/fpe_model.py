"""Problem statements for the time-fractional Fokker-Planck equation

    D^g v = - sum_i d_i F1_i + sum_{i,j} d_i d_j F2_ij + g(z, tau)

where each flux is ``F = A(z) v + B(z) v^2``, plus the built-in library and
the operator applied to a truncated series.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import series as ss
from . import spatial_expr as sx
from .errors import DimensionError, GammaRangeError, SchemaError, UnknownExample
from .exprparse import parse_expr
from .series import FracExponent, TimeSeries
from .spatial_expr import Expr, ZERO_EXPR


@dataclass(frozen=True)
class FluxTerm:
    """The flux ``linear * v + quadratic * v^2``."""

    linear: Expr = ZERO_EXPR
    quadratic: Expr = ZERO_EXPR

    @property
    def absent(self) -> bool:
        return not self.linear.terms and not self.quadratic.terms


@dataclass(frozen=True)
class ControlEntry:
    coeff: Expr
    a: Fraction
    b: Fraction

    def exponent(self, gamma) -> FracExponent:
        return FracExponent(self.a, self.b, gamma)


@dataclass(frozen=True)
class ControlTerm:
    """g(z, tau) = sum_m c_m(z) * tau^(a_m*gamma + b_m)."""

    entries: tuple[ControlEntry, ...] = ()

    def series(self, gamma, dimension: int = 1) -> TimeSeries:
        return TimeSeries(gamma, [(c.exponent(gamma), c.coeff) for c in self.entries], dimension)

    def __bool__(self):
        return bool(self.entries)


def parse_gamma(value) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int, float, Fraction)):
        raise SchemaError(f"gamma must be a rational string, got {value!r}")
    try:
        g = Fraction(str(value).strip()) if not isinstance(value, Fraction) else value
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"cannot read gamma {value!r}") from exc
    if not 0 < g <= 1:
        raise GammaRangeError(f"gamma must lie in (0, 1], got {g}")
    return g


@dataclass(frozen=True)
class FpeProblem:
    dimension: int
    gamma: Fraction
    drift: tuple[FluxTerm, ...]
    diffusion: tuple[tuple[FluxTerm, ...], ...]
    initial: Expr
    control: ControlTerm = ControlTerm()
    order: int = 8
    name: str = ""
    example_id: str | None = None
    exact_kind: str | None = None
    exact_factor: Expr | None = None

    def __post_init__(self):
        d = self.dimension
        if d not in (1, 2, 3):
            raise DimensionError(f"dimension must be 1, 2 or 3, got {d}")
        object.__setattr__(self, "gamma", parse_gamma(self.gamma))
        if not isinstance(self.order, int) or self.order < 1:
            raise SchemaError(f"order must be a positive integer, got {self.order!r}")
        if len(self.drift) != d or len(self.diffusion) != d or any(len(r) != d for r in self.diffusion):
            raise DimensionError("drift needs d entries and diffusion a d x d grid")
        exprs = [self.initial]
        for ft in self.drift + tuple(t for row in self.diffusion for t in row):
            exprs += [ft.linear, ft.quadratic]
        exprs += [c.coeff for c in self.control.entries]
        if self.exact_factor is not None:
            exprs.append(self.exact_factor)
        for e in exprs:
            if e.max_var() >= d:
                raise DimensionError(f"{e} uses z{e.max_var() + 1} in a {d}-dimensional problem")
        seen = set()
        for c in self.control.entries:
            v = c.exponent(self.gamma).value
            if v < 0:
                raise SchemaError(f"control exponent {v} is negative")
            if v in seen:
                raise SchemaError(f"duplicate control exponent {v}")
            seen.add(v)

    @property
    def is_linear(self) -> bool:
        fluxes = self.drift + tuple(t for row in self.diffusion for t in row)
        return all(not f.quadratic.terms for f in fluxes)

    def control_series(self) -> TimeSeries:
        return self.control.series(self.gamma, self.dimension)

    def with_gamma(self, gamma) -> "FpeProblem":
        gamma = parse_gamma(gamma)
        if self.example_id is not None:
            return builtin_example(self.example_id, gamma=gamma, order=self.order)
        return dataclasses.replace(self, gamma=gamma)

    def with_order(self, order: int) -> "FpeProblem":
        if self.example_id is not None:
            return builtin_example(self.example_id, gamma=self.gamma, order=order)
        return dataclasses.replace(self, order=order)


# ---------------------------------------------------------------------------
# the operator
# ---------------------------------------------------------------------------

def apply_fp_operator(u: TimeSeries, problem: FpeProblem, cutoff=None) -> TimeSeries:
    """-sum_i d_i(A1_i u + B1_i u^2) + sum_ij d_i d_j(A2_ij u + B2_ij u^2), truncated."""
    d = problem.dimension
    usq = ss.ts_product(u, u, cutoff) if not problem.is_linear else None

    def flux(ft: FluxTerm) -> TimeSeries:
        out = ss.ts_mul_expr(u, ft.linear)
        if ft.quadratic.terms:
            out = out + ss.ts_mul_expr(usq, ft.quadratic)
        return out

    total = TimeSeries(u.gamma, (), max(d, u.dimension))
    for i, ft in enumerate(problem.drift):
        if not ft.absent:
            total = total - ss.ts_diff(flux(ft), i)
    for i in range(d):
        for j in range(d):
            ft = problem.diffusion[i][j]
            if not ft.absent:
                total = total + ss.ts_diff(ss.ts_diff(flux(ft), i), j)
    return ss.ts_truncate(total, cutoff)


# ---------------------------------------------------------------------------
# problem files
# ---------------------------------------------------------------------------

_TOP_REQUIRED = {"dimension", "gamma", "initial", "drift", "diffusion"}
_TOP_OPTIONAL = {"order", "control", "name", "example", "exact_kind", "exact_factor"}


def _expr_field(obj: dict, key: str, where: str) -> Expr:
    raw = obj.get(key, "0")
    if not isinstance(raw, str):
        raise SchemaError(f"{where}.{key} must be an expression string")
    return parse_expr(raw)


def _index(obj: dict, key: str, d: int, where: str) -> int:
    v = obj.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(f"{where}.{key} must be an integer")
    if not 1 <= v <= d:
        raise DimensionError(f"{where}.{key}={v} outside 1..{d}")
    return v - 1


def _check_keys(obj, required: set, optional: set, where: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where} must be an object")
    missing = required - obj.keys()
    extra = obj.keys() - required - optional
    if missing:
        raise SchemaError(f"{where}: missing field(s) {sorted(missing)}")
    if extra:
        raise SchemaError(f"{where}: unknown field(s) {sorted(extra)}")


def problem_from_dict(doc: dict[str, Any]) -> FpeProblem:
    _check_keys(doc, _TOP_REQUIRED, _TOP_OPTIONAL, "problem")
    d = doc["dimension"]
    if not isinstance(d, int) or isinstance(d, bool) or d not in (1, 2, 3):
        raise DimensionError(f"dimension must be 1, 2 or 3, got {d!r}")
    gamma = parse_gamma(doc["gamma"])

    drift = [FluxTerm() for _ in range(d)]
    seen = set()
    for n, item in enumerate(doc["drift"]):
        where = f"drift[{n}]"
        _check_keys(item, {"i"}, {"linear", "quadratic"}, where)
        i = _index(item, "i", d, where)
        if i in seen:
            raise SchemaError(f"{where}: duplicate index i={i + 1}")
        seen.add(i)
        drift[i] = FluxTerm(_expr_field(item, "linear", where), _expr_field(item, "quadratic", where))

    diffusion = [[FluxTerm() for _ in range(d)] for _ in range(d)]
    seen = set()
    for n, item in enumerate(doc["diffusion"]):
        where = f"diffusion[{n}]"
        _check_keys(item, {"i", "j"}, {"linear", "quadratic"}, where)
        i, j = _index(item, "i", d, where), _index(item, "j", d, where)
        if (i, j) in seen:
            raise SchemaError(f"{where}: duplicate index pair ({i + 1}, {j + 1})")
        seen.add((i, j))
        diffusion[i][j] = FluxTerm(_expr_field(item, "linear", where), _expr_field(item, "quadratic", where))

    control = []
    for n, item in enumerate(doc.get("control", [])):
        where = f"control[{n}]"
        _check_keys(item, {"coeff", "a", "b"}, set(), where)
        try:
            a, b = Fraction(str(item["a"])), Fraction(str(item["b"]))
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"{where}: a and b must be rationals") from exc
        control.append(ControlEntry(_expr_field(item, "coeff", where), a, b))

    initial = doc["initial"]
    if not isinstance(initial, str):
        raise SchemaError("initial must be an expression string")
    factor = doc.get("exact_factor")
    return FpeProblem(
        dimension=d,
        gamma=gamma,
        drift=tuple(drift),
        diffusion=tuple(tuple(r) for r in diffusion),
        initial=parse_expr(initial),
        control=ControlTerm(tuple(control)),
        order=doc.get("order", 8),
        name=doc.get("name", ""),
        example_id=doc.get("example"),
        exact_kind=doc.get("exact_kind"),
        exact_factor=parse_expr(factor) if factor is not None else None,
    )


def parse_problem(document: str) -> FpeProblem:
    """Read a JSON problem document."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    return problem_from_dict(doc)


def _q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def problem_to_dict(p: FpeProblem) -> dict[str, Any]:
    def flux_fields(ft: FluxTerm) -> dict:
        out = {}
        if ft.linear.terms:
            out["linear"] = str(ft.linear)
        if ft.quadratic.terms:
            out["quadratic"] = str(ft.quadratic)
        return out

    doc: dict[str, Any] = {
        "dimension": p.dimension,
        "gamma": _q(p.gamma),
        "order": p.order,
        "initial": str(p.initial),
        "drift": [{"i": i + 1, **flux_fields(ft)} for i, ft in enumerate(p.drift) if not ft.absent],
        "diffusion": [
            {"i": i + 1, "j": j + 1, **flux_fields(ft)}
            for i, row in enumerate(p.diffusion)
            for j, ft in enumerate(row)
            if not ft.absent
        ],
        "control": [{"coeff": str(c.coeff), "a": _q(c.a), "b": _q(c.b)} for c in p.control.entries],
    }
    if p.name:
        doc["name"] = p.name
    if p.example_id is not None:
        doc["example"] = p.example_id
    if p.exact_kind is not None:
        doc["exact_kind"] = p.exact_kind
    if p.exact_factor is not None:
        doc["exact_factor"] = str(p.exact_factor)
    return doc


def serialize_problem(p: FpeProblem) -> str:
    return json.dumps(problem_to_dict(p), indent=2)


# ---------------------------------------------------------------------------
# built-in library
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExampleInfo:
    id: str
    summary: str
    exact: str


def _grid(d: int, entries: dict) -> tuple:
    return tuple(tuple(entries.get((i, j), FluxTerm()) for j in range(d)) for i in range(d))


def _lin(text: str) -> FluxTerm:
    return FluxTerm(linear=parse_expr(text))


def _quad(text: str) -> FluxTerm:
    return FluxTerm(quadratic=parse_expr(text))


def _mixed_ones(d: int) -> dict:
    return {(i, j): _lin("1") for i in range(d) for j in range(d) if i != j}


def _ex1(g, K):
    return dict(dimension=1, drift=(_lin("-1"),), diffusion=_grid(1, {(0, 0): _lin("1")}),
                initial=parse_expr("z1"), exact_kind="affine_plus_power")


def _ex2(g, K):
    return dict(dimension=1, drift=(_lin("z1"),), diffusion=_grid(1, {(0, 0): _lin("1/2*z1^2")}),
                initial=parse_expr("z1"), exact_kind="c_times_ml_plus", exact_factor=parse_expr("z1"))


def _ex4(g, K):
    drift = FluxTerm(linear=parse_expr("-1/2*z1"), quadratic=parse_expr("3"))
    return dict(dimension=1, drift=(drift,), diffusion=_grid(1, {(0, 0): _quad("z1")}),
                initial=parse_expr("z1"), exact_kind="c_times_ml_plus", exact_factor=parse_expr("z1"))


def _ex5(g, K):
    diff = _mixed_ones(2)
    diff[(0, 0)] = _lin("z1^2")
    diff[(1, 1)] = _lin("z2^2")
    return dict(dimension=2, drift=(_lin("z1"), _lin("5*z2")), diffusion=_grid(2, diff),
                initial=parse_expr("z1"), exact_kind="c_times_ml_plus", exact_factor=parse_expr("z1"))


def _ex6(g, K):
    diff = _mixed_ones(2)
    diff[(0, 0)] = _quad("1")
    diff[(1, 1)] = _lin("1")
    return dict(dimension=2, drift=(_quad("4*z1^-1"), _lin("z2")), diffusion=_grid(2, diff),
                initial=parse_expr("z1^2"), exact_kind="c_times_ml_minus", exact_factor=parse_expr("z1^2"))


def _ex7(g, K, printed=False):
    diff = _mixed_ones(3)
    diff[(0, 0)] = _lin("z1")
    diff[(1, 1)] = _lin("1")
    diff[(2, 2)] = _lin("3/2*z3^3" if printed else "3/2*z3^2")
    out = dict(dimension=3, drift=(_lin("2*z1"), _lin("2*z2"), _lin("2*z3")), diffusion=_grid(3, diff),
               initial=parse_expr("z3"))
    if not printed:
        out.update(exact_kind="c_times_ml_plus", exact_factor=parse_expr("z3"))
    return out


def _ex8(g, K, printed=False):
    diff = _mixed_ones(3)
    diff[(0, 0)] = _quad("1")
    diff[(1, 1)] = _quad("1")
    diff[(2, 2)] = _lin("1")
    drift = (_lin("z1" if printed else "-z1"), _quad("1"), _lin("2*(z3 - 1)^-1"))
    out = dict(dimension=3, drift=drift, diffusion=_grid(3, diff), initial=parse_expr("(z3 - 1)^2"))
    if not printed:
        out.update(exact_kind="c_times_ml_plus", exact_factor=parse_expr("(z3 - 1)^2"))
    return out


def _s6a(g, K):
    # E_g(tau^g) expanded through tau^(K g)
    control = tuple(ControlEntry(sx.gamma_const(k * g + 1, -1), Fraction(k), Fraction(0)) for k in range(K + 1))
    return dict(dimension=1, drift=(_lin("-1/2*z1"),), diffusion=_grid(1, {(0, 0): _lin("1")}),
                initial=parse_expr("z1 + 2"), control=ControlTerm(control), exact_kind="ml_shifted")


def _s6b(g, K):
    source = sx.mul(sx.gamma_const(3), sx.gamma_const(3 - g, -1))
    first = sx.mul(source, parse_expr("sin(pi*z1)"))
    second = parse_expr(
        "pi^2*sin(pi*z1) - exp((z1 - 1/2)^2)*(2*(z1 - 1/2)*sin(pi*z1) + pi*cos(pi*z1))"
    )
    control = (ControlEntry(first, Fraction(-1), Fraction(2)), ControlEntry(second, Fraction(0), Fraction(2)))
    return dict(dimension=1, drift=(_lin("-exp((z1 - 1/2)^2)"),), diffusion=_grid(1, {(0, 0): _lin("1")}),
                initial=parse_expr("0"), control=ControlTerm(control), exact_kind="tau_squared_sine")


_BUILDERS = {
    "1": _ex1,
    "2": _ex2,
    "4": _ex4,
    "5": _ex5,
    "6": _ex6,
    "7": _ex7,
    "8": _ex8,
    "7p": lambda g, K: _ex7(g, K, printed=True),
    "8p": lambda g, K: _ex8(g, K, printed=True),
    "s6a": _s6a,
    "s6b": _s6b,
}

EXAMPLES = {
    "1": ExampleInfo("1", "1-d linear: D^g v = v_z + v_zz, v(z,0) = z", "z + t^g/Gamma(g+1)"),
    "2": ExampleInfo("2", "1-d linear: D^g v = -(z v)_z + (z^2 v/2)_zz, v(z,0) = z", "z E_g(t^g)"),
    "4": ExampleInfo("4", "1-d nonlinear: D^g v = -(3v^2 - z v/2)_z + (z v^2)_zz, v(z,0) = z", "z E_g(t^g)"),
    "5": ExampleInfo("5", "2-d linear, v(z,0) = z1", "z1 E_g(t^g)"),
    "6": ExampleInfo("6", "2-d nonlinear with flux 4/z1 v^2, v(z,0) = z1^2", "z1^2 E_g(-t^g)"),
    "7": ExampleInfo("7", "3-d linear, v(z,0) = z3; d33 flux 3/2 z3^2 v (corrected)", "z3 E_g(t^g)"),
    "8": ExampleInfo("8", "3-d nonlinear, v(z,0) = (z3-1)^2; d1 flux -z1 v (corrected)", "(z3-1)^2 E_g(t^g)"),
    "7p": ExampleInfo("7p", "Example 7 exactly as printed (d33 flux 3/2 z3^3 v)", "none"),
    "8p": ExampleInfo("8p", "Example 8 exactly as printed (d1 flux z1 v)", "none"),
    "s6a": ExampleInfo("s6a", "1-d with control E_g(t^g): D^g v = (z v/2)_z + v_zz + E_g(t^g), v(z,0) = z+2",
                       "(z+2) E_g(t^g)"),
    "s6b": ExampleInfo("s6b", "1-d with control g(z,t): D^g v = (e^{(z-1/2)^2} v)_z + v_zz + g, v(z,0) = 0",
                       "t^2 sin(pi z)"),
}


def builtin_example(example_id, gamma=1, order: int = 8) -> FpeProblem:
    key = str(example_id)
    if key not in _BUILDERS:
        raise UnknownExample(f"unknown example {example_id!r}; choose from {sorted(_BUILDERS)}")
    g = parse_gamma(gamma)
    data = _BUILDERS[key](g, order)
    return FpeProblem(gamma=g, order=order, name=f"example {key}", example_id=key, **data)


# ---------------------------------------------------------------------------
# solved series
# ---------------------------------------------------------------------------

@dataclass
class FpsSolution:
    """Coefficients p_0..p_K of v = sum_k p_k(z) tau^(k g) / Gamma(k g + 1)."""

    problem: FpeProblem
    coefficients: list[Expr]
    terminated_early: bool = False
    closed_form: Any = None
    warnings: list[str] = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @property
    def grid(self) -> list[FracExponent]:
        return [ss.grid(k, self.problem.gamma) for k in range(len(self.coefficients))]

    def time_series(self, upto: int | None = None) -> TimeSeries:
        """Raw-coefficient series sum_{k<=upto} p_k/Gamma(k g+1) tau^(k g)."""
        g = self.problem.gamma
        last = self.order if upto is None else upto
        return TimeSeries(
            g,
            [(ss.grid(k, g), sx.mul(p, sx.gamma_const(k * g + 1, -1)))
             for k, p in enumerate(self.coefficients[: last + 1])],
            self.problem.dimension,
        )
