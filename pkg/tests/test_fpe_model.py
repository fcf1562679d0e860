import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lrps import series as ss
from lrps import spatial_expr as sx
from lrps.errors import DimensionError, GammaRangeError, ParseError, SchemaError, UnknownExample
from lrps.exprparse import parse_expr
from lrps.fpe_model import (
    EXAMPLES, ControlEntry, ControlTerm, FluxTerm, FpeProblem, apply_fp_operator, builtin_example,
    parse_problem, problem_to_dict, serialize_problem,
)

from strategies import exprs

EX1 = {
    "dimension": 1,
    "gamma": "1/2",
    "order": 8,
    "initial": "z1",
    "drift": [{"i": 1, "linear": "-1"}],
    "diffusion": [{"i": 1, "j": 1, "linear": "1"}],
}


def test_example_1_file_parses_and_round_trips():
    p = parse_problem(json.dumps(EX1))
    assert p.gamma == Fraction(1, 2)
    assert p.drift[0].linear == sx.const(-1)
    assert parse_problem(serialize_problem(p)) == p


@pytest.mark.parametrize("eid", sorted(EXAMPLES))
@pytest.mark.parametrize("gamma", [Fraction(1, 2), Fraction(3, 4), Fraction(1)])
def test_builtins_round_trip(eid, gamma):
    p = builtin_example(eid, gamma)
    assert parse_problem(serialize_problem(p)) == p


def test_decimal_gamma_is_exact():
    assert parse_problem(json.dumps({**EX1, "gamma": "0.75"})).gamma == Fraction(3, 4)


@pytest.mark.parametrize("gamma", ["0", "1.5", "-1/2"])
def test_gamma_range(gamma):
    with pytest.raises(GammaRangeError):
        parse_problem(json.dumps({**EX1, "gamma": gamma}))


def test_dimension_errors():
    doc = {**EX1, "dimension": 2, "initial": "z3"}
    with pytest.raises(DimensionError):
        parse_problem(json.dumps(doc))
    with pytest.raises(DimensionError):
        parse_problem(json.dumps({**EX1, "dimension": 4}))
    with pytest.raises(DimensionError):
        parse_problem(json.dumps({**EX1, "drift": [{"i": 2, "linear": "1"}]}))


@pytest.mark.parametrize(
    "doc",
    [
        {k: v for k, v in EX1.items() if k != "initial"},
        {**EX1, "extra": 1},
        {**EX1, "drift": [{"i": 1, "linear": "1", "cubic": "1"}]},
        {**EX1, "drift": [{"i": 1}, {"i": 1}]},
        {**EX1, "diffusion": [{"i": 1, "linear": "1"}]},
        {**EX1, "control": [{"coeff": "1", "a": "0"}]},
        {**EX1, "control": [{"coeff": "1", "a": "0", "b": "1"}, {"coeff": "z1", "a": "2", "b": "0"}]},
        {**EX1, "initial": 3},
        {**EX1, "order": 0},
    ],
)
def test_schema_errors(doc):
    with pytest.raises(SchemaError):
        parse_problem(json.dumps(doc))


def test_bad_json_and_bad_expression():
    with pytest.raises(SchemaError):
        parse_problem("{not json")
    with pytest.raises(ParseError):
        parse_problem(json.dumps({**EX1, "initial": "z1/z1"}))


def test_unknown_example():
    with pytest.raises(UnknownExample):
        builtin_example(3)


def test_with_gamma_rebuilds_gamma_dependent_data():
    p = builtin_example("s6b", Fraction(1, 2))
    q = p.with_gamma(Fraction(2, 3))
    assert q.gamma == Fraction(2, 3)
    # Gamma(3)/Gamma(3 - g) changes with gamma
    assert q.control.entries[0].coeff != p.control.entries[0].coeff
    assert p.with_order(4).order == 4


def test_linearity_flag():
    assert builtin_example(2).is_linear
    assert not builtin_example(4).is_linear


def _single(problem, expr):
    return ss.TimeSeries(problem.gamma, [(0, expr)], problem.dimension)


def test_fp_operator_on_initial_data():
    # Example 1: v_z + v_zz at v = z gives 1; Example 6 gives -z1^2
    p1 = builtin_example(1)
    assert apply_fp_operator(_single(p1, p1.initial), p1)[0] == sx.const(1)
    p6 = builtin_example(6)
    assert apply_fp_operator(_single(p6, p6.initial), p6)[0] == parse_expr("-z1^2")


def test_fp_operator_nonlinear_uses_product_with_cutoff():
    p = builtin_example(4, Fraction(1, 2))
    g = p.gamma
    u = ss.TimeSeries(g, [(0, parse_expr("z1")), (ss.grid(1, g), parse_expr("z1^2"))])
    full = apply_fp_operator(u, p)
    cut = apply_fp_operator(u, p, ss.grid(1, g))
    assert ss.ts_truncate(full, ss.grid(1, g)) == cut
    # the v^2 fluxes give -(3 z^4)' + (z * z^4)'' = 8 z^3 at order 2g
    assert full[ss.grid(2, g)] == parse_expr("8*z1^3")


@given(exprs(1, 2, 2), exprs(1, 2, 2))
def test_fp_operator_is_linear_for_linear_problems(a, b):
    p = builtin_example(2)
    ua, ub = _single(p, a), _single(p, b)
    assert apply_fp_operator(ua + ub, p) == apply_fp_operator(ua, p) + apply_fp_operator(ub, p)


def test_direct_construction_validation():
    flux = (FluxTerm(),)
    grid = ((FluxTerm(),),)
    with pytest.raises(DimensionError):
        FpeProblem(1, Fraction(1, 2), flux, grid, parse_expr("z2"))
    with pytest.raises(DimensionError):
        FpeProblem(2, Fraction(1, 2), flux, grid, parse_expr("z1"))
    ctl = ControlTerm((ControlEntry(sx.const(1), Fraction(-1), Fraction(0)),))
    with pytest.raises(SchemaError):
        FpeProblem(1, Fraction(1, 2), flux, grid, parse_expr("z1"), control=ctl)


def test_serialization_omits_absent_fluxes():
    doc = problem_to_dict(builtin_example(5))
    assert len(doc["drift"]) == 2 and len(doc["diffusion"]) == 4
    assert doc["gamma"] == "1"
