import csv
import io
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lrps.cli import main
from lrps.errors import DivisionByZeroExact, ExactUnavailable, IoError, SchemaError
from lrps.fpe_model import builtin_example, serialize_problem
from lrps.report import (
    Table, TableSpec, emit, format_float, run_order_sweep, run_residual_check, run_table,
)


def test_format_float_rule():
    assert format_float(0.580917121364088) == "5.80917121364088e-1"
    assert format_float(0.5) == "5.00000000000000e-1"
    assert format_float(1.0) == "1.00000000000000e0"
    assert format_float(0.1 + 0.2) == "3.0000000000000004e-1"
    assert format_float(-2.5e-300) == "-2.50000000000000e-300"


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_float_round_trips(x):
    text = format_float(x)
    assert float(text) == x
    digits = len(text.split("e")[0].lstrip("-").replace(".", ""))
    assert digits >= 15


def test_empty_table_is_header_only():
    t = Table("empty", ["gamma", "tau", "value"])
    assert emit(t, "csv") == "gamma,tau,value\n"


def test_one_cell_table():
    t = Table("one", ["value"], [[0.580917121364088]])
    assert emit(t, "csv").splitlines()[1] == "5.80917121364088e-1"


def test_json_round_trips_through_parser():
    t = run_table(builtin_example(2, 1), None, TableSpec([(0.5,)], [0.15, 0.3], [1]))
    doc = json.loads(emit(t, "json"))
    assert doc["columns"] == t.columns
    assert doc["rows"] == t.rows


def test_csv_parses_and_is_deterministic():
    spec = TableSpec([(0.5, 0.5)], [0.15, 0.9], [Fraction(1), Fraction(1, 2)])
    a = emit(run_table(builtin_example(6), None, spec), "csv")
    b = emit(run_table(builtin_example(6), None, spec), "csv")
    assert a == b
    rows = list(csv.reader(io.StringIO(a)))
    assert rows[0] == ["gamma", "z1", "z2", "tau", "value", "exact", "abs_error", "rel_error"]
    assert len(rows) == 5


def test_pretty_output_is_aligned():
    t = Table("demo", ["a", "bbb"], [[1.5, "x"], [22.25, "yy"]])
    lines = emit(t, "pretty").splitlines()
    assert lines[0] == "demo"
    assert len({len(line) for line in lines[1:3]}) == 1


def test_emit_errors():
    with pytest.raises(SchemaError):
        emit(Table("t", ["a"]), "xml")

    class Broken(io.StringIO):
        def write(self, s):
            raise OSError("disk full")

    with pytest.raises(IoError):
        emit(Table("t", ["a"]), "csv", Broken())


def test_table_spec_validation():
    with pytest.raises(SchemaError):
        TableSpec([(0.5,)], [0.3, 0.1], [1])
    with pytest.raises(SchemaError):
        TableSpec([(0.5,)], [-0.1], [1])
    with pytest.raises(SchemaError):
        TableSpec([(0.5,)], [0.1], [Fraction(3, 2)])
    with pytest.raises(SchemaError):
        TableSpec([(0.5,)], [0.1], [1], ("value", "bogus"))


def test_time_zero_has_no_error():
    for eid, pt in (("2", (0.5,)), ("6", (0.5, 0.5)), ("8", (0.5, 0.5, 0.5)), ("s6a", (0.3,))):
        t = run_table(builtin_example(eid), None, TableSpec([pt], [0.0], [Fraction(1, 2), 1], ("abs_error",)))
        assert t.column("abs_error") == [0.0, 0.0]


def test_table_errors():
    spec = TableSpec([(0.5, 0.5, 0.5)], [0.1], [1])
    with pytest.raises(ExactUnavailable):
        run_table(builtin_example("7p"), None, spec)
    values = run_table(builtin_example("7p"), None, TableSpec([(0.5,) * 3], [0.1], [1], ("value",)))
    assert len(values.rows) == 1
    with pytest.raises(DivisionByZeroExact):
        run_table(builtin_example("s6b"), None, TableSpec([(0.5,)], [0.0], [1], ("rel_error",)))


def test_order_sweep_is_monotone():
    spec = TableSpec([(0.5,), (1.0,)], [0.1, 0.2, 0.3, 0.4, 0.5], [1])
    t = run_order_sweep(builtin_example(2), spec, (4, 6, 8))
    assert t.columns[-3:] == ["abs_error_K4", "abs_error_K6", "abs_error_K8"]
    for row in t.rows:
        assert row[-1] <= row[-2] <= row[-3]
    with pytest.raises(SchemaError):
        run_order_sweep(builtin_example(2), spec, ())


def test_residual_check_rows():
    t = run_residual_check(builtin_example("s6b"), [Fraction(4, 5), Fraction(1)])
    first, second = t.rows
    assert first[1] == "Inapplicable" and "p_3" in first[-1]
    assert second[1] == "EarlyTerminated" and second[2] == "zero"
    assert second[4] < 1e-9


# command line

def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def test_cli_solve():
    code, out, _ = run(["solve", "--example", "6", "--gamma", "1/2", "--order", "4"])
    assert code == 0
    assert "p_3 = -z1^2" in out and "closed form" in out
    code, out, _ = run(["solve", "--example", "2", "--format", "json", "--order", "4"])
    assert json.loads(out)["coefficients"] == ["z1"] * 5


def test_cli_table_csv():
    code, out, _ = run(["table", "--example", "2", "--gamma", "1", "--order", "3",
                        "--points", "0.25;1.0", "--times", "0.01,0.6", "--columns", "value"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["gamma", "z1", "tau", "value"]
    assert float(rows[4][3]) == pytest.approx(1.816)


def test_cli_order_sweep_and_examples():
    code, out, _ = run(["order-sweep", "--example", "8", "--points", "0.5", "--times", "0.1"])
    assert code == 0 and "abs_error_K8" in out
    code, out, _ = run(["examples"])
    assert code == 0 and "s6b" in out


def test_cli_exit_codes(tmp_path):
    assert run(["solve", "--example", "s6b", "--gamma", "4/5"])[0] == 3
    assert run(["residual-check", "--example", "s6b", "--gammas", "4/5"])[0] == 3
    assert run(["solve", "--example", "99"])[0] == 2
    assert run(["solve", "--example", "2", "--gamma", "0"])[0] == 2
    assert run(["bogus"])[0] == 2
    assert run(["table", "--example", "7p", "--columns", "abs_error"])[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"dimension": 1}')
    assert run(["solve", "--problem", str(bad)])[0] == 2
    assert run(["table", "--example", "s6b", "--times", "0", "--columns", "rel_error"])[0] == 4


def test_cli_problem_file(tmp_path):
    path = tmp_path / "ex2.json"
    path.write_text(serialize_problem(builtin_example(2, Fraction(1, 2), 4)))
    code, out, _ = run(["solve", "--problem", str(path)])
    assert code == 0 and "p_4 = z1" in out
