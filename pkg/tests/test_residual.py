import math
from fractions import Fraction

import mpmath
import pytest

from lrps.engine import solve
from lrps.fpe_model import builtin_example
from lrps.residual import caputo_numeric, residual_numeric, sample_residuals


@pytest.mark.parametrize("g", [Fraction(1, 3), Fraction(1, 2), Fraction(3, 4), Fraction(1)])
def test_caputo_numeric_power_rule(g):
    # D^g t^2 = 2 / Gamma(3 - g) t^(2 - g)
    with mpmath.mp.workdps(30):
        gm = mpmath.mpf(g.numerator) / g.denominator
        got = caputo_numeric(lambda t: t**2, mpmath.mpf("0.7"), g)
        want = 2 / mpmath.gamma(3 - gm) * mpmath.mpf("0.7") ** (2 - gm)
        assert abs(got - want) < mpmath.mpf(10) ** -20


def test_caputo_numeric_ignores_constants():
    with mpmath.mp.workdps(30):
        assert abs(caputo_numeric(lambda t: 5 + 0 * t, mpmath.mpf("0.3"), Fraction(1, 2))) < 1e-25


def test_exact_termination_has_no_residual():
    sol, _ = solve(builtin_example(1, Fraction(1, 2)))
    assert abs(residual_numeric(sol, (0.4,), 0.3)) < 1e-20


@pytest.mark.parametrize("eid, g", [("4", Fraction(3, 4)), ("6", Fraction(1, 2)), ("s6a", Fraction(3, 4))])
def test_oracle_agrees_with_symbolic_residual(eid, g):
    sol, _ = solve(builtin_example(eid, g))
    samples = sample_residuals(sol)
    assert len(samples) == 5
    assert max(s.discrepancy for s in samples) < 1e-9
    # the truncation residual is real and the oracle sees it
    assert max(abs(s.numeric) for s in samples) > 1e-8


def test_oracle_detects_a_wrong_coefficient():
    sol, _ = solve(builtin_example(2, Fraction(1, 2), 4))
    sol.coefficients[2] = sol.coefficients[2] * 2
    from lrps.engine import structural_residual
    assert len(structural_residual(sol)) > 0
    # the numeric residual alone is not small at low order
    assert abs(float(residual_numeric(sol, (0.5,), 0.2))) > 1e-3
