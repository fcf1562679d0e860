"""Laplace residual power series recursion.

With V = phi/s + s^-g L{FP[v] + control}, the k-th truncated residual is

    LR_k = L{v_(k-1)} + p_k/s^(k g+1) - phi/s - s^-g L{FP[v_(k-1)] + control}

and requiring s^(k g+1) LR_k -> 0 fixes p_k. The unknown is never stored in
the series: it is the only entry at s^-(k g+1) with a unit coefficient, so
p_k is minus the sum of the other entries there.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import series as ss
from . import spatial_expr as sx
from .errors import CancellationError, DivergentLimit, Inapplicable
from .fpe_model import FpeProblem, FpsSolution, apply_fp_operator
from .series import FracExponent, LaplaceSeries, TimeSeries
from .spatial_expr import Expr
from .special_fn import gamma_fn


class Outcome(enum.Enum):
    COMPLETED = "Completed"
    EARLY_TERMINATED = "EarlyTerminated"
    INAPPLICABLE = "Inapplicable"


@dataclass
class StepRecord:
    k: int
    surviving_expr: Expr
    cancelled_entry_count: int
    status: str  # "solved", "zero" or "inapplicable"


@dataclass
class EngineReport:
    steps: list[StepRecord] = field(default_factory=list)
    outcome: Outcome = Outcome.COMPLETED
    witness: str = ""
    warnings: list[str] = field(default_factory=list)


def _on_grid(e: FracExponent, gamma: Fraction) -> int | None:
    """j when e == j*gamma + 1 for an integer j >= 0, else None."""
    q = (e.value - 1) / gamma
    return int(q) if q.denominator == 1 and q >= 0 else None


def _residual_lrf(problem: FpeProblem, coeffs: list[Expr], k: int) -> LaplaceSeries:
    g = problem.gamma
    d = problem.dimension
    nu = FpsSolution(problem, coeffs).time_series()
    w = apply_fp_operator(nu, problem, ss.grid(k - 1, g))
    forcing = w + problem.control_series()
    phi = LaplaceSeries(g, [(FracExponent(0, 1, g), problem.initial)], d)
    return ss.laplace_of(nu) - phi - ss.ls_shift(ss.laplace_of(forcing), ss.grid(1, g))


def _pending_control(problem: FpeProblem, k: int) -> bool:
    """True while some control entry still has to reach the limit at a later k."""
    g = problem.gamma
    return any(c.exponent(g).value + g > k * g for c in problem.control.entries)


def solve(problem: FpeProblem) -> tuple[FpsSolution, EngineReport]:
    """Run the recursion up to problem.order.

    Raises Inapplicable when the limit diverges on an entry off the grid
    j*gamma + 1 (the coefficient cannot be fixed for this gamma), and
    CancellationError when an on-grid entry of lower order fails to cancel.
    """
    g = problem.gamma
    K = problem.order
    coeffs: list[Expr] = [problem.initial]
    report = EngineReport()
    zeros_in_row = 0
    for k in range(1, K + 1):
        lrf = _residual_lrf(problem, coeffs, k)
        try:
            res = ss.p4_extract(lrf, k)
        except DivergentLimit as exc:
            j = _on_grid(exc.exponent, g)
            if j is not None and j < k:
                raise CancellationError(
                    f"p_{k}: entry at s^-({exc.exponent.value}) did not cancel: {exc.coefficient}"
                ) from exc
            report.steps.append(StepRecord(k, exc.coefficient, 0, "inapplicable"))
            report.outcome = Outcome.INAPPLICABLE
            report.witness = (
                f"gamma={g}: term at s^-({exc.exponent.value}) outlives s^-({k * g + 1})"
            )
            err = Inapplicable(k, g, exc.exponent.value, exc.coefficient)
            err.report = report
            raise err from exc
        report.warnings.extend(res.warnings)
        p = res.solved
        zero = not p.terms
        report.steps.append(StepRecord(k, res.surviving, res.numerically_zero, "zero" if zero else "solved"))
        coeffs.append(p)
        zeros_in_row = zeros_in_row + 1 if zero else 0
        if zeros_in_row >= 2 and problem.is_linear and not _pending_control(problem, k) and k < K:
            coeffs.extend(sx.ZERO_EXPR for _ in range(K - k))
            report.outcome = Outcome.EARLY_TERMINATED
            break
    sol = FpsSolution(
        problem,
        coeffs,
        terminated_early=report.outcome is Outcome.EARLY_TERMINATED,
        warnings=list(report.warnings),
    )
    sol.closed_form = detect_closed_form(sol)
    return sol, report


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MittagLefflerForm:
    """v = c(z) * E_g(r * tau^g)."""

    c: Expr
    r: Fraction

    def __str__(self):
        return f"({self.c}) * E_g({self.r} * tau^g)"


@dataclass(frozen=True)
class PolynomialForm:
    """p_k = 0 for every k >= 2, so v = p_0 + p_1 tau^g / Gamma(g+1)."""

    def __str__(self):
        return "p_0 + p_1 * tau^g / Gamma(g+1)"


def detect_closed_form(sol: FpsSolution):
    p = sol.coefficients
    if len(p) < 5:
        return None
    if all(not q.terms for q in p[2:]):
        return PolynomialForm()
    c = p[0]
    if not c.terms or len(p[1].terms) != len(c.terms):
        return None
    # r from the ratio of leading terms, then confirm every coefficient
    lead0 = dict((t.key, t.coeff) for t in c.terms)
    t1 = p[1].terms[0]
    if t1.key not in lead0:
        return None
    r = t1.coeff / lead0[t1.key]
    if all(q == sx.scale(c, r**k) for k, q in enumerate(p)):
        return MittagLefflerForm(c, r)
    return None


# ---------------------------------------------------------------------------
# evaluation and residuals
# ---------------------------------------------------------------------------

def evaluate(sol: FpsSolution, point: Sequence[float], tau: float) -> float:
    """sum_k p_k(point) tau^(k g) / Gamma(k g + 1)."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    g = float(sol.problem.gamma)
    terms = []
    for k, p in enumerate(sol.coefficients):
        if not p.terms:
            continue
        weight = 1.0 if k == 0 else float(tau) ** (k * g) / gamma_fn(k * g + 1.0)
        terms.append(p.eval(point) * weight)
    return math.fsum(terms)


def residual_series(sol: FpsSolution) -> TimeSeries:
    """D^g v_K - FP[v_K] - control, with no truncation."""
    problem = sol.problem
    nu = sol.time_series()
    return ss.caputo_ts(nu) - apply_fp_operator(nu, problem) - problem.control_series()


def structural_residual(sol: FpsSolution) -> TimeSeries:
    """Entries of the residual at exponents up to (K-1) g; empty when solved."""
    K = sol.order
    return ss.ts_truncate(residual_series(sol), ss.grid(K - 1, sol.problem.gamma))
