"""Laplace residual power series for time-fractional Fokker-Planck equations."""

from .engine import EngineReport, MittagLefflerForm, Outcome, PolynomialForm, detect_closed_form, evaluate, solve
from .exprparse import parse_expr
from .fpe_model import (
    EXAMPLES,
    ControlEntry,
    ControlTerm,
    FluxTerm,
    FpeProblem,
    FpsSolution,
    apply_fp_operator,
    builtin_example,
    parse_problem,
    serialize_problem,
)
from .special_fn import exact_reference, gamma_fn, mittag_leffler, ml

__all__ = [
    "EXAMPLES", "ControlEntry", "ControlTerm", "EngineReport", "FluxTerm", "FpeProblem", "FpsSolution",
    "MittagLefflerForm", "Outcome", "PolynomialForm", "apply_fp_operator", "builtin_example",
    "detect_closed_form", "evaluate", "exact_reference", "gamma_fn", "mittag_leffler", "ml",
    "parse_expr", "parse_problem", "serialize_problem", "solve",
]
