"""Gamma and one-parameter Mittag-Leffler functions on the real line."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import DomainError, NoConvergence, UnknownKind

# Lanczos coefficients for g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_sum(z: float) -> float:
    # z is the shifted argument x - 1
    acc = _LANCZOS_P[0]
    for i in range(1, len(_LANCZOS_P)):
        acc += _LANCZOS_P[i] / (z + i)
    return acc


def gamma_fn(x: float) -> float:
    """Gamma function for x > 0.

    Integer arguments up to 171 are returned as exact factorials. Other
    arguments below 1/2 are lifted with Gamma(x) = Gamma(x + 1) / x before
    the Lanczos sum is applied.
    """
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    if x.is_integer() and x <= 171:
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        return gamma_fn(x + 1.0) / x
    if x > 171.6:
        raise OverflowError(f"Gamma({x}) overflows a double")
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    # t^(z+1/2) is split in two so large arguments do not overflow early
    half = math.pow(t, 0.5 * (z + 0.5))
    return math.sqrt(2.0 * math.pi) * half * (half * math.exp(-t)) * _lanczos_sum(z)


def ln_gamma(x: float) -> float:
    """log Gamma(x) for x > 0, same approximation as gamma_fn."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    if x < 0.5:
        return ln_gamma(x + 1.0) - math.log(x)
    if x.is_integer() and x <= 171:
        return math.log(math.factorial(int(x) - 1))
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


@dataclass(frozen=True)
class MlParams:
    gamma_order: Fraction | float
    tol: float = 1e-15
    max_terms: int = 2000

    def __post_init__(self):
        if not 0 < self.gamma_order <= 1:
            raise DomainError(f"Mittag-Leffler order must lie in (0, 1], got {self.gamma_order}")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be positive")


def _ml_term(n: int, x: float, g: float) -> float:
    if n == 0:
        return 1.0
    arg = n * g + 1.0
    log_mag = n * math.log(abs(x))
    if arg <= 170.0 and log_mag < 700.0:
        return x**n / gamma_fn(arg)
    mag = math.exp(log_mag - ln_gamma(arg))
    return -mag if (x < 0 and n % 2) else mag


def mittag_leffler(p: MlParams, x: float) -> float:
    """Partial sum of E_g(x) = sum_n x^n / Gamma(n g + 1).

    Summation stops once the terms are past their peak and the latest one
    is below ``p.tol * max(1, |sum|)``.
    """
    x = float(x)
    if abs(x) > 10.0:
        raise DomainError(f"|x| <= 10 required, got {x}")
    if x == 0.0:
        return 1.0
    g = float(p.gamma_order)
    terms = [1.0]
    running = 1.0
    prev = 1.0
    for n in range(1, p.max_terms):
        t = _ml_term(n, x, g)
        terms.append(t)
        running += t
        if not math.isfinite(running):
            raise OverflowError(f"E_{g}({x}) overflows a double")
        if abs(t) <= abs(prev) and abs(t) < p.tol * max(1.0, abs(running)):
            return math.fsum(terms)
        prev = t
    raise NoConvergence(f"E_{g}({x}) did not converge in {p.max_terms} terms")


def ml(gamma_order, x: float) -> float:
    """Shorthand for ``mittag_leffler(MlParams(gamma_order), x)``."""
    return mittag_leffler(MlParams(gamma_order), x)


EXACT_KINDS = (
    "affine_plus_power",
    "c_times_ml_plus",
    "c_times_ml_minus",
    "ml_shifted",
    "tau_squared_sine",
)


def exact_reference(
    kind: str,
    point: Sequence[float],
    tau: float,
    gamma,
    factor: Callable[[Sequence[float]], float] | None = None,
) -> float:
    """Closed-form reference solutions of the built-in problems.

    ``factor`` is the spatial profile c(z) for the ``c_times_ml_*`` kinds.
    """
    tau = float(tau)
    g = float(gamma)
    if kind == "affine_plus_power":
        return point[0] + tau**g / gamma_fn(g + 1.0)
    if kind == "ml_shifted":
        return (point[0] + 2.0) * ml(gamma, tau**g)
    if kind == "tau_squared_sine":
        return tau * tau * math.sin(math.pi * point[0])
    if kind in ("c_times_ml_plus", "c_times_ml_minus"):
        if factor is None:
            raise ValueError(f"{kind} needs the spatial factor c(z)")
        sign = 1.0 if kind == "c_times_ml_plus" else -1.0
        return factor(point) * ml(gamma, sign * tau**g)
    raise UnknownKind(kind)
