"""Numeric residual of a truncated series, independent of the symbolic operators.

The Caputo derivative is taken by quadrature of the Marchaud form

    D^g f(t) = [ (f(t) - f(0)) t^-g + g * int_0^t (f(t) - f(t-w)) w^(-g-1) dw ] / Gamma(1-g)

for 0 < g < 1 (a plain derivative for g = 1), and the spatial derivatives of
the fluxes by mpmath's numerical differentiation. Next to w = 0 a
two-term Taylor expansion covers [0, 1e-12 t] exactly and quadrature forms
f(t) - f(t-w) with extra working digits beyond that; the half near w = t is integrated in s = t - w so the tau^(k g)
singularities of f sit exactly on the endpoint s = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .fpe_model import FpsSolution
from .spatial_expr import Expr, sample_points
from . import spatial_expr as sx

DEFAULT_DPS = 30


def _mpq(q) -> mpmath.mpf:
    q = Fraction(q)
    return mpmath.mpf(q.numerator) / q.denominator


def _series_in_time(sol: FpsSolution, point: Sequence, extra: int = 40):
    """tau -> v_K(point, tau) with coefficients evaluated once at high precision."""
    g = _mpq(sol.problem.gamma)
    with mpmath.mp.workdps(mpmath.mp.dps + extra):
        pts = [mpmath.mpf(x) for x in point]
        coeffs = [(k, p.eval_mp(pts) / mpmath.gamma(k * g + 1)) for k, p in enumerate(sol.coefficients) if p.terms]

    def f(t):
        return mpmath.fsum(c * (t ** (k * g) if k else 1) for k, c in coeffs)

    return f, g


def caputo_numeric(f, t, gamma) -> mpmath.mpf:
    """Order-gamma Caputo derivative of f at t > 0, for gamma in (0, 1]."""
    t = mpmath.mpf(t)
    if gamma == 1:
        return mpmath.diff(f, t)
    g = _mpq(gamma)
    ft = f(t)

    # on [0, delta] use f(t) - f(t-w) = f'(t) w - f''(t) w^2/2 + O(w^3),
    # integrated exactly; quadrature takes over from delta on
    delta = t * mpmath.mpf(10) ** -12
    d1 = mpmath.diff(f, t, 1)
    d2 = mpmath.diff(f, t, 2)
    head = d1 * delta ** (1 - g) / (1 - g) - d2 / 2 * delta ** (2 - g) / (2 - g)

    def near(w):
        extra = max(0, int(-mpmath.log10(w))) + 10
        with mpmath.mp.workdps(mpmath.mp.dps + extra):
            diff = ft_hi - f(t - w)
        return diff * w ** (-g - 1)

    def far(s):
        # s close to 0, where f has its tau^(k g) singularities
        return (ft - f(s)) * (t - s) ** (-g - 1)

    with mpmath.mp.workdps(mpmath.mp.dps + 40):
        ft_hi = f(t)
    integral = head + mpmath.quad(near, [delta, t / 2]) + mpmath.quad(far, [0, t / 2])
    return ((ft - f(0)) * t ** (-g) + g * integral) / mpmath.gamma(1 - g)


def fp_numeric(sol: FpsSolution, point: Sequence, tau) -> mpmath.mpf:
    """-sum_i d_i F1_i + sum_ij d_i d_j F2_ij at (point, tau) by numerical differentiation."""
    problem = sol.problem
    g = _mpq(problem.gamma)
    tau = mpmath.mpf(tau)
    d = problem.dimension

    def nu(z):
        return mpmath.fsum(
            p.eval_mp(z) * (tau ** (k * g) if k else 1) / mpmath.gamma(k * g + 1)
            for k, p in enumerate(sol.coefficients) if p.terms
        )

    def flux(ft):
        def h(*z):
            v = nu(list(z))
            out = ft.linear.eval_mp(list(z)) * v if ft.linear.terms else 0
            if ft.quadratic.terms:
                out += ft.quadratic.eval_mp(list(z)) * v * v
            return out
        return h

    x = [mpmath.mpf(c) for c in point[:d]]
    total = mpmath.mpf(0)
    for i, ft in enumerate(problem.drift):
        if not ft.absent:
            order = tuple(1 if m == i else 0 for m in range(d))
            total -= mpmath.diff(flux(ft), x, order)
    for i in range(d):
        for j in range(d):
            ft = problem.diffusion[i][j]
            if ft.absent:
                continue
            order = [0] * d
            order[i] += 1
            order[j] += 1
            total += mpmath.diff(flux(ft), x, tuple(order))
    return total


def control_numeric(sol: FpsSolution, point: Sequence, tau) -> mpmath.mpf:
    g = sol.problem.gamma
    tau = mpmath.mpf(tau)
    pts = [mpmath.mpf(x) for x in point]
    out = mpmath.mpf(0)
    for c in sol.problem.control.entries:
        e = c.exponent(g).value
        out += c.coeff.eval_mp(pts) * tau ** _mpq(e)
    return out


def residual_numeric(sol: FpsSolution, point: Sequence, tau, dps: int = DEFAULT_DPS) -> mpmath.mpf:
    """D^g v_K - FP[v_K] - control at (point, tau), all numerically."""
    with mpmath.mp.workdps(dps):
        f, g = _series_in_time(sol, point)
        return caputo_numeric(f, tau, sol.problem.gamma) - fp_numeric(sol, point, tau) - control_numeric(sol, point, tau)


@dataclass
class ResidualSample:
    point: tuple[float, ...]
    tau: float
    numeric: float       # residual from the numeric oracle
    predicted: float     # the symbolic residual above order (K-1) g, evaluated
    discrepancy: float   # |numeric - predicted|


def sample_residuals(sol: FpsSolution, count: int = 5, dps: int = DEFAULT_DPS) -> list[ResidualSample]:
    """Compare the numeric residual with the symbolic one at deterministic samples.

    Truncation leaves residual terms above order (K-1) g; the symbolic
    residual predicts them exactly, so the oracle should agree with it to
    roughly the working precision.
    """
    from .engine import residual_series

    problem = sol.problem
    avoid = sx.add_all(list(sol.coefficients) + [c.coeff for c in problem.control.entries])
    points = sample_points(problem.dimension, count, avoid=avoid)
    taus = [0.1 * (n + 1) for n in range(count)]
    predicted_series = residual_series(sol)
    out = []
    for pt, tau in zip(points, taus):
        with mpmath.mp.workdps(dps):
            num = residual_numeric(sol, pt, tau, dps)
            mp_pt = [mpmath.mpf(x) for x in pt]
            pred = mpmath.fsum(
                c.eval_mp(mp_pt) * mpmath.mpf(tau) ** _mpq(e.value)
                for e, c in predicted_series.items()
            )
            out.append(ResidualSample(tuple(pt), tau, float(num), float(pred), float(abs(num - pred))))
    return out
