"""Fractional power series in tau and their Laplace images in s.

A :class:`TimeSeries` stores raw coefficients: the entry ``c`` at exponent
``e`` means ``c(z) * tau^e``. A :class:`LaplaceSeries` entry ``c`` at ``e``
means ``c(z) * s^-e``. Exponents are :class:`FracExponent` values
``a*gamma + b`` compared by value, and every Gamma factor produced by the
transforms stays a symbolic token inside the coefficient Expr.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from types import MappingProxyType
from typing import Iterable, Mapping

from . import spatial_expr as sx
from .errors import DivergentLimit, UnsupportedExponent
from .spatial_expr import Expr, NumericalZeroWarning, ZeroStatus


@total_ordering
@dataclass(frozen=True, eq=False)
class FracExponent:
    """The exponent ``a*gamma + b`` for a fixed rational gamma."""

    a: Fraction
    b: Fraction
    gamma: Fraction

    def __post_init__(self):
        for name in ("a", "b", "gamma"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @property
    def value(self) -> Fraction:
        return self.a * self.gamma + self.b

    def __eq__(self, other):
        if isinstance(other, FracExponent):
            return self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, FracExponent):
            return self.value < other.value
        return self.value < other

    def __hash__(self):
        return hash(self.value)

    def __add__(self, other: "FracExponent") -> "FracExponent":
        return FracExponent(self.a + other.a, self.b + other.b, self.gamma)

    def shifted(self, da=0, db=0) -> "FracExponent":
        return FracExponent(self.a + da, self.b + db, self.gamma)

    def __str__(self):
        if self.a == 0:
            return str(self.b)
        head = "g" if self.a == 1 else f"{self.a}*g"
        if self.b == 0:
            return head
        return f"{head} {'+' if self.b > 0 else '-'} {abs(self.b)}"

    def __repr__(self):
        return f"FracExponent({self}, value={self.value})"


def grid(k: int, gamma) -> FracExponent:
    """The exponent k*gamma."""
    return FracExponent(k, 0, gamma)


class _Series:
    min_exponent = Fraction(0)

    def __init__(self, gamma, entries: Mapping | Iterable = (), dimension: int = 1):
        self.gamma = Fraction(gamma)
        self.dimension = dimension
        pairs = entries.items() if isinstance(entries, Mapping) else entries
        merged: dict[FracExponent, Expr] = {}
        for e, c in pairs:
            if not isinstance(e, FracExponent):
                e = FracExponent(0, e, self.gamma)
            elif e.gamma != self.gamma:
                raise ValueError(f"exponent built for gamma={e.gamma}, series has {self.gamma}")
            if e.value < self.min_exponent:
                raise ValueError(f"exponent {e} below {self.min_exponent} in {type(self).__name__}")
            merged[e] = sx.add(merged[e], c) if e in merged else c
        self._entries = MappingProxyType(
            {e: merged[e] for e in sorted(merged) if merged[e].terms}
        )

    @property
    def entries(self) -> Mapping[FracExponent, Expr]:
        return self._entries

    def items(self):
        return self._entries.items()

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __getitem__(self, e) -> Expr:
        if not isinstance(e, FracExponent):
            e = FracExponent(0, e, self.gamma)
        return self._entries.get(e, sx.ZERO_EXPR)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.gamma == other.gamma and dict(self._entries) == dict(other._entries)

    def __hash__(self):
        return hash((type(self), self.gamma, tuple(self._entries.items())))

    def _new(self, pairs, dimension=None):
        return type(self)(self.gamma, pairs, self.dimension if dimension is None else dimension)

    def __repr__(self):
        body = ", ".join(f"{e}: {c}" for e, c in self.items())
        return f"{type(self).__name__}(gamma={self.gamma}, {{{body}}})"

    def __add__(self, other):
        _check_compatible(self, other)
        return self._new(list(self.items()) + list(other.items()), max(self.dimension, other.dimension))

    def __neg__(self):
        return self._new((e, sx.neg(c)) for e, c in self.items())

    def __sub__(self, other):
        return self + (-other)


class TimeSeries(_Series):
    """sum_e c_e(z) * tau^e with raw (not Gamma-normalized) coefficients."""

    def eval(self, point, tau: float) -> float:
        return sum(c.eval(point) * float(tau) ** float(e.value) for e, c in self.items())


class LaplaceSeries(_Series):
    """sum_e c_e(z) * s^-e."""

    min_exponent = Fraction(1)


def _check_compatible(u: _Series, v: _Series) -> None:
    if type(u) is not type(v):
        raise TypeError(f"cannot mix {type(u).__name__} and {type(v).__name__}")
    if u.gamma != v.gamma:
        raise ValueError(f"gamma mismatch: {u.gamma} vs {v.gamma}")


# ---------------------------------------------------------------------------
# coefficient-wise operations
# ---------------------------------------------------------------------------

def ts_add(u: TimeSeries, v: TimeSeries) -> TimeSeries:
    return u + v


def ts_scale(u: TimeSeries, q) -> TimeSeries:
    return u._new((e, sx.scale(c, q)) for e, c in u.items())


def ts_mul_expr(u: TimeSeries, f: Expr) -> TimeSeries:
    return u._new((e, sx.mul(c, f)) for e, c in u.items())


def ts_truncate(u: _Series, cutoff) -> _Series:
    if cutoff is None:
        return u
    return u._new((e, c) for e, c in u.items() if e <= cutoff)


def ts_diff(u: TimeSeries, var: int) -> TimeSeries:
    return u._new((e, sx.diff(c, var)) for e, c in u.items())


def ts_product(u: TimeSeries, v: TimeSeries, cutoff=None) -> TimeSeries:
    """Cauchy product on raw coefficients, dropping exponents above cutoff."""
    _check_compatible(u, v)
    acc: dict[FracExponent, list[Expr]] = {}
    for e1, c1 in u.items():
        for e2, c2 in v.items():
            e = e1 + e2
            if cutoff is not None and e > cutoff:
                continue
            acc.setdefault(e, []).append(sx.mul(c1, c2))
    return u._new(((e, sx.add_all(cs)) for e, cs in acc.items()), max(u.dimension, v.dimension))


# ---------------------------------------------------------------------------
# Caputo derivative and the transform pair
# ---------------------------------------------------------------------------

def caputo_ts(u: TimeSeries) -> TimeSeries:
    """Order-gamma Caputo derivative by the power rule.

    D^g tau^e = Gamma(e+1)/Gamma(e+1-g) * tau^(e-g); constants map to 0.
    """
    g = u.gamma
    out = []
    for e, c in u.items():
        if e.value == 0:
            continue
        if e.value < g:
            raise UnsupportedExponent(f"exponent {e.value} lies strictly between 0 and gamma={g}")
        ratio = sx.mul(sx.gamma_const(e.value + 1), sx.gamma_const(e.value + 1 - g, -1))
        out.append((e.shifted(da=-1), sx.mul(c, ratio)))
    return u._new(out)


def laplace_of(u: TimeSeries) -> LaplaceSeries:
    """L{tau^e} = Gamma(e+1) / s^(e+1), termwise."""
    return LaplaceSeries(
        u.gamma,
        ((e.shifted(db=1), sx.mul(c, sx.gamma_const(e.value + 1))) for e, c in u.items()),
        u.dimension,
    )


def inverse_laplace(v: LaplaceSeries) -> TimeSeries:
    """L^-1{s^-e} = tau^(e-1) / Gamma(e), termwise."""
    return TimeSeries(
        v.gamma,
        ((e.shifted(db=-1), sx.mul(c, sx.gamma_const(e.value, -1))) for e, c in v.items()),
        v.dimension,
    )


def ls_shift(v: LaplaceSeries, by: FracExponent) -> LaplaceSeries:
    """Multiply by s^-by."""
    if by.value < 0:
        raise ValueError("shift must be non-negative")
    return v._new((e + by, c) for e, c in v.items())


# ---------------------------------------------------------------------------
# the P4 limit
# ---------------------------------------------------------------------------

@dataclass
class P4Result:
    solved: Expr
    surviving: Expr
    vanishing: int = 0
    numerically_zero: int = 0
    warnings: list[str] = field(default_factory=list)


def p4_extract(lrf: LaplaceSeries, k: int, sampling: bool = True) -> P4Result:
    """Apply lim_{s->inf} s^(k*gamma+1) * LR_k = 0 to an LRF without p_k.

    Entries decaying faster than s^-(k*gamma+1) vanish in the limit, the
    ones at exactly that rate make up S, and anything slower must be zero or
    the limit diverges. Since p_k enters the LRF with unit coefficient at
    k*gamma+1, the limit condition gives p_k = -S.
    """
    target = k * lrf.gamma + 1
    surviving = []
    res = P4Result(sx.ZERO_EXPR, sx.ZERO_EXPR)
    for e, c in lrf.items():
        m = target - e.value
        if m < 0:
            res.vanishing += 1
        elif m == 0:
            surviving.append(c)
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NumericalZeroWarning)
                status = sx.is_zero(c, sampling=sampling, dimension=lrf.dimension)
            if status is ZeroStatus.NONZERO:
                raise DivergentLimit(k, e, c)
            res.numerically_zero += 1
            res.warnings.append(f"k={k}: entry at s^-({e}) is only numerically zero: {c}")
    res.surviving = sx.add_all(surviving)
    res.solved = sx.neg(res.surviving)
    return res
