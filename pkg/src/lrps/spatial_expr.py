"""Exact expression algebra over the spatial variables z1..z3.

An :class:`Expr` is a finite sum of :class:`Term` objects. Each term is a
rational coefficient times

* one affine factor per variable, in a partial-fraction basis: either
  ``z^m`` with ``m`` any nonzero integer, or ``(z + a)^-n`` with ``a != 0``
  and ``n > 0``;
* at most one ``exp(P)`` with ``P`` a polynomial;
* a multiset of ``sin``/``cos`` factors of ``pi^s * (c*z + d)``;
* a power of ``pi`` and integer powers of ``Gamma(f)`` for ``0 < f < 1``.

That basis is unique, so two expressions are equal as functions in this
class exactly when their term tuples are equal (trig identities excepted,
see :func:`is_zero`).
"""

from __future__ import annotations

import enum
import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

from .errors import DomainError, PoleAtPoint
from .special_fn import gamma_fn

ONE = Fraction(1)
ZERO = Fraction(0)
HALF = Fraction(1, 2)

VAR_NAMES = ("z1", "z2", "z3")


@dataclass(frozen=True, order=True)
class Affine:
    """The linear form ``z_var + shift``."""

    var: int
    shift: Fraction = ZERO


@dataclass(frozen=True, order=True)
class Trig:
    """``kind(pi^pi * (scale * z_var + offset))`` with ``scale > 0``.

    When ``pi`` is set the offset is reduced into [0, 1).
    """

    kind: str
    var: int
    pi: bool
    scale: Fraction
    offset: Fraction


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    powers: tuple[tuple[Affine, int], ...] = ()
    exp_arg: "Expr | None" = None
    trig: tuple[Trig, ...] = ()
    pi_power: int = 0
    gammas: tuple[tuple[Fraction, int], ...] = ()

    @property
    def key(self):
        return (self.powers, self.exp_arg, self.trig, self.pi_power, self.gammas)

    def is_constant(self) -> bool:
        return not self.powers and self.exp_arg is None and not self.trig


_UNIT_KEY = ((), None, (), 0, ())


def _key_order(key):
    powers, exp_arg, trig, pi_power, gammas = key
    degree = sum(e for _, e in powers)
    exp_part = (0,) if exp_arg is None else (1, tuple(_term_order(t) for t in exp_arg.terms))
    return (
        -degree,
        tuple((a.var, e, a.shift) for a, e in powers),
        exp_part,
        tuple((t.kind, t.var, t.pi, t.scale, t.offset) for t in trig),
        pi_power,
        gammas,
    )


def _term_order(t: Term):
    return (_key_order(t.key), t.coeff)


@dataclass(frozen=True)
class Expr:
    """A normalized expression. Build with the module constructors."""

    terms: tuple[Term, ...] = ()

    # -- arithmetic sugar -------------------------------------------------
    def __add__(self, other):
        return add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, neg(_coerce(other)))

    def __rsub__(self, other):
        return add(_coerce(other), neg(self))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return scale(self, other)
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return neg(self)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers of a general Expr")
        out = const(1)
        for _ in range(n):
            out = mul(out, self)
        return out

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"Expr({render(self)!r})"

    # -- queries ----------------------------------------------------------
    @property
    def is_zero_structural(self) -> bool:
        return not self.terms

    def variables(self) -> set[int]:
        out: set[int] = set()
        for t in self.terms:
            out.update(a.var for a, _ in t.powers)
            out.update(tr.var for tr in t.trig)
            if t.exp_arg is not None:
                out |= t.exp_arg.variables()
        return out

    def max_var(self) -> int:
        """Largest variable index used, -1 for constants."""
        return max(self.variables(), default=-1)

    def is_polynomial(self) -> bool:
        return all(
            t.exp_arg is None and not t.trig and all(e > 0 for _, e in t.powers)
            for t in self.terms
        )

    def constant_value(self) -> Fraction | None:
        """The value of a purely rational constant, else None."""
        if not self.terms:
            return ZERO
        if len(self.terms) == 1 and self.terms[0].key == _UNIT_KEY:
            return self.terms[0].coeff
        return None

    def eval(self, point: Sequence[float]) -> float:
        return _evaluate(self, point, _FLOAT)

    def eval_mp(self, point):
        """Evaluate with mpmath at the current ``mp.dps``."""
        return _evaluate(self, point, _mp_backend())

    def __call__(self, point: Sequence[float]) -> float:
        return self.eval(point)


def _coerce(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return const(x)
    raise TypeError(f"cannot combine Expr with {type(x).__name__}")


def _from_map(m: dict) -> Expr:
    terms = [Term(c, *k) for k, c in m.items() if c != 0]
    terms.sort(key=_term_order)
    return Expr(tuple(terms))


def _accumulate(m: dict, key, c: Fraction) -> None:
    v = m.get(key, ZERO) + c
    if v:
        m[key] = v
    else:
        m.pop(key, None)


# ---------------------------------------------------------------------------
# univariate partial-fraction basis
# ---------------------------------------------------------------------------

def _pf(shift: Fraction, e: int):
    return None if e == 0 else (shift, e)


def _factor_order(f):
    return (0,) if f is None else (1, f[0], f[1])


@lru_cache(maxsize=None)
def _expand(shift: Fraction, e: int) -> tuple:
    """(z + shift)^e as a combination of basis factors."""
    if e == 0:
        return ((ONE, None),)
    if shift == 0 or e < 0:
        return ((ONE, (shift, e)),)
    return tuple((Fraction(comb(e, j)) * shift ** (e - j), _pf(ZERO, j)) for j in range(e + 1))


def _lin(*parts) -> tuple:
    m: dict = {}
    for scale_, combo in parts:
        for c, f in combo:
            _accumulate(m, f, scale_ * c)
    return tuple(sorted(((c, f) for f, c in m.items()), key=lambda cf: _factor_order(cf[1])))


@lru_cache(maxsize=None)
def _combine(f, g) -> tuple:
    """Product of two basis factors of one variable, re-expressed in the basis."""
    if f is None:
        return ((ONE, g),)
    if g is None:
        return ((ONE, f),)
    (a, m), (b, n) = f, g
    if a == b:
        return _expand(a, m + n)
    if n > 0:
        f, g = g, f
        (a, m), (b, n) = f, g
    if m > 0:
        # here a == 0 and n < 0: use z = (z + b) - b
        lower = _pf(ZERO, m - 1)
        return _lin(
            (ONE, _combine(lower, _pf(b, n + 1))),
            (-b, _combine(lower, g)),
        )
    # both exponents negative: 1/((z+a)(z+b)) = (1/(z+a) - 1/(z+b)) / (b - a)
    inv = ONE / (b - a)
    return _lin(
        (inv, _combine(f, _pf(b, n + 1))),
        (-inv, _combine(_pf(a, m + 1), g)),
    )


# ---------------------------------------------------------------------------
# term keys
# ---------------------------------------------------------------------------

def _merge_gammas(g1, g2, pi_power: int):
    d: dict[Fraction, int] = {}
    for f, k in itertools.chain(g1, g2):
        d[f] = d.get(f, 0) + k
    k_half = d.pop(HALF, 0)
    q, r = divmod(k_half, 2)
    pi_power += q
    if r:
        d[HALF] = r
    return tuple(sorted((f, k) for f, k in d.items() if k)), pi_power


def _make_key(var_factors: dict, exp_arg, trig, pi_power, gammas):
    powers = tuple(
        (Affine(v, f[0]), f[1]) for v, f in sorted(var_factors.items()) if f is not None
    )
    return (powers, exp_arg, tuple(sorted(trig)), pi_power, gammas)


@lru_cache(maxsize=1 << 16)
def _mul_keys(k1, k2) -> tuple:
    p1, e1, t1, pi1, g1 = k1
    p2, e2, t2, pi2, g2 = k2
    f1 = {a.var: (a.shift, e) for a, e in p1}
    f2 = {a.var: (a.shift, e) for a, e in p2}
    vars_ = sorted(set(f1) | set(f2))
    per_var = [_combine(f1.get(v), f2.get(v)) for v in vars_]

    if e1 is None:
        exp_arg = e2
    elif e2 is None:
        exp_arg = e1
    else:
        exp_arg = add(e1, e2)
        if not exp_arg.terms:
            exp_arg = None
    gammas, pi_power = _merge_gammas(g1, g2, pi1 + pi2)
    trig = t1 + t2

    out: dict = {}
    for choice in itertools.product(*per_var):
        c = ONE
        factors = {}
        for v, (cv, fv) in zip(vars_, choice):
            c *= cv
            factors[v] = fv
        _accumulate(out, _make_key(factors, exp_arg, trig, pi_power, gammas), c)
    return tuple((c, k) for k, c in out.items())


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

ZERO_EXPR = Expr()


def const(q) -> Expr:
    q = Fraction(q)
    return Expr((Term(q),)) if q else ZERO_EXPR


def variable(i: int) -> Expr:
    return Expr((Term(ONE, ((Affine(i), 1),)),))


def affine_power(var: int, shift, n: int) -> Expr:
    """(z_var + shift)^n for any integer n."""
    shift = Fraction(shift)
    m: dict = {}
    for c, f in _expand(shift, n):
        _accumulate(m, _make_key({var: f}, None, (), 0, ()), c)
    return _from_map(m)


def pi_power(n: int = 1) -> Expr:
    return Expr((Term(ONE, pi_power=n),)) if n else const(1)


def exp_of(arg: Expr) -> Expr:
    if not arg.is_polynomial():
        raise DomainError(f"exp argument must be a polynomial, got {arg}")
    if not arg.terms:
        return const(1)
    return Expr((Term(ONE, exp_arg=arg),))


def trig(kind: str, var: int, scale_, offset=0, pi: bool = False) -> Expr:
    """``kind(pi^pi * (scale*z_var + offset))`` in canonical form."""
    if kind not in ("sin", "cos"):
        raise DomainError(f"unknown trig kind {kind!r}")
    scale_, offset = Fraction(scale_), Fraction(offset)
    if scale_ == 0:
        raise DomainError("trig factor needs a nonzero multiple of the variable")
    sign = ONE
    if scale_ < 0:
        scale_, offset = -scale_, -offset
        if kind == "sin":
            sign = -sign
    if pi:
        offset %= 2
        if offset >= 1:
            offset -= 1
            sign = -sign
    return Expr((Term(sign, trig=(Trig(kind, var, pi, scale_, offset),)),))


def sin_pi(var: int, scale_=1, offset=0) -> Expr:
    return trig("sin", var, scale_, offset, pi=True)


def cos_pi(var: int, scale_=1, offset=0) -> Expr:
    return trig("cos", var, scale_, offset, pi=True)


def gamma_const(r, power: int = 1) -> Expr:
    """The constant Gamma(r)^power, kept symbolic for non-integer r."""
    r = Fraction(r)
    if r.denominator == 1:
        if r <= 0:
            raise DomainError(f"Gamma has a pole at {r}")
        return const(Fraction(math.factorial(int(r) - 1)) ** power)
    n = math.floor(r)
    f = r - n
    # Gamma(r) = rat * Gamma(f)
    rat = ONE
    if n >= 0:
        for j in range(n):
            rat *= f + j
    else:
        for j in range(-n):
            rat /= r + j
    gammas, pp = _merge_gammas(((f, power),), (), 0)
    return Expr((Term(rat**power, gammas=gammas, pi_power=pp),))


# ---------------------------------------------------------------------------
# ring operations
# ---------------------------------------------------------------------------

def add(a: Expr, b: Expr) -> Expr:
    if not a.terms:
        return b
    if not b.terms:
        return a
    m = {t.key: t.coeff for t in a.terms}
    for t in b.terms:
        _accumulate(m, t.key, t.coeff)
    return _from_map(m)


def add_all(items: Iterable[Expr]) -> Expr:
    m: dict = {}
    for e in items:
        for t in e.terms:
            _accumulate(m, t.key, t.coeff)
    return _from_map(m)


def neg(a: Expr) -> Expr:
    return Expr(tuple(Term(-t.coeff, *t.key) for t in a.terms))


def scale(a: Expr, q) -> Expr:
    q = Fraction(q)
    if q == 0:
        return ZERO_EXPR
    return Expr(tuple(Term(q * t.coeff, *t.key) for t in a.terms))


def mul(a: Expr, b: Expr) -> Expr:
    if not a.terms or not b.terms:
        return ZERO_EXPR
    m: dict = {}
    for s in a.terms:
        for t in b.terms:
            c = s.coeff * t.coeff
            for cc, key in _mul_keys(s.key, t.key):
                _accumulate(m, key, c * cc)
    return _from_map(m)


def normalize(a: Expr) -> Expr:
    """Rebuild every term from its atomic factors."""
    out = []
    for t in a.terms:
        e = const(t.coeff)
        for aff, k in t.powers:
            e = mul(e, affine_power(aff.var, aff.shift, k))
        if t.exp_arg is not None:
            e = mul(e, exp_of(normalize(t.exp_arg)))
        for tr in t.trig:
            e = mul(e, trig(tr.kind, tr.var, tr.scale, tr.offset, tr.pi))
        e = mul(e, pi_power(t.pi_power))
        for f, k in t.gammas:
            e = mul(e, gamma_const(f, k))
        out.append(e)
    return add_all(out)


def diff(a: Expr, var: int) -> Expr:
    """Exact partial derivative with respect to z_var."""
    m: dict = {}
    extra: list[Expr] = []
    for t in a.terms:
        factors = {af.var: (af.shift, e) for af, e in t.powers}
        if var in factors:
            shift, e = factors[var]
            new = dict(factors)
            new[var] = _pf(shift, e - 1)
            _accumulate(m, _make_key(new, t.exp_arg, t.trig, t.pi_power, t.gammas), t.coeff * e)
        for i, tr in enumerate(t.trig):
            if tr.var != var:
                continue
            partner = Trig("cos" if tr.kind == "sin" else "sin", tr.var, tr.pi, tr.scale, tr.offset)
            rest = t.trig[:i] + (partner,) + t.trig[i + 1:]
            sign = 1 if tr.kind == "sin" else -1
            key = _make_key(factors, t.exp_arg, rest, t.pi_power + (1 if tr.pi else 0), t.gammas)
            _accumulate(m, key, sign * t.coeff * tr.scale)
        if t.exp_arg is not None:
            d_arg = diff(t.exp_arg, var)
            if d_arg.terms:
                extra.append(mul(Expr((t,)), d_arg))
    return add_all([_from_map(m), *extra])


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

class _Backend:
    def __init__(self, num, pi, exp, sin, cos, gamma):
        self.num, self.pi, self.exp, self.sin, self.cos, self.gamma = num, pi, exp, sin, cos, gamma


_FLOAT = _Backend(
    lambda q: q.numerator / q.denominator if isinstance(q, Fraction) else float(q),
    math.pi, math.exp, math.sin, math.cos, gamma_fn,
)


def _mp_backend() -> _Backend:
    import mpmath

    def num(q):
        if isinstance(q, Fraction):
            return mpmath.mpf(q.numerator) / q.denominator
        return mpmath.mpf(q)

    return _Backend(num, mpmath.pi, mpmath.exp, mpmath.sin, mpmath.cos, mpmath.gamma)


def _evaluate(a: Expr, point, bk: _Backend):
    need = a.max_var() + 1
    if len(point) < need:
        raise DomainError(f"point has {len(point)} coordinates, expression uses z{need}")
    xs = [bk.num(x) for x in point]
    total = bk.num(0)
    for t in a.terms:
        v = bk.num(t.coeff)
        if t.pi_power:
            v *= bk.pi ** t.pi_power
        for f, k in t.gammas:
            v *= bk.gamma(bk.num(f)) ** k
        for aff, e in t.powers:
            base = xs[aff.var] + bk.num(aff.shift)
            if e < 0 and base == 0:
                raise PoleAtPoint(f"(z{aff.var + 1} + {aff.shift})^{e} at {list(point)}")
            v *= base**e
        if t.exp_arg is not None:
            v *= bk.exp(_evaluate(t.exp_arg, point, bk))
        for tr in t.trig:
            arg = bk.num(tr.scale) * xs[tr.var] + bk.num(tr.offset)
            if tr.pi:
                arg *= bk.pi
            v *= bk.sin(arg) if tr.kind == "sin" else bk.cos(arg)
        total += v
    return total


# ---------------------------------------------------------------------------
# zero testing
# ---------------------------------------------------------------------------

class ZeroStatus(enum.Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    NUMERICALLY_ZERO = "numerically_zero"


class NumericalZeroWarning(UserWarning):
    """A nonzero normal form that vanishes at every sample point."""


_HALTON_BASES = (2, 3, 5)
ZERO_ATOL = 1e-9


def _radical_inverse(n: int, base: int) -> float:
    inv, f = 0.0, 1.0 / base
    while n:
        n, digit = divmod(n, base)
        inv += digit * f
        f /= base
    return inv


def sample_points(dimension: int, count: int = 8, avoid: Expr | None = None) -> list[tuple[float, ...]]:
    """Deterministic Halton points in [0.1, 0.9]^d, skipping poles of ``avoid``."""
    pts = []
    n = 1
    while len(pts) < count:
        p = tuple(0.1 + 0.8 * _radical_inverse(n, _HALTON_BASES[i]) for i in range(dimension))
        n += 1
        if avoid is not None:
            try:
                avoid.eval(p)
            except PoleAtPoint:
                continue
        pts.append(p)
    return pts


def is_zero(a: Expr, sampling: bool = True, dimension: int | None = None) -> ZeroStatus:
    if not a.terms:
        return ZeroStatus.ZERO
    if not sampling:
        return ZeroStatus.NONZERO
    d = max(dimension or 0, a.max_var() + 1, 1)
    if all(abs(a.eval(p)) < ZERO_ATOL for p in sample_points(d, 8, avoid=a)):
        warnings.warn(f"{a} is zero at all samples but not structurally", NumericalZeroWarning, stacklevel=2)
        return ZeroStatus.NUMERICALLY_ZERO
    return ZeroStatus.NONZERO


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_linear(scale_: Fraction, var: int, offset: Fraction) -> str:
    lead = VAR_NAMES[var] if scale_ == 1 else f"{_fmt_q(scale_)}*{VAR_NAMES[var]}"
    if offset == 0:
        return lead
    sign = "+" if offset > 0 else "-"
    return f"{lead} {sign} {_fmt_q(abs(offset))}"


def _fmt_factors(t: Term) -> list[str]:
    out = []
    if t.pi_power:
        out.append("pi" if t.pi_power == 1 else f"pi^{t.pi_power}")
    for f, k in t.gammas:
        out.append(f"gamma({_fmt_q(f)})" + ("" if k == 1 else f"^{k}"))
    for aff, e in t.powers:
        base = VAR_NAMES[aff.var] if aff.shift == 0 else f"({_fmt_linear(ONE, aff.var, aff.shift)})"
        out.append(base if e == 1 else f"{base}^{e}")
    if t.exp_arg is not None:
        out.append(f"exp({render(t.exp_arg)})")
    for tr in t.trig:
        inner = _fmt_linear(tr.scale, tr.var, tr.offset)
        if tr.pi:
            simple = tr.offset == 0 and tr.scale == 1
            inner = f"pi*{inner}" if simple else f"pi*({inner})"
        out.append(f"{tr.kind}({inner})")
    return out


def _render_term(t: Term) -> str:
    factors = _fmt_factors(t)
    c = t.coeff
    if not factors:
        return _fmt_q(c)
    body = "*".join(factors)
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    return f"{_fmt_q(c)}*{body}"


def render(a: Expr) -> str:
    if not a.terms:
        return "0"
    parts = []
    for i, t in enumerate(a.terms):
        s = _render_term(t)
        if i == 0:
            parts.append(s)
        elif s.startswith("-"):
            parts.append(" - " + s[1:])
        else:
            parts.append(" + " + s)
    return "".join(parts)
