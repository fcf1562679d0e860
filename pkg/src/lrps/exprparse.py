"""Parser for the expression strings used in problem files.

Grammar (whitespace is ignored)::

    expr    := ["+" | "-"] term (("+" | "-") term)*
    term    := unary ("*" unary)*
    unary   := "-" unary | power
    power   := atom ["^" ["-"] INT | "^" "(" "-" INT ")"]
    atom    := NUMBER ["/" NUMBER]          # rational literal, e.g. 3/2 or 0.25
             | "pi" | "z1" | "z2" | "z3"
             | ("exp" | "sin" | "cos") "(" expr ")"
             | "gamma" "(" NUMBER ["/" NUMBER] ")"
             | "(" expr ")"

``/`` is accepted only between two numeric literals. A negative power is
accepted only on an affine base ``c*zi + d`` or on a constant monomial such
as ``gamma(1/3)`` or ``pi``; this is how reciprocals like ``4*z1^-1`` and
``2*(z3 - 1)^-1`` are written. ``exp`` takes a polynomial argument;
``sin``/``cos`` take ``c*zi + d`` or ``pi*(c*zi + d)``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from . import spatial_expr as sx
from .errors import ParseError
from .spatial_expr import Expr, Term

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)

_VARS = {"z1": 0, "z2": 1, "z3": 2}


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    out.append(("end", ""))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, value: str | None = None, kind: str | None = None):
        tk = self.peek()
        if value is not None and tk[1] != value:
            raise ParseError(f"expected {value!r}, got {tk[1]!r} in {self.text!r}")
        if kind is not None and tk[0] != kind:
            raise ParseError(f"expected {kind}, got {tk[1]!r} in {self.text!r}")
        self.i += 1
        return tk

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            raise ParseError(f"trailing input {self.peek()[1]!r} in {self.text!r}")
        return e

    def expr(self) -> Expr:
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        acc = self.term()
        if sign < 0:
            acc = sx.neg(acc)
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            acc = sx.add(acc, rhs if op == "+" else sx.neg(rhs))
        return acc

    def term(self) -> Expr:
        acc = self.unary()
        while self.peek() == ("op", "*"):
            self.take()
            acc = sx.mul(acc, self.unary())
        return acc

    def unary(self) -> Expr:
        if self.peek() == ("op", "-"):
            self.take()
            return sx.neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek() != ("op", "^"):
            return base
        self.take()
        paren = False
        if self.peek() == ("op", "("):
            self.take()
            paren = True
        negative = False
        if self.peek() == ("op", "-"):
            self.take()
            negative = True
        tok = self.take(kind="num")[1]
        if not tok.isdigit():
            raise ParseError(f"exponent must be an integer, got {tok!r}")
        if paren:
            self.take(")")
        n = -int(tok) if negative else int(tok)
        return _raise(base, n)

    def number(self) -> Fraction:
        q = Fraction(self.take(kind="num")[1])
        if self.peek() == ("op", "/"):
            self.take()
            if self.peek()[0] != "num":
                raise ParseError("division is only allowed between numeric literals")
            den = Fraction(self.take()[1])
            if den == 0:
                raise ParseError("zero denominator")
            q /= den
        return q

    def atom(self) -> Expr:
        kind, val = self.peek()
        if kind == "num":
            return sx.const(self.number())
        if kind == "name":
            self.take()
            if val == "pi":
                return sx.pi_power(1)
            if val in _VARS:
                return sx.variable(_VARS[val])
            if val == "gamma":
                self.take("(")
                q = self.number()
                self.take(")")
                return sx.gamma_const(q)
            if val in ("exp", "sin", "cos"):
                self.take("(")
                arg = self.expr()
                self.take(")")
                if val == "exp":
                    if not arg.is_polynomial():
                        raise ParseError(f"exp argument must be a polynomial, got {arg}")
                    return sx.exp_of(arg)
                return _trig(val, arg)
            raise ParseError(f"unknown name {val!r}")
        if (kind, val) == ("op", "("):
            self.take()
            e = self.expr()
            self.take(")")
            return e
        raise ParseError(f"unexpected token {val!r} in {self.text!r}")


def _as_affine(e: Expr):
    """Return (var, c, d, pi_flag) when e == pi^p * (c*z_var + d), else None."""
    var, c, d, pp = None, Fraction(0), Fraction(0), None
    for t in e.terms:
        if t.exp_arg is not None or t.trig or t.gammas:
            return None
        if pp is None:
            pp = t.pi_power
        elif pp != t.pi_power:
            return None
        if not t.powers:
            d += t.coeff
            continue
        if len(t.powers) != 1:
            return None
        aff, k = t.powers[0]
        if k != 1 or aff.shift != 0 or (var is not None and var != aff.var):
            return None
        var, c = aff.var, t.coeff
    if var is None or pp not in (0, 1):
        return None
    return var, c, d, bool(pp)


def _raise(base: Expr, n: int) -> Expr:
    if n >= 0:
        return base**n
    if len(base.terms) == 1 and base.terms[0].is_constant():
        t = base.terms[0]
        out = sx.const(t.coeff**n)
        out = sx.mul(out, sx.pi_power(t.pi_power * n))
        for f, k in t.gammas:
            out = sx.mul(out, sx.gamma_const(f, k * n))
        return out
    aff = _as_affine(base)
    if aff is None or aff[3]:
        raise ParseError(f"negative power needs an affine base c*zi + d, got {base}")
    var, c, d, _ = aff
    return sx.scale(sx.affine_power(var, d / c, n), c**n)


def _trig(kind: str, arg: Expr) -> Expr:
    aff = _as_affine(arg)
    if aff is None:
        raise ParseError(f"{kind} argument must be c*zi + d or pi*(c*zi + d), got {arg}")
    var, c, d, pi = aff
    return sx.trig(kind, var, c, d, pi)


def parse_expr(text: str) -> Expr:
    """Parse an expression string into a normalized :class:`Expr`."""
    if not isinstance(text, str):
        raise ParseError(f"expression must be a string, got {type(text).__name__}")
    return _Parser(text).parse()


__all__ = ["parse_expr", "Term"]
