"""Exception hierarchy shared by the solver layers and the CLI."""

from __future__ import annotations


class LrpsError(Exception):
    """Base class for every error raised by this package."""


class DomainError(LrpsError, ValueError):
    pass


class NoConvergence(LrpsError, ArithmeticError):
    pass


class PoleAtPoint(LrpsError, ZeroDivisionError):
    pass


class UnknownKind(LrpsError, KeyError):
    pass


class UnsupportedExponent(LrpsError, ValueError):
    pass


class ParseError(LrpsError, ValueError):
    pass


class SchemaError(LrpsError, ValueError):
    pass


class DimensionError(SchemaError):
    pass


class GammaRangeError(SchemaError):
    pass


class UnknownExample(LrpsError, KeyError):
    pass


class DivergentLimit(LrpsError):
    """An entry with slower decay than s^-(k*gamma+1) survived the limit."""

    def __init__(self, k, exponent, coefficient):
        self.k = k
        self.exponent = exponent
        self.coefficient = coefficient
        super().__init__(
            f"limit s^(k*gamma+1) * LR_k diverges at k={k}: "
            f"entry s^-({exponent}) with coefficient {coefficient}"
        )


class Inapplicable(LrpsError):
    """The recursion cannot determine p_k for this gamma."""

    def __init__(self, k, gamma, exponent, coefficient):
        self.k = k
        self.gamma = gamma
        self.exponent = exponent
        self.coefficient = coefficient
        super().__init__(
            f"cannot determine p_{k} at gamma={gamma}: term {coefficient} / s^({exponent}) "
            f"decays slower than s^-({k}*gamma+1)"
        )


class CancellationError(LrpsError):
    """A lower-order LRF entry that should cancel structurally did not."""


class ExactUnavailable(LrpsError, ValueError):
    pass


class DivisionByZeroExact(LrpsError, ZeroDivisionError):
    pass


class IoError(LrpsError, OSError):
    pass
