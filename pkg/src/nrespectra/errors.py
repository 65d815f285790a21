"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class NreError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(NreError, ValueError):
    pass


class UnsupportedHorizonError(InvalidParameterError):
    """The step ``h`` does not divide the maximal delay ``tau``."""


class ExprSyntaxError(NreError, ValueError):
    """Raised by the expression parser.

    Attributes
    ----------
    offset : int
        Byte offset of the offending token in the source text.
    expected : frozenset of str
        Token kinds that would have been accepted at ``offset``.
    """

    def __init__(self, message: str, offset: int, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        exp = ", ".join(sorted(self.expected))
        full = f"{message} at offset {offset}"
        if exp:
            full += f" (expected one of: {exp})"
        super().__init__(full)


class ExprEvalError(NreError, ArithmeticError):
    """Domain error while evaluating a coefficient (log of non-positive, division by zero)."""

    def __init__(self, message: str, t: float):
        self.t = t
        super().__init__(f"{message} at t={t!r}")


class UnknownBuiltinError(InvalidParameterError):
    pass


class AssemblyError(NreError):
    """The discrete fixed-point system could not be solved reliably."""

    def __init__(self, message: str, condition: float | None = None):
        self.condition = condition
        super().__init__(message)


class EigenSolverError(NreError):
    pass


class UnderdeterminedError(NreError, ValueError):
    pass


class UnsupportedComparisonError(InvalidParameterError):
    pass
