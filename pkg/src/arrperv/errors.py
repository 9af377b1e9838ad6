"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class ArrpervError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(ArrpervError, ValueError):
    pass


class Singular(ArrpervError, ArithmeticError):
    pass


class NotCodim2(ArrpervError, ValueError):
    pass


class NotAFlat(ArrpervError, ValueError):
    pass


class NotInA(ArrpervError, ValueError):
    """A double representation fails monotonicity, transitivity or invertibility."""

    def __init__(self, report):
        super().__init__("double representation is not an object of A:\n" + report.summary())
        self.report = report


class InvalidModule(ArrpervError, ValueError):
    pass


class ValidationFailed(ArrpervError, ValueError):
    def __init__(self, report):
        super().__init__("module failed validation:\n" + report.summary())
        self.report = report


class NotSupportedOnClosed(ArrpervError, ValueError):
    pass


class NotFiniteType(ArrpervError, ValueError):
    pass


class NotCrystallographic(ArrpervError, ValueError):
    pass


class IllDefinedAction(ArrpervError, ValueError):
    pass


class ParseError(ArrpervError, ValueError):
    pass
