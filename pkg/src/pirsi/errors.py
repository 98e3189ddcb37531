"""Exception hierarchy shared by every pirsi module."""


class PirSiError(Exception):
    """Base class for all errors raised by pirsi."""


class InversionOfZero(PirSiError, ZeroDivisionError):
    pass


class FieldMismatch(PirSiError, ValueError):
    pass


class DimensionMismatch(PirSiError, ValueError):
    pass


class DuplicateEvaluationPoints(PirSiError, ValueError):
    pass


class SingularSystem(PirSiError, ArithmeticError):
    pass


class FieldTooSmall(PirSiError, ValueError):
    pass


class InvalidInstance(PirSiError, ValueError):
    pass


class UseGrsInstead(InvalidInstance):
    """Raised for D > M, where only the GRS Code protocol applies."""


class EnumerationBoundExceeded(PirSiError, ValueError):
    pass


class UnreachableQuery(PirSiError, KeyError):
    pass


class InvalidCounts(PirSiError, ValueError):
    pass


class NotCompliant(PirSiError, ValueError):
    pass


class DivisibilityNotSatisfied(PirSiError, ValueError):
    pass


class ParseError(PirSiError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class WireError(PirSiError, ValueError):
    pass


class FetchError(PirSiError, OSError):
    pass


class ServerRejected(FetchError):
    """The server answered with an ``error`` wire message."""

    def __init__(self, reason):
        self.reason = reason
        super().__init__(f"server rejected query: {reason}")
