# utils/errors.py


class CodeError(ValueError):
    """Base class for every error raised by the storage-code library."""


class ZeroInverse(CodeError, ZeroDivisionError):
    """Raised when the inverse of the zero element is requested."""


class Singular(CodeError):
    """Raised when a matrix that must be invertible (or of full column rank) is not."""


class Inconsistent(CodeError):
    """Raised when a right-hand side lies outside the column span of the system."""


class DimensionMismatch(CodeError):
    pass


class Inadmissible(CodeError):
    """Raised for parameters outside 1 <= k < n, k <= d <= n-1, m >= 1, q prime."""


class ConstructionFailed(CodeError):
    """
    Raised when no attempt produced a code passing verification.

    Args:
        message (str): Human-readable description
        last_condition (str): Name of the condition that failed on the last attempt
        attempts (int): Number of attempts made
    """

    def __init__(self, message, last_condition=None, attempts=0):
        super().__init__(message)
        self.last_condition = last_condition
        self.attempts = attempts


class LengthMismatch(CodeError):
    pass


class ParseError(CodeError):
    pass


class VersionMismatch(ParseError):
    pass


class RankDeficient(CodeError):
    """Raised when the desired-signal system of a repair is not of full rank."""


class WrongHelperShape(CodeError):
    """Raised when a helper set does not have the shape a repair procedure requires."""


class SingularBasis(CodeError):
    pass


class UnknownNode(CodeError):
    pass


class FieldTooSmall(CodeError):
    pass


class AlreadyFailed(CodeError):
    pass


class DoubleFailure(CodeError):
    pass


class NoFailure(CodeError):
    pass


class BadSubset(CodeError):
    pass
