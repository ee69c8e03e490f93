"""Exception and warning types raised across the package."""

from __future__ import annotations


class InckrrError(Exception):
    """Base class for all package errors."""

    #: round index attached by the stream harness when an error escapes a round
    round_index: int | None = None


class SingularPivot(InckrrError, ArithmeticError):
    """A pivot or denominator of an update fell below the pivot tolerance."""


class DimensionMismatch(InckrrError, ValueError):
    pass


class UnsupportedKernel(InckrrError, ValueError):
    """Raised when an explicit feature map is requested for a non-polynomial kernel."""


class IndexOutOfRange(InckrrError, IndexError):
    pass


class EmptyModel(InckrrError, ValueError):
    """An edit would leave a model with fewer samples than it needs."""


class UnknownSample(InckrrError, KeyError):
    pass


class ParseError(InckrrError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DimensionConflict(ParseError):
    """A sparse index exceeds the dimension forced on the command line."""


class PlanExhausted(InckrrError, RuntimeError):
    """The pool of held-back samples ran out before the plan finished."""


class BatchTooLarge(UserWarning):
    """Advisory: the batch is large enough that a direct refit is cheaper."""
