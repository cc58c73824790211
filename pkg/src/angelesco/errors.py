"""Exception hierarchy shared by all modules."""


class AngelescoError(Exception):
    """Base class for library errors."""


class ValidationError(AngelescoError, ValueError):
    """Parameters violate a documented invariant."""


class DomainError(AngelescoError, ValueError):
    """Argument lies outside the domain of an evaluator."""


class BranchError(DomainError):
    """Argument lies on a branch cut or too close to a sector boundary."""


class AccuracyError(AngelescoError, ArithmeticError):
    """A precision target could not be reached.

    ``achieved_digits`` holds the best estimate of the digits actually obtained.
    """

    def __init__(self, message, achieved_digits=None):
        super().__init__(message)
        self.achieved_digits = achieved_digits


class ConditioningError(AccuracyError):
    """A linear system lost too many digits to cancellation."""


class InvariantError(AngelescoError, AssertionError):
    """A mathematical invariant failed numerically (e.g. wrong zero count)."""


class TrackingError(AngelescoError, ArithmeticError):
    """Branch continuation could not separate the roots along a path."""
