"""Exception types raised across the package.

Most of them also inherit from a builtin (``ValueError``,
``ZeroDivisionError``, ``OverflowError``) so callers that only know the
standard hierarchy still catch them.
"""


class ReldecodeError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(ReldecodeError, ValueError):
    pass


class OutOfRange(ReldecodeError, ValueError):
    """A constraint target lies outside the attainable interval."""


class DegenerateConstraint(ReldecodeError, ValueError):
    """The constraint cannot pin down a unique multiplier."""


class OutOfDomain(ReldecodeError, ValueError):
    """A speed (or derived argument) lies outside its admissible domain."""


class DivisionByZero(ReldecodeError, ZeroDivisionError):
    """Zero inverse temperature, i.e. an infinite information temperature."""


class NumericOverflow(ReldecodeError, OverflowError):
    pass


class SupportMismatch(ReldecodeError, ValueError):
    """``q`` vanishes somewhere ``p`` does not."""


class NoCriticalVelocity(ReldecodeError):
    """The receiver free energy never crosses zero from above."""


class UnreachableThreshold(ReldecodeError):
    """The divergence needed at the threshold exceeds its supremum."""


class NoCrossing(ReldecodeError):
    pass


class InconsistentObservations(ReldecodeError):
    pass


class BracketFailure(ReldecodeError):
    pass
