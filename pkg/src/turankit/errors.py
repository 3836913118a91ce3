"""Exception hierarchy shared across the package."""


class TurankitError(Exception):
    """Base class for all library errors."""


class InvalidFamilyError(TurankitError):
    """Family parameters violate the family's constraints."""


class PrecisionError(TurankitError):
    """Requested working precision is below the supported floor."""


class SequenceRangeError(TurankitError, IndexError):
    """A coefficient sequence was queried outside its defined range."""


class IrrationalParameterError(TurankitError):
    """An exact (rational) code path received a non-rational parameter."""


class NearZeroError(TurankitError):
    """Division by a value indistinguishable from zero at working precision."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class DegenerateCoefficientError(TurankitError):
    """Leading coefficient of a quadratic (or recurrence scale) vanished."""


class HypothesisViolationError(TurankitError):
    """Sequence hypotheses (monotonicity / range) required by a rule fail."""


class ZeroPolynomialError(TurankitError):
    """Operation undefined for the identically-zero polynomial."""


class InconclusiveError(TurankitError):
    """A numeric predicate contradicted itself after precision escalation."""
