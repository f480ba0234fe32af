"""Exception hierarchy shared across the package."""


class StruktError(Exception):
    """Base class for all library-specific errors."""


class GradeError(StruktError):
    """The declared grade is invalid for the requested operation."""


class StructureError(StruktError):
    """A required algebraic structure check failed."""


class ThresholdError(StruktError):
    """A perturbation exceeds an admissibility threshold.

    Carries the offending value and the violated bound so callers can report
    how far outside the guaranteed regime the input was.
    """

    def __init__(self, message, value=None, bound=None):
        super().__init__(message)
        self.value = value
        self.bound = bound


class ConvergenceError(StruktError):
    """An iterative solve failed to reach its tolerance."""


class NumericalError(StruktError):
    """A direct solve left an unexpectedly large residual."""


class SingularPolynomialError(StruktError):
    """An operation required a regular matrix polynomial."""


class SpectrumMismatchError(StruktError):
    """Two spectra cannot be matched structurally."""
