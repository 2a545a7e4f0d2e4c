"""Exception types shared across the laboratory."""


class KatolabError(Exception):
    """Base class for all errors raised by this package."""


class ResolutionError(KatolabError):
    """A frequency grid is too coarse to resolve an oscillatory integrand.

    ``oversample_factor`` is the minimal factor by which the grid spacing
    must shrink for the phase-resolution criterion to hold.
    """

    def __init__(self, message, oversample_factor=None):
        super().__init__(message)
        self.oversample_factor = oversample_factor


class DomainError(KatolabError):
    """An argument lies outside the mathematically valid domain."""


class GridError(KatolabError):
    """A frequency grid cannot hold the requested data."""


class NestingError(KatolabError):
    """Window intervals are not properly nested."""


class ClassificationError(KatolabError):
    """A polynomial symbol satisfies neither admissibility condition."""

    def __init__(self, message, mirror_fixes=False):
        super().__init__(message)
        self.mirror_fixes = mirror_fixes


class ValidationError(KatolabError):
    """A dispersive symbol violates its growth or monotonicity conditions."""


class ConvergenceError(KatolabError):
    """An iterative solver exhausted its iteration budget."""


class OrientationError(KatolabError):
    """A flow was requested outside its admissible time domain."""


class PhaseMonotonicityError(KatolabError):
    """The flow phase is not invertible where the computation requires it."""


class DivisionError(KatolabError):
    """A Jacobian weight degenerates (symbol derivative vanishes on support)."""
