from django.core.exceptions import ValidationError


class AxisMismatchError(ValidationError):
    """Two sampled functions that must share a grid were sampled on different grids."""


class NormalizationError(ValidationError):
    """A mode expected to be unit-normalized is not."""


class DegenerateStateError(ValidationError):
    """The two-particle state has (numerically) zero norm."""


class UndefinedVisibilityError(ValidationError):
    """The fringe contrast cannot be computed because max + min vanishes."""


class UnrecoverablePhaseError(ValidationError):
    """The interference term is too weak to recover a phase offset from."""


class GridUnderresolutionError(ValidationError):
    """A grid functional did not converge, or a grid cannot resolve the sampled signal."""
