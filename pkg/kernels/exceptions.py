from django.core.exceptions import ValidationError

from entanglement.exceptions import GridUnderresolutionError

__all__ = ["GridUnderresolutionError", "SlitGeometryError", "TimeOrderError"]


class TimeOrderError(ValidationError):
    """The kernel times are not strictly increasing, or a segment has no positive duration."""


class SlitGeometryError(ValidationError):
    """A slit window is malformed, or two slit windows overlap."""
