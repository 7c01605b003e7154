import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _
from scipy.integrate import trapezoid

from .exceptions import GridUnderresolutionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridAxis:
    """
    A uniform one-dimensional grid used to sample detector and slit-plane coordinates.

    All quadratures in the laboratory use the trapezoidal rule on this grid, so two
    sampled functions can only be combined when they share the same axis.

    :ivar x_min: The first grid point.
    :type x_min: Float
    :ivar x_max: The last grid point.
    :type x_max: Float
    :ivar n_points: The number of grid points, endpoints included.
    :type n_points: Int
    """

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        self.clean()

    def clean(self) -> None:
        errors = {}

        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)) or self.x_max <= self.x_min:
            errors["x_max"] = _("x_max must be finite and greater than x_min ({}), got {}.").format(self.x_min, self.x_max)

        if not isinstance(self.n_points, (int, np.integer)) or self.n_points < 2:
            errors["n_points"] = _("At least two grid points are required, got {}.").format(self.n_points)

        if errors:
            raise ValidationError(errors)

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @cached_property
    def points(self) -> np.ndarray:
        points = np.linspace(self.x_min, self.x_max, self.n_points)
        points.flags.writeable = False

        return points

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights; ``weights @ f`` integrates ``f`` over the axis."""

        weights = np.full(self.n_points, self.spacing)
        weights[[0, -1]] = self.spacing / 2
        weights.flags.writeable = False

        return weights

    def integrate(self, values: np.ndarray, axis: int = -1) -> np.ndarray | float | complex:
        """
        Integrate sampled values over this grid with the trapezoidal rule.

        :param values: Samples on the grid, the integration dimension being ``axis``.
        :type values: Numpy.ndarray
        :param axis: The array dimension that runs along the grid.
        :type axis: Int
        :return: The integral (a scalar for one-dimensional input).
        :rtype: Numpy.ndarray | float | complex
        """

        return trapezoid(values, dx=self.spacing, axis=axis)

    def refined(self) -> "GridAxis":
        """Same bounds with the spacing halved; every other point of the result is a point of this axis."""

        return GridAxis(self.x_min, self.x_max, 2 * self.n_points - 1)

    def window_mask(self, lower: float, upper: float) -> np.ndarray:
        """
        Boolean mask of the grid points inside ``[lower, upper]``.

        :raises ValidationError: When the window is empty, reversed or reaches outside the axis.
        """

        slack = 1e-12 * max(1.0, abs(self.x_min), abs(self.x_max))

        if not upper > lower:
            raise ValidationError({"window": _("The window upper bound must exceed its lower bound ({}, {}).").format(lower, upper)})

        if lower < self.x_min - slack or upper > self.x_max + slack:
            raise ValidationError({"window": _("The window ({}, {}) lies outside the axis [{}, {}].").format(lower, upper, self.x_min, self.x_max)})

        mask = (self.points >= lower) & (self.points <= upper)
        if np.count_nonzero(mask) < 2:
            raise ValidationError({"window": _("The window ({}, {}) holds fewer than two grid points.").format(lower, upper)})

        return mask


def check_convergence(evaluate: Callable[[GridAxis], float | np.ndarray], axis: GridAxis, tolerance: float | None = None) -> float:
    """
    Check that a grid functional is converged by halving the grid spacing.

    The functional is evaluated on ``axis`` and on ``axis.refined()``. Array results are
    compared on the points the two grids share, scalar results directly; the largest
    absolute change must stay below ``tolerance``.

    :param evaluate: Callable building the quantity of interest from a grid.
    :type evaluate: Callable[[GridAxis], float | np.ndarray]
    :param axis: The grid under test.
    :type axis: GridAxis
    :param tolerance: Accepted sup-norm change, defaults to ``LAB_CONVERGENCE_TOLERANCE``.
    :type tolerance: Float | None
    :return: The observed change.
    :rtype: Float
    :raises GridUnderresolutionError: When the change reaches the tolerance.
    """

    if tolerance is None:
        tolerance = getattr(settings, "LAB_CONVERGENCE_TOLERANCE", 1e-6)

    coarse = np.asarray(evaluate(axis))
    fine = np.asarray(evaluate(axis.refined()))

    if coarse.ndim:
        fine = fine[..., ::2]

    change = float(np.max(np.abs(fine - coarse)))
    logger.debug("Convergence check on %d points: change %.3e (tolerance %.1e)", axis.n_points, change, tolerance)

    if not change < tolerance:
        raise GridUnderresolutionError(
            _("Halving the grid spacing changed the result by {:.3e} (tolerance {:.1e}); use a spacing of at most {:.3e}.").format(
                change, tolerance, axis.spacing / 2
            ),
            code="unconverged",
        )

    return change
