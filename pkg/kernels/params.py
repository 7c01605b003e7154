import math
from dataclasses import dataclass

import numpy as np
from django.core.exceptions import ValidationError
from django.db import models
from django.utils.translation import gettext_lazy as _

from entanglement.grids import GridAxis
from entanglement.modes import ModeFunction, ModeLabel

from .exceptions import SlitGeometryError, TimeOrderError


class Segment(models.TextChoices):
    INITIAL_TO_SCREEN = "ic", _("Source to slit screen")
    SCREEN_TO_FINAL = "cf", _("Slit screen to detector")
    INITIAL_TO_FINAL = "if", _("Source to detector")


class SlitProfile(models.TextChoices):
    HARD = "hard", _("Hard-edged aperture")
    GAUSSIAN = "gaussian", _("Gaussian aperture")


@dataclass(frozen=True)
class KernelParams:
    """
    Mass, ħ and the three times of a source → screen → detector propagation.

    :ivar mass: Particle mass, in natural units by default.
    :type mass: Float
    :ivar hbar: Reduced Planck constant in the same units.
    :type hbar: Float
    :ivar t_i: Emission time.
    :type t_i: Float
    :ivar t_c: Time at which the packet crosses the slit screen.
    :type t_c: Float
    :ivar t_f: Detection time.
    :type t_f: Float
    """

    mass: float = 1.0
    hbar: float = 1.0
    t_i: float = 0.0
    t_c: float = 1.0
    t_f: float = 2.0

    def __post_init__(self):
        self.clean()

    def clean(self) -> None:
        errors = {}

        for name in ["mass", "hbar"]:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                errors[name] = _("{} must be positive and finite, got {}.").format(name, value)

        if errors:
            raise ValidationError(errors)

        if not all(math.isfinite(t) for t in [self.t_i, self.t_c, self.t_f]):
            raise TimeOrderError({"t_c": _("Kernel times must be finite.")}, code="time_order")

        if not self.t_i < self.t_c:
            raise TimeOrderError({"t_c": _("t_c ({}) must come after t_i ({}).").format(self.t_c, self.t_i)}, code="time_order")

        if not self.t_c < self.t_f:
            raise TimeOrderError({"t_f": _("t_f ({}) must come after t_c ({}).").format(self.t_f, self.t_c)}, code="time_order")

    def duration(self, segment: Segment) -> float:
        start, end = {
            Segment.INITIAL_TO_SCREEN: (self.t_i, self.t_c),
            Segment.SCREEN_TO_FINAL: (self.t_c, self.t_f),
            Segment.INITIAL_TO_FINAL: (self.t_i, self.t_f),
        }[Segment(segment)]

        return end - start


@dataclass(frozen=True)
class SlitGeometry:
    """
    One aperture in the slit screen.

    A hard slit transmits the indicator of ``[center − b, center + b]``; a Gaussian slit
    multiplies the amplitude by ``exp(−(x − center)²/(2b²))``.
    """

    b: float
    profile: SlitProfile = SlitProfile.HARD
    center: float = 0.0

    def __post_init__(self):
        self.clean()

    def clean(self) -> None:
        if not (math.isfinite(self.b) and self.b > 0):
            raise SlitGeometryError({"b": _("The slit half-width must be positive and finite, got {}.").format(self.b)}, code="half_width")

        if not math.isfinite(self.center):
            raise SlitGeometryError({"center": _("The slit center must be finite, got {}.").format(self.center)}, code="center")

        if self.profile not in SlitProfile.values:
            raise SlitGeometryError({"profile": _("Unknown slit profile {!r}.").format(self.profile)}, code="profile")

    @property
    def interval(self) -> tuple[float, float]:
        """The nominal aperture ``[center − b, center + b]``."""

        return self.center - self.b, self.center + self.b

    def overlaps(self, other: "SlitGeometry") -> bool:
        lower, upper = self.interval
        other_lower, other_upper = other.interval

        return lower < other_upper and other_lower < upper

    def window(self, axis: GridAxis) -> np.ndarray:
        x = axis.points - self.center

        if self.profile == SlitProfile.HARD:
            return (np.abs(x) <= self.b).astype(float)

        return np.exp(-(x**2) / (2 * self.b**2))


@dataclass(frozen=True)
class GaussianPacket:
    """
    A unit-norm Gaussian test packet prepared at ``t_i``.

    ``sigma`` is the standard deviation of ``|ψ|²``, the convention of
    :meth:`entanglement.modes.ModeFunction.gaussian`.
    """

    center: float = 0.0
    sigma: float = 1.0
    wavenumber: float = 0.0

    def __post_init__(self):
        self.clean()

    def clean(self) -> None:
        errors = {}

        if not (math.isfinite(self.sigma) and self.sigma > 0):
            errors["sigma"] = _("The packet width must be positive and finite, got {}.").format(self.sigma)

        for name in ["center", "wavenumber"]:
            if not math.isfinite(getattr(self, name)):
                errors[name] = _("{} must be finite.").format(name)

        if errors:
            raise ValidationError(errors)

    def velocity(self, params: KernelParams) -> float:
        return params.hbar * self.wavenumber / params.mass

    def sigma_at(self, params: KernelParams, duration: float) -> float:
        """Width of ``|ψ|²`` after free evolution: ``σ(t)² = σ² + (ħt/(2mσ))²``."""

        return math.hypot(self.sigma, params.hbar * duration / (2 * params.mass * self.sigma))

    def center_at(self, params: KernelParams, duration: float) -> float:
        return self.center + self.velocity(params) * duration

    def evolved(self, axis: GridAxis, params: KernelParams, duration: float = 0.0, label: ModeLabel = ModeLabel.FREE) -> ModeFunction:
        """
        The closed-form freely evolved packet sampled on ``axis``.

        ``ψ(x, t) = (2πσ²)^(−1/4)·(σ²/s)^(1/2)·exp(−(x − x₀ − vt)²/(4s) + ik₀(x − x₀ − vt/2))``
        with ``s = σ² + iħt/(2m)``. The samples are not renormalized on the grid.
        """

        s = self.sigma**2 + 1j * params.hbar * duration / (2 * params.mass)
        shift = self.velocity(params) * duration
        x = axis.points - self.center

        samples = (
            (2 * math.pi * self.sigma**2) ** -0.25
            * np.sqrt(self.sigma**2 / s)
            * np.exp(-((x - shift) ** 2) / (4 * s) + 1j * self.wavenumber * (x - shift / 2))
        )

        return ModeFunction(axis, samples, label)

    def sample(self, axis: GridAxis, label: ModeLabel = ModeLabel.FREE) -> ModeFunction:
        return self.evolved(axis, KernelParams(), 0.0, label)
