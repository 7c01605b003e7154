import math
from dataclasses import dataclass

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _
from scipy import constants


@dataclass(frozen=True)
class NaturalUnits:
    """
    Conversion between SI quantities and the natural units (ħ = m = 1) of the kernel engine.

    A length scale ``ℓ`` and the particle mass ``m`` fix the time scale ``m·ℓ²/ħ`` and
    the wavenumber scale ``1/ℓ``.

    :ivar length_scale: Metres per natural length unit.
    :type length_scale: Float
    :ivar mass: Particle mass in kilograms.
    :type mass: Float
    """

    length_scale: float
    mass: float = constants.m_e

    def __post_init__(self):
        errors = {}

        for name in ["length_scale", "mass"]:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                errors[name] = _("{} must be positive and finite, got {}.").format(name, value)

        if errors:
            raise ValidationError(errors)

    @property
    def time_scale(self) -> float:
        """Seconds per natural time unit."""

        return self.mass * self.length_scale**2 / constants.hbar

    def length(self, meters: float) -> float:
        return meters / self.length_scale

    def time(self, seconds: float) -> float:
        return seconds / self.time_scale

    def wavenumber(self, per_meter: float) -> float:
        return per_meter * self.length_scale

    def to_meters(self, length: float) -> float:
        return length * self.length_scale

    def to_seconds(self, time: float) -> float:
        return time * self.time_scale
