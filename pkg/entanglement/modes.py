import math
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd
from django.core.exceptions import ValidationError
from django.db import models
from django.utils.translation import gettext_lazy as _

from .exceptions import AxisMismatchError, NormalizationError
from .grids import GridAxis

NORM_TOLERANCE = 1e-9
TWO_PI = 2 * math.pi


class ModeLabel(models.TextChoices):
    MODE_1A = "1A", _("Particle 1 through slit A")
    MODE_1B = "1B", _("Particle 1 through slit B")
    MODE_2C = "2C", _("Particle 2 through slit C")
    MODE_2D = "2D", _("Particle 2 through slit D")
    FREE = "free", _("Free packet")


@dataclass(frozen=True, eq=False)
class ModeFunction:
    """
    A sampled one-particle branch wavefunction.

    Modes are immutable: the samples are copied on construction and marked read-only.
    Non-finite samples and modes of zero norm are rejected, so a slit that blocks a
    packet entirely fails where the blocked mode is built.

    :ivar axis: The grid the samples live on.
    :type axis: GridAxis
    :ivar samples: One complex amplitude per grid point.
    :type samples: Numpy.ndarray
    :ivar label: Which branch this mode represents.
    :type label: ModeLabel
    """

    axis: GridAxis
    samples: np.ndarray
    label: ModeLabel = ModeLabel.FREE

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex)
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

        self.clean()

    def clean(self) -> None:
        if self.samples.shape != (self.axis.n_points,):
            raise ValidationError(
                {"samples": _("Expected {} samples on the axis, got shape {}.").format(self.axis.n_points, self.samples.shape)}
            )

        if not np.all(np.isfinite(self.samples)):
            raise ValidationError({"samples": _("Mode {} has non-finite samples.").format(self.label)})

        norm_squared = self.norm_squared()

        if not math.isfinite(norm_squared):
            raise ValidationError({"samples": _("Mode {} has an infinite norm.").format(self.label)})

        if not norm_squared > 0:
            raise NormalizationError(_("Mode {} has zero norm.").format(self.label), code="zero_norm")

    @classmethod
    def gaussian(
        cls, axis: GridAxis, center: float = 0.0, sigma: float = 1.0, wavenumber: float = 0.0, label: ModeLabel = ModeLabel.FREE
    ) -> "ModeFunction":
        """
        A Gaussian envelope times a plane wave, unit-normalized on the grid.

        ``sigma`` is the standard deviation of ``|ψ|²``, so two such modes of equal width
        with centers ``d`` apart overlap as ``exp(-d²/(8σ²))``.
        """

        if not sigma > 0:
            raise ValidationError({"sigma": _("The Gaussian width must be positive, got {}.").format(sigma)})

        x = axis.points - center
        samples = (2 * math.pi * sigma**2) ** -0.25 * np.exp(-(x**2) / (4 * sigma**2) + 1j * wavenumber * x)

        return cls(axis, samples, label).normalized()

    @property
    def amplitude(self) -> np.ndarray:
        return np.abs(self.samples)

    @property
    def phase(self) -> np.ndarray:
        return np.angle(self.samples)

    def norm_squared(self) -> float:
        return float(self.axis.integrate(np.abs(self.samples) ** 2))

    def is_normalized(self, tolerance: float = NORM_TOLERANCE) -> bool:
        return abs(self.norm_squared() - 1.0) <= tolerance

    def require_normalized(self) -> None:
        norm_squared = self.norm_squared()

        if abs(norm_squared - 1.0) > NORM_TOLERANCE:
            raise NormalizationError(
                _("Mode {} must be unit-normalized, its squared norm is {!r}.").format(self.label, norm_squared), code="not_normalized"
            )

    def normalized(self) -> "ModeFunction":
        return self.with_samples(self.samples / math.sqrt(self.norm_squared()))

    def with_samples(self, samples: np.ndarray, label: ModeLabel | None = None) -> "ModeFunction":
        return replace(self, samples=samples, label=self.label if label is None else label)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"x": self.axis.points, "re": self.samples.real, "im": self.samples.imag})


@dataclass(frozen=True)
class PhaseShift:
    """
    The phase ``φ`` imprinted on the particles crossing slit C.

    :ivar phi: The phase in radians, any finite value.
    :type phi: Float
    """

    phi: float = 0.0

    def __post_init__(self):
        self.clean()

    def clean(self) -> None:
        if not math.isfinite(self.phi):
            raise ValidationError({"phi": _("The phase shift must be finite, got {}.").format(self.phi)})

    @property
    def canonical(self) -> float:
        """The representative of ``φ`` in ``[0, 2π)``."""

        value = self.phi % TWO_PI

        # Round-off just below a full turn belongs to zero.
        if math.isclose(value, TWO_PI, rel_tol=0.0, abs_tol=1e-12):
            return 0.0

        return value

    @property
    def factor(self) -> complex:
        return complex(np.exp(1j * self.phi))


@dataclass(frozen=True)
class OverlapScalar:
    """
    A scalar product of two unit-normalized modes, such as ``I = ∫ψ₂D ψ₂C* dx``.

    :ivar value: The complex overlap.
    :type value: Complex
    """

    value: complex

    def __post_init__(self):
        self.clean()

    def clean(self) -> None:
        if not abs(self.value) <= 1 + NORM_TOLERANCE:
            raise ValidationError({"value": _("An overlap of normalized modes cannot exceed one in modulus, got {}.").format(abs(self.value))})

    @property
    def modulus(self) -> float:
        return abs(self.value)

    @property
    def phase(self) -> float:
        return math.atan2(self.value.imag, self.value.real)

    def conjugate(self) -> "OverlapScalar":
        return OverlapScalar(self.value.conjugate())


def overlap(f: ModeFunction, g: ModeFunction) -> OverlapScalar:
    """
    Compute the scalar product ``∫ f(x) g*(x) dx`` of two normalized modes.

    ``overlap(ψ₂D, ψ₂C)`` is the quantity ``I`` that gates one-particle interference.

    :param f: The mode entering unconjugated.
    :type f: ModeFunction
    :param g: The mode entering conjugated.
    :type g: ModeFunction
    :return: The overlap.
    :rtype: OverlapScalar
    :raises AxisMismatchError: When the modes are sampled on different grids.
    :raises NormalizationError: When either mode is not unit-normalized.
    """

    if f.axis != g.axis:
        raise AxisMismatchError(_("Cannot overlap modes on different axes ({} and {}).").format(f.axis, g.axis), code="axis_mismatch")

    f.require_normalized()
    g.require_normalized()

    return OverlapScalar(complex(f.axis.integrate(f.samples * np.conj(g.samples))))


def apply_phase(mode: ModeFunction, shift: PhaseShift) -> ModeFunction:
    """Multiply every sample by ``exp(iφ)``; the norm is unchanged."""

    return mode.with_samples(mode.samples * shift.factor)
