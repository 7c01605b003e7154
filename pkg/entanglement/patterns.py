import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _
from scipy.linalg import lstsq

from .exceptions import AxisMismatchError, UndefinedVisibilityError, UnrecoverablePhaseError
from .grids import GridAxis
from .modes import PhaseShift
from .states import EntangledBranchPair, state_norm

logger = logging.getLogger(__name__)

NEGATIVE_DENSITY_TOLERANCE = 1e-12
PATTERN_NORM_TOLERANCE = 1e-6
MINIMUM_FRINGE_VISIBILITY = 1e-3


@dataclass(frozen=True, eq=False)
class DetectionPattern:
    """
    The one-particle detection density ``ρ₁(x)`` of particle 1.

    Patterns built by :func:`detection_pattern` also carry their decomposition into the
    phase-independent ``background`` and the complex ``coherence`` ``Γ(x)`` whose real part
    is the interference term; all three share the pattern's normalization.

    :ivar axis: The detector axis.
    :type axis: GridAxis
    :ivar density: The detection density per grid point.
    :type density: Numpy.ndarray
    :ivar normalized: Whether the density integrates to one.
    :type normalized: Bool
    :ivar background: ``|c1|²R₁A² + |c2|²R₁B²``, when known.
    :type background: Numpy.ndarray | None
    :ivar coherence: ``Γ(x)`` with ``density = background + Re Γ``, when known.
    :type coherence: Numpy.ndarray | None
    """

    axis: GridAxis
    density: np.ndarray
    normalized: bool = False
    background: np.ndarray | None = None
    coherence: np.ndarray | None = None

    def __post_init__(self):
        for name, dtype in [("density", float), ("background", float), ("coherence", complex)]:
            value = getattr(self, name)
            if value is not None:
                value = np.array(value, dtype=dtype)
                value.flags.writeable = False
                object.__setattr__(self, name, value)

        self.clean()

    def clean(self) -> None:
        if self.density.shape != (self.axis.n_points,):
            raise ValidationError({"density": _("Expected {} density values, got shape {}.").format(self.axis.n_points, self.density.shape)})

        if not np.all(np.isfinite(self.density)):
            raise ValidationError({"density": _("The detection density has non-finite values.")})

        if np.min(self.density) < -NEGATIVE_DENSITY_TOLERANCE:
            raise ValidationError({"density": _("The detection density is negative ({!r}).").format(float(np.min(self.density)))})

        if self.normalized:
            total = self.total()
            if abs(total - 1.0) > PATTERN_NORM_TOLERANCE:
                raise ValidationError({"normalized": _("A normalized pattern must integrate to one, got {!r}.").format(total)})

    @property
    def interference(self) -> np.ndarray:
        if self.coherence is None:
            raise UnrecoverablePhaseError(_("The pattern carries no fringe decomposition."), code="no_decomposition")

        return self.coherence.real

    def total(self) -> float:
        return float(self.axis.integrate(self.density))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"x": self.axis.points, "density": self.density})


def detection_pattern(pair: EntangledBranchPair, shift: PhaseShift | None = None, normalize: bool = True) -> DetectionPattern:
    """
    Compute the detection density of particle 1 with a phase ``φ`` applied at slit C.

    ``ρ₁ = |c1|²R₁A² + |c2|²R₁B² + 2·Re(c1·c2*·e^(−iφ)·I·ψ₁A·ψ₁B*)``, the diagonal of the
    reduced density matrix. The phase enters through ``ψ₂C → e^(iφ)ψ₂C``, so a shifted
    pattern is exactly the unshifted pattern of the shifted state. With ``normalize`` the
    density is divided by the squared norm of that state and integrates to one.

    :param pair: The entangled state.
    :type pair: EntangledBranchPair
    :param shift: The phase imprinted at slit C, defaults to zero.
    :type shift: PhaseShift | None
    :param normalize: Whether to divide by the squared state norm.
    :type normalize: Bool
    :return: The detection pattern with its background/coherence decomposition.
    :rtype: DetectionPattern
    :raises DegenerateStateError: When the shifted state has zero norm.
    """

    shifted = pair.with_phase(shift or PhaseShift())
    a, b = shifted.mode_1a, shifted.mode_1b

    background = abs(shifted.c1) ** 2 * a.amplitude**2 + abs(shifted.c2) ** 2 * b.amplitude**2
    coherence = 2 * shifted.c1 * shifted.c2.conjugate() * shifted.overlap_i.value * a.samples * np.conj(b.samples)

    scale = state_norm(shifted) ** 2 if normalize else 1.0
    density = (background + coherence.real) / scale
    density[(density < 0) & (density >= -NEGATIVE_DENSITY_TOLERANCE)] = 0.0

    return DetectionPattern(shifted.axis, density, normalize, background / scale, coherence / scale)


def visibility(pattern: DetectionPattern, window: tuple[float, float]) -> float:
    """
    Fringe contrast ``(max − min)/(max + min)`` of the density inside ``window``.

    :param pattern: The detection pattern.
    :type pattern: DetectionPattern
    :param window: Lower and upper bound of the evaluation window.
    :type window: Tuple[float, float]
    :return: The visibility in ``[0, 1]``.
    :rtype: Float
    :raises UndefinedVisibilityError: When the density vanishes on the whole window.
    """

    values = pattern.density[pattern.axis.window_mask(*window)]
    top, bottom = float(np.max(values)), float(np.min(values))

    if not top + bottom > 0:
        raise UndefinedVisibilityError(_("The pattern vanishes on the window {}; visibility is undefined.").format(window), code="undefined_visibility")

    return min(1.0, max(0.0, (top - bottom) / (top + bottom)))


def _fringe_window(reference: DetectionPattern, shifted: DetectionPattern, window: tuple[float, float]) -> np.ndarray:
    if reference.axis != shifted.axis:
        raise AxisMismatchError(_("Fringe patterns must share an axis."), code="axis_mismatch")

    if reference.coherence is None or shifted.background is None:
        raise UnrecoverablePhaseError(_("The pattern carries no fringe decomposition."), code="no_decomposition")

    mask = reference.axis.window_mask(*window)

    # Local fringe visibility of a + b·cos(θ) is b/a.
    background = reference.background[mask]
    contrast = np.abs(reference.coherence[mask])
    local_visibility = float(np.max(np.divide(contrast, background, out=np.zeros_like(contrast), where=background > 0)))

    if local_visibility < MINIMUM_FRINGE_VISIBILITY:
        raise UnrecoverablePhaseError(
            _("Fringe visibility {:.2e} in the window {} is too low to recover a phase.").format(local_visibility, window), code="low_visibility"
        )

    return mask


def fringe_phase_shift(reference: DetectionPattern, shifted: DetectionPattern, window: tuple[float, float]) -> float:
    """
    Recover the phase offset ``φ`` between two patterns of the same state.

    The reference supplies the fringe phase ``θ(x) = arg Γ(x)``; the interference residual
    of the shifted pattern is fitted by least squares to ``s·cos(θ(x) − φ)`` as the linear
    model ``p·Re Γ + q·Im Γ``, and ``φ = atan2(q, p)``.

    Both patterns must come from :func:`detection_pattern` of the same pair, since the fit
    needs their background and coherence. A bare density, such as one read back from
    ``pattern.csv``, cannot be decomposed and raises :class:`UnrecoverablePhaseError`.

    :param reference: The pattern taken as zero phase.
    :type reference: DetectionPattern
    :param shifted: The pattern whose phase is read out.
    :type shifted: DetectionPattern
    :param window: Lower and upper bound of the fitting window.
    :type window: Tuple[float, float]
    :return: The recovered phase in ``[0, 2π)``.
    :rtype: Float
    :raises UnrecoverablePhaseError: When the reference shows no usable fringes or a pattern has no decomposition.
    """

    mask = _fringe_window(reference, shifted, window)

    basis = np.column_stack([reference.coherence.real[mask], reference.coherence.imag[mask]])
    residual = shifted.density[mask] - shifted.background[mask]
    p, q = lstsq(basis, residual)[0]

    phi = PhaseShift(math.atan2(q, p)).canonical
    logger.debug("Recovered fringe phase %.12f from %d window points", phi, np.count_nonzero(mask))

    return phi


def fringe_displacement(reference: DetectionPattern, shifted: DetectionPattern, window: tuple[float, float], tolerance: float = 1e-2) -> float:
    """
    Translate the recovered phase into a spatial displacement of the fringes.

    Only meaningful when the fringe phase ``θ(x)`` is affine in ``x`` (far-field modes):
    the displacement is ``φ/θ′`` with ``φ`` taken in ``(−π, π]``.

    :raises UnrecoverablePhaseError: When ``θ(x)`` departs from a straight line by more than ``tolerance`` radians.
    """

    mask = _fringe_window(reference, shifted, window)
    x = reference.axis.points[mask]
    theta = np.unwrap(np.angle(reference.coherence[mask]))

    slope, intercept = np.polyfit(x, theta, 1)
    departure = float(np.max(np.abs(theta - (slope * x + intercept))))

    if departure > tolerance or slope == 0:
        raise UnrecoverablePhaseError(
            _("The fringe phase is not affine on the window (departure {:.2e} rad); no spatial displacement.").format(departure), code="not_affine"
        )

    phi = fringe_phase_shift(reference, shifted, window)

    return math.remainder(phi, 2 * math.pi) / slope
