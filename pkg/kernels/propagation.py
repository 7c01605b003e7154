import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings
from django.db import models
from django.utils.translation import gettext_lazy as _
from scipy import fft

from entanglement.grids import GridAxis
from entanglement.modes import ModeFunction, ModeLabel

from .exceptions import GridUnderresolutionError, SlitGeometryError, TimeOrderError
from .params import GaussianPacket, KernelParams, Segment, SlitGeometry

logger = logging.getLogger(__name__)

NORM_LOSS_TOLERANCE = 1e-3
OUTPUT_NORM_SLACK = 1e-6
PACKET_HALF_WIDTHS = 10
QUADRATURE_CHUNK_ROWS = 256


class PropagationMethod(models.TextChoices):
    SPECTRAL = "spectral", _("Kernel applied through its Fourier transform")
    QUADRATURE = "quadrature", _("Direct trapezoidal quadrature of the kernel")


def free_kernel_value(x_f: float | np.ndarray, x_i: float | np.ndarray, params: KernelParams, segment: Segment) -> complex | np.ndarray:
    """
    Evaluate the one-dimensional free-particle kernel over one segment.

    ``K(x_f, x_i; Δt) = sqrt(m/(2πiħΔt))·exp(i·m·(x_f − x_i)²/(2ħΔt))``, where the
    square root of ``1/i`` is fixed to ``e^(−iπ/4)``. Both positions may be arrays, in
    which case they broadcast.

    :param x_f: Final position(s).
    :type x_f: Float | Numpy.ndarray
    :param x_i: Initial position(s).
    :type x_i: Float | Numpy.ndarray
    :param params: Mass, ħ and the kernel times.
    :type params: KernelParams
    :param segment: Which of the three time intervals to use.
    :type segment: Segment
    :return: The kernel value(s).
    :rtype: Complex | Numpy.ndarray
    :raises TimeOrderError: When the segment has no positive duration.
    """

    duration = _require_duration(params, segment)
    prefactor = math.sqrt(params.mass / (2 * math.pi * params.hbar * duration)) * cmath.exp(-1j * math.pi / 4)
    phase = params.mass * (np.asarray(x_f) - np.asarray(x_i)) ** 2 / (2 * params.hbar * duration)

    value = prefactor * np.exp(1j * phase)

    return complex(value) if np.ndim(value) == 0 else value


def _require_duration(params: KernelParams, segment: Segment) -> float:
    duration = params.duration(segment)

    if not duration > 0:
        raise TimeOrderError({"t_f": _("Segment {} has a non-positive duration {}.").format(segment, duration)}, code="time_order")

    return duration


def _points_per_oscillation() -> int:
    return getattr(settings, "LAB_POINTS_PER_OSCILLATION", 12)


def _wavenumber_extent(mode: ModeFunction) -> float:
    """``|⟨k⟩| + 8·std(k)`` of the sampled mode; ``|k₀| + 4/σ`` for a Gaussian packet."""

    power = np.abs(fft.fft(mode.samples[:-1])) ** 2
    k = 2 * math.pi * fft.fftfreq(power.size, d=mode.axis.spacing)

    total = np.sum(power)
    if not total > 0:
        return 0.0

    mean = np.sum(k * power) / total
    spread = math.sqrt(max(0.0, float(np.sum((k - mean) ** 2 * power) / total)))

    return abs(float(mean)) + 8 * spread


def _require_resolution(axis: GridAxis, frequency: float, what: str) -> None:
    """Every local oscillation of ``frequency`` radians per unit length gets the configured number of samples."""

    points = _points_per_oscillation()

    if frequency > 0 and axis.spacing > 2 * math.pi / (points * frequency):
        suggested = 2 * math.pi / (points * frequency)
        raise GridUnderresolutionError(
            _("The grid spacing {:.3e} undersamples the {} ({} points per oscillation required); use a spacing of at most {:.3e}.").format(
                axis.spacing, what, points, suggested
            ),
            code="undersampled",
        )


def _require_sampling(axis: GridAxis, params: KernelParams, duration: float, method: PropagationMethod, wavenumber_extent: float) -> None:
    if PropagationMethod(method) == PropagationMethod.QUADRATURE:
        kernel_frequency = params.mass * axis.width / (params.hbar * duration)
        _require_resolution(axis, kernel_frequency + wavenumber_extent, _("kernel quadrature"))
    else:
        _require_resolution(axis, wavenumber_extent, _("mode"))


def _require_room(packet: GaussianPacket, axis: GridAxis, params: KernelParams, duration: float) -> None:
    width = PACKET_HALF_WIDTHS * packet.sigma_at(params, duration)
    start, end = packet.center, packet.center_at(params, duration)
    lower, upper = min(start, end) - width, max(start, end) + width

    if lower < axis.x_min or upper > axis.x_max:
        raise GridUnderresolutionError(
            _("The axis [{}, {}] cannot hold the spreading packet; it needs at least [{:.6g}, {:.6g}].").format(axis.x_min, axis.x_max, lower, upper),
            code="axis_too_narrow",
        )


def _spectral(samples: np.ndarray, axis: GridAxis, params: KernelParams, duration: float) -> np.ndarray:
    # The first n − 1 points form one period; the last sample repeats the first.
    cell = samples[:-1]
    k = 2 * math.pi * fft.fftfreq(cell.size, d=axis.spacing)
    evolved = fft.ifft(fft.fft(cell) * np.exp(-1j * params.hbar * k**2 * duration / (2 * params.mass)))

    return np.append(evolved, evolved[0])


def _quadrature(samples: np.ndarray, axis: GridAxis, params: KernelParams, segment: Segment) -> np.ndarray:
    weighted = axis.weights * samples
    output = np.empty(axis.n_points, dtype=complex)

    for start in range(0, axis.n_points, QUADRATURE_CHUNK_ROWS):
        rows = axis.points[start : start + QUADRATURE_CHUNK_ROWS]
        output[start : start + rows.size] = free_kernel_value(rows[:, None], axis.points[None, :], params, segment) @ weighted

    return output


def propagate_mode(
    mode: ModeFunction,
    params: KernelParams,
    segment: Segment,
    method: PropagationMethod = PropagationMethod.SPECTRAL,
    wavenumber_extent: float | None = None,
) -> ModeFunction:
    """
    Freely propagate a sampled mode over one segment: ``ψ(x_f) = ∫K(x_f, x_i)ψ(x_i)dx_i``.

    The spectral method multiplies the Fourier transform of the mode by the kernel's
    transfer function ``exp(−iħk²Δt/(2m))`` on the periodic cell of the grid, which keeps
    the trapezoidal norm exactly; the mode must vanish towards both ends of the axis.
    The quadrature method sums the kernel directly and requires the configured number of
    samples per oscillation of the integrand.

    :param mode: The mode at the start of the segment.
    :type mode: ModeFunction
    :param params: Mass, ħ and the kernel times.
    :type params: KernelParams
    :param segment: The time interval to propagate over.
    :type segment: Segment
    :param method: Spectral or quadrature evaluation.
    :type method: PropagationMethod
    :param wavenumber_extent: Largest wavenumber carried by the mode; estimated from its spectrum when omitted.
    :type wavenumber_extent: Float | None
    :return: The mode at the end of the segment.
    :rtype: ModeFunction
    :raises GridUnderresolutionError: When the grid undersamples the mode or the kernel.
    """

    duration = _require_duration(params, segment)
    axis = mode.axis

    if wavenumber_extent is None:
        wavenumber_extent = _wavenumber_extent(mode)

    _require_sampling(axis, params, duration, method, wavenumber_extent)

    if PropagationMethod(method) == PropagationMethod.QUADRATURE:
        samples = _quadrature(mode.samples, axis, params, segment)
    else:
        samples = _spectral(mode.samples, axis, params, duration)

    logger.debug("Propagated %s mode over %s (Δt = %.6g) on %d points by %s", mode.label, segment, duration, axis.n_points, method)

    return mode.with_samples(samples)


def _require_norm_kept(before: float, after: float, axis: GridAxis) -> None:
    if abs(after - before) > NORM_LOSS_TOLERANCE:
        raise GridUnderresolutionError(
            _("Free propagation changed the squared norm from {:.9f} to {:.9f}; use a spacing of at most {:.3e}.").format(before, after, axis.spacing / 2),
            code="norm_loss",
        )


def propagate_free(
    packet: GaussianPacket,
    axis: GridAxis,
    params: KernelParams,
    segment: Segment = Segment.INITIAL_TO_FINAL,
    method: PropagationMethod = PropagationMethod.SPECTRAL,
) -> ModeFunction:
    """
    Propagate a Gaussian test packet freely over one segment.

    :param packet: The packet at the start of the segment.
    :type packet: GaussianPacket
    :param axis: The grid, which must hold the packet ±10σ over the whole segment.
    :type axis: GridAxis
    :param params: Mass, ħ and the kernel times.
    :type params: KernelParams
    :param segment: The time interval to propagate over.
    :type segment: Segment
    :param method: Spectral or quadrature evaluation.
    :type method: PropagationMethod
    :return: The propagated packet.
    :rtype: ModeFunction
    :raises GridUnderresolutionError: When the axis is too narrow, too coarse, or the norm drifts by more than 10⁻³.
    """

    duration = _require_duration(params, segment)
    _require_room(packet, axis, params, duration)

    initial = packet.sample(axis)
    output = propagate_mode(initial, params, segment, method, _packet_extent(packet))
    _require_norm_kept(initial.norm_squared(), output.norm_squared(), axis)

    return output


def _packet_extent(packet: GaussianPacket) -> float:
    # Free evolution leaves the momentum distribution unchanged.
    return abs(packet.wavenumber) + 4 / packet.sigma


def check_slit_setup(packet: GaussianPacket, axis: GridAxis, params: KernelParams, method: PropagationMethod = PropagationMethod.SPECTRAL) -> None:
    """Raise what :func:`propagate_slit` would raise about times, axis width and sampling, without propagating."""

    for segment in [Segment.INITIAL_TO_SCREEN, Segment.SCREEN_TO_FINAL]:
        _require_sampling(axis, params, _require_duration(params, segment), method, _packet_extent(packet))

    _require_room(packet, axis, params, params.duration(Segment.INITIAL_TO_FINAL))


@dataclass(frozen=True, eq=False)
class PropagationResult:
    """
    A packet taken from the source through the slit screen to the detector.

    :ivar output: The state at ``t_f``.
    :type output: ModeFunction
    :ivar input_norm2: Squared norm of the packet at ``t_i``.
    :type input_norm2: Float
    :ivar mid_plane: The state just behind the screen at ``t_c``.
    :type mid_plane: ModeFunction
    :ivar output_norm2: Squared norm of the state at ``t_f``.
    :type output_norm2: Float
    """

    output: ModeFunction
    input_norm2: float
    mid_plane: ModeFunction
    output_norm2: float

    def __post_init__(self):
        self.clean()

    def clean(self) -> None:
        if not 0 <= self.output_norm2 <= self.input_norm2 + OUTPUT_NORM_SLACK:
            raise GridUnderresolutionError(
                _("The propagated norm {!r} exceeds the input norm {!r}.").format(self.output_norm2, self.input_norm2), code="norm_gain"
            )

    @property
    def transmitted(self) -> float:
        """Fraction of the input probability found behind the screen at ``t_c``."""

        return self.mid_plane.norm_squared() / self.input_norm2


def _to_screen(packet: GaussianPacket, axis: GridAxis, params: KernelParams, method: PropagationMethod) -> tuple[float, ModeFunction]:
    _require_room(packet, axis, params, params.duration(Segment.INITIAL_TO_FINAL))

    input_norm2 = packet.sample(axis).norm_squared()
    at_screen = propagate_free(packet, axis, params, Segment.INITIAL_TO_SCREEN, method)

    return input_norm2, at_screen


def _through_window(
    at_screen: ModeFunction, window: np.ndarray, packet: GaussianPacket, input_norm2: float, params: KernelParams, method: PropagationMethod
) -> PropagationResult:
    mid_plane = at_screen.with_samples(at_screen.samples * window)
    output = propagate_mode(mid_plane, params, Segment.SCREEN_TO_FINAL, method, _packet_extent(packet))

    return PropagationResult(output, input_norm2, mid_plane, output.norm_squared())


def propagate_slit(
    packet: GaussianPacket,
    axis: GridAxis,
    params: KernelParams,
    slit: SlitGeometry | None,
    method: PropagationMethod = PropagationMethod.SPECTRAL,
) -> PropagationResult:
    """
    Propagate a packet through one slit: free to ``t_c``, the slit window, free to ``t_f``.

    The two free segments keep their full kernel prefactors, so a window covering the
    whole packet reproduces free propagation. Without a slit the screen is transparent.
    Because the second segment is unitary, ``output_norm2`` equals the probability
    transmitted at ``t_c``.

    :param packet: The packet prepared at ``t_i``.
    :type packet: GaussianPacket
    :param axis: The grid shared by source, screen and detector coordinates.
    :type axis: GridAxis
    :param params: Mass, ħ and the kernel times.
    :type params: KernelParams
    :param slit: The aperture, or ``None`` for an open screen.
    :type slit: SlitGeometry | None
    :param method: Spectral or quadrature evaluation.
    :type method: PropagationMethod
    :return: The state at the screen and at the detector with their norms.
    :rtype: PropagationResult
    """

    input_norm2, at_screen = _to_screen(packet, axis, params, method)
    window = np.ones(axis.n_points) if slit is None else slit.window(axis)

    result = _through_window(at_screen, window, packet, input_norm2, params, method)
    logger.debug("Slit %s transmitted %.12f of the packet", slit, result.transmitted)

    return result


def unitarity_defect(result: PropagationResult) -> float:
    """``1 − output_norm2/input_norm2``, clamped to ``[0, 1]``."""

    return min(1.0, max(0.0, 1.0 - result.output_norm2 / result.input_norm2))


@dataclass(frozen=True, eq=False)
class DoubleSlitModes:
    """Unit-normalized modes behind each of two slits, with the fractions each slit transmitted."""

    mode_a: ModeFunction
    mode_b: ModeFunction
    transmitted_a: float
    transmitted_b: float


def double_slit_modes(
    packet: GaussianPacket,
    axis: GridAxis,
    params: KernelParams,
    slit_a: SlitGeometry,
    slit_b: SlitGeometry,
    method: PropagationMethod = PropagationMethod.SPECTRAL,
    labels: tuple[ModeLabel, ModeLabel] = (ModeLabel.MODE_1A, ModeLabel.MODE_1B),
) -> DoubleSlitModes:
    """
    Build the two branch modes of one particle by propagating it through each slit separately.

    Each mode is renormalized to unit norm; the pre-normalization output norms are
    reported as transmitted fractions. Running this for particle 2 with slits C and D
    yields ``ψ₂C`` and ``ψ₂D``.

    :raises SlitGeometryError: When the nominal slit intervals overlap.
    """

    if slit_a.overlaps(slit_b):
        raise SlitGeometryError(
            {"center": _("Slit windows {} and {} overlap.").format(slit_a.interval, slit_b.interval)}, code="overlapping_slits"
        )

    input_norm2, at_screen = _to_screen(packet, axis, params, method)
    results = [_through_window(at_screen, slit.window(axis), packet, input_norm2, params, method) for slit in [slit_a, slit_b]]

    modes = []
    for result, label in zip(results, labels):
        normalized = result.output.normalized()
        modes.append(normalized.with_samples(normalized.samples, label))

    mode_a, mode_b = modes
    transmitted_a, transmitted_b = [result.output_norm2 / input_norm2 for result in results]

    logger.debug("Double slit transmitted %.9f through A and %.9f through B", transmitted_a, transmitted_b)

    return DoubleSlitModes(mode_a, mode_b, transmitted_a, transmitted_b)


def _propagator_matrix(axis: GridAxis, params: KernelParams, segment: Segment) -> np.ndarray:
    duration = _require_duration(params, segment)
    size = axis.n_points - 1
    k = 2 * math.pi * fft.fftfreq(size, d=axis.spacing)

    return fft.ifft(np.exp(-1j * params.hbar * k**2 * duration / (2 * params.mass))[:, None] * fft.fft(np.eye(size), axis=0), axis=0)


def conservation_operator(axis: GridAxis, params: KernelParams, slit: SlitGeometry | None = None) -> np.ndarray:
    """
    The discrete form of ``∫K*(x_f, x′)K(x_f, x)dx_f`` for source → screen → detector.

    Returns ``K†K`` on the periodic cell of the grid (its first ``n − 1`` points), with
    ``K`` the spectral two-segment propagator including the slit window. Probability is
    conserved exactly when this is the identity; for a hard slit its eigenvalues are the
    squared window samples, so the identity only returns once the window covers the grid.

    :param axis: The grid.
    :type axis: GridAxis
    :param params: Mass, ħ and the kernel times.
    :type params: KernelParams
    :param slit: The aperture, or ``None`` for free evolution.
    :type slit: SlitGeometry | None
    :return: The ``(n − 1) × (n − 1)`` matrix ``K†K``.
    :rtype: Numpy.ndarray
    """

    window = np.ones(axis.n_points - 1) if slit is None else slit.window(axis)[:-1]

    kernel = _propagator_matrix(axis, params, Segment.SCREEN_TO_FINAL) @ (window[:, None] * _propagator_matrix(axis, params, Segment.INITIAL_TO_SCREEN))

    return kernel.conj().T @ kernel
