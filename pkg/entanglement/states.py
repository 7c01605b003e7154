import cmath
import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _
from scipy.linalg import eigvalsh

from .exceptions import AxisMismatchError, DegenerateStateError
from .grids import GridAxis
from .modes import ModeFunction, OverlapScalar, PhaseShift, apply_phase, overlap

logger = logging.getLogger(__name__)

DEFAULT_COEFFICIENT = complex(1 / math.sqrt(2))
COEFFICIENT_TOLERANCE = 1e-12
DEGENERACY_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class EntangledBranchPair:
    """
    The two-branch entangled state ``c1·ψ₁A(x₁)ψ₂D(x₂) + c2·ψ₁B(x₁)ψ₂C(x₂)``.

    Slit C sits in front of slit A and slit D in front of slit B, so the branches pair
    (A, D) and (B, C). The coefficients default to the maximally entangled ``1/√2``;
    the state is then exactly normalized only when ``J·I = 0``, which is why
    :func:`state_norm` exists.

    :ivar mode_1a: Particle 1 through slit A.
    :type mode_1a: ModeFunction
    :ivar mode_2d: Particle 2 through slit D.
    :type mode_2d: ModeFunction
    :ivar mode_1b: Particle 1 through slit B.
    :type mode_1b: ModeFunction
    :ivar mode_2c: Particle 2 through slit C.
    :type mode_2c: ModeFunction
    :ivar c1: Coefficient of the (A, D) branch.
    :type c1: Complex
    :ivar c2: Coefficient of the (B, C) branch.
    :type c2: Complex
    """

    mode_1a: ModeFunction
    mode_2d: ModeFunction
    mode_1b: ModeFunction
    mode_2c: ModeFunction
    c1: complex = DEFAULT_COEFFICIENT
    c2: complex = DEFAULT_COEFFICIENT

    def __post_init__(self):
        object.__setattr__(self, "c1", complex(self.c1))
        object.__setattr__(self, "c2", complex(self.c2))

        self.clean()

    def clean(self) -> None:
        if not (cmath.isfinite(self.c1) and cmath.isfinite(self.c2)):
            raise ValidationError({"c1": _("Branch coefficients must be finite.")})

        total = abs(self.c1) ** 2 + abs(self.c2) ** 2
        if abs(total - 1.0) > COEFFICIENT_TOLERANCE:
            raise ValidationError({"c2": _("Branch weights |c1|² + |c2|² must sum to one, got {!r}.").format(total)})

        for first, second in [(self.mode_1a, self.mode_1b), (self.mode_2d, self.mode_2c)]:
            if first.axis != second.axis:
                raise AxisMismatchError(
                    _("Modes {} and {} of the same particle must share an axis.").format(first.label, second.label), code="axis_mismatch"
                )

        for mode in [self.mode_1a, self.mode_1b, self.mode_2c, self.mode_2d]:
            mode.require_normalized()

        _require_nondegenerate(self.norm_squared)

    @property
    def axis(self) -> GridAxis:
        """The detector axis of particle 1."""

        return self.mode_1a.axis

    @property
    def branch1(self) -> tuple[ModeFunction, ModeFunction]:
        return self.mode_1a, self.mode_2d

    @property
    def branch2(self) -> tuple[ModeFunction, ModeFunction]:
        return self.mode_1b, self.mode_2c

    @cached_property
    def overlap_i(self) -> OverlapScalar:
        """``I = ∫ψ₂D ψ₂C* dx₂``."""

        return overlap(self.mode_2d, self.mode_2c)

    @cached_property
    def overlap_j(self) -> OverlapScalar:
        """``J = ∫ψ₁A ψ₁B* dx₁``."""

        return overlap(self.mode_1a, self.mode_1b)

    @cached_property
    def norm_squared(self) -> float:
        cross = self.c1 * self.c2.conjugate() * self.overlap_j.value * self.overlap_i.value
        return abs(self.c1) ** 2 + abs(self.c2) ** 2 + 2 * cross.real

    def with_phase(self, shift: PhaseShift) -> "EntangledBranchPair":
        """The same state with ``ψ₂C → exp(iφ)·ψ₂C``."""

        return replace(self, mode_2c=apply_phase(self.mode_2c, shift))


def _require_nondegenerate(norm_squared: float) -> None:
    if not norm_squared > DEGENERACY_TOLERANCE:
        raise DegenerateStateError(_("The two-particle state has squared norm {!r}.").format(norm_squared), code="degenerate_state")


def state_norm(pair: EntangledBranchPair) -> float:
    """
    Return the exact norm ``sqrt(|c1|² + |c2|² + 2·Re(c1·c2*·J·I))`` of the state.

    :param pair: The entangled state.
    :type pair: EntangledBranchPair
    :return: The norm of the two-particle wavefunction.
    :rtype: Float
    :raises DegenerateStateError: When the squared norm is not positive.
    """

    _require_nondegenerate(pair.norm_squared)

    return math.sqrt(pair.norm_squared)


@dataclass(frozen=True, eq=False)
class ReducedDensityMatrix:
    """
    The reduced density matrix ``ρ₁(x₁, x₁′)`` of particle 1 sampled on its axis.

    Traces and spectra use the trapezoidal weights of the axis, so they approximate the
    integral operator rather than the raw matrix.
    """

    axis: GridAxis
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def trace(self) -> float:
        return float(self.axis.integrate(self.diagonal()))

    def is_hermitian(self, tolerance: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tolerance)

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the density operator in descending order."""

        root = np.sqrt(self.axis.weights)
        weighted = root[:, None] * self.matrix * root[None, :]
        weighted = (weighted + weighted.conj().T) / 2

        return eigvalsh(weighted)[::-1]

    def purity(self) -> float:
        """``Tr ρ₁²``: one for a product state, below one once the particles are entangled."""

        return float(np.sum(self.eigenvalues() ** 2))


def reduced_density(pair: EntangledBranchPair, shift: PhaseShift | None = None, normalize: bool = True) -> ReducedDensityMatrix:
    """
    Build the reduced density matrix of particle 1, including the ``I`` and ``I*`` cross terms.

    The phase is applied to ``ψ₂C`` before tracing out particle 2. With ``normalize`` the
    matrix is divided by the squared norm of the (phase-shifted) state so its trace is one.

    :param pair: The entangled state.
    :type pair: EntangledBranchPair
    :param shift: The phase imprinted at slit C, defaults to zero.
    :type shift: PhaseShift | None
    :param normalize: Whether to divide by the squared state norm.
    :type normalize: Bool
    :return: The reduced density matrix on the particle-1 axis.
    :rtype: ReducedDensityMatrix
    """

    shifted = pair.with_phase(shift or PhaseShift())
    a, b = shifted.mode_1a.samples, shifted.mode_1b.samples
    cross = shifted.c1 * shifted.c2.conjugate() * shifted.overlap_i.value

    matrix = (
        abs(shifted.c1) ** 2 * np.outer(a, a.conj())
        + abs(shifted.c2) ** 2 * np.outer(b, b.conj())
        + cross * np.outer(a, b.conj())
        + cross.conjugate() * np.outer(b, a.conj())
    )

    if normalize:
        matrix /= state_norm(shifted) ** 2

    logger.debug("Reduced density matrix on %d points, I = %s", shifted.axis.n_points, shifted.overlap_i.value)

    return ReducedDensityMatrix(shifted.axis, matrix)
