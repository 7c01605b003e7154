import logging
import math
from dataclasses import dataclass

import numpy as np
from django.core.exceptions import ValidationError
from django.db import models
from django.utils.translation import gettext_lazy as _
from scipy.linalg import eigh, eigvalsh

from .exceptions import UnitarityError

logger = logging.getLogger(__name__)

UNITARITY_TOLERANCE = 1e-12
GRAM_TOLERANCE = 1e-12

# Basis order is (+, −) everywhere.
PLUS, MINUS = np.eye(2, dtype=complex)


class Role(models.TextChoices):
    U1 = "U1", _("Evolution of particle 1")
    U2 = "U2", _("Evolution of particle 2")


@dataclass(frozen=True, eq=False)
class EvolutionMap2:
    """
    A 2×2 effective evolution operator in the ``{+, −}`` basis.

    Particle 1 evolves unitarily, so a ``U1`` map is rejected unless ``U†U = 1`` within
    10⁻¹²; a ``U2`` map may be any finite matrix.

    :ivar matrix: The operator.
    :type matrix: Numpy.ndarray
    :ivar role: Which particle the operator acts on.
    :type role: Role
    """

    matrix: np.ndarray
    role: Role = Role.U2

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

        self.clean()

    def clean(self) -> None:
        if self.matrix.shape != (2, 2):
            raise ValidationError({"matrix": _("An evolution map is a 2×2 matrix, got shape {}.").format(self.matrix.shape)})

        if not np.all(np.isfinite(self.matrix)):
            raise ValidationError({"matrix": _("The evolution map has non-finite entries.")})

        if self.role == Role.U1 and not self.is_unitary():
            raise UnitarityError(
                {"matrix": _("U1 must be unitary; ‖U†U − 1‖ = {:.3e}.").format(self.unitarity_error())}, code="not_unitary"
            )

    def unitarity_error(self) -> float:
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(2))))

    def is_unitary(self, tolerance: float = UNITARITY_TOLERANCE) -> bool:
        return self.unitarity_error() <= tolerance


@dataclass(frozen=True)
class GramMatrix:
    """
    ``U₂†U₂ = ((α, β), (γ, δ))`` in the ``{+, −}`` basis.

    Entries are validated as a Hermitian positive semidefinite matrix, which covers both
    Gram matrices computed from a ``U₂`` and those given directly.
    """

    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    def __post_init__(self):
        for name in ["alpha", "beta", "gamma", "delta"]:
            object.__setattr__(self, name, complex(getattr(self, name)))

        self.clean()

    def clean(self) -> None:
        errors = {}

        for name in ["alpha", "beta", "gamma", "delta"]:
            if not np.isfinite(getattr(self, name)):
                errors[name] = _("{} must be finite.").format(name)

        if errors:
            raise ValidationError(errors)

        for name in ["alpha", "delta"]:
            if abs(getattr(self, name).imag) > GRAM_TOLERANCE:
                errors[name] = _("The diagonal entry {} must be real, got {}.").format(name, getattr(self, name))

        if abs(self.gamma - self.beta.conjugate()) > GRAM_TOLERANCE:
            errors["gamma"] = _("gamma ({}) must be the conjugate of beta ({}).").format(self.gamma, self.beta)

        if errors:
            raise ValidationError(errors)

        smallest = float(eigvalsh(self.matrix)[0])
        if smallest < -GRAM_TOLERANCE:
            raise ValidationError({"alpha": _("The Gram matrix must be positive semidefinite; its smallest eigenvalue is {:.6g}.").format(smallest)})

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "GramMatrix":
        (alpha, beta), (gamma, delta) = np.asarray(matrix, dtype=complex)

        return cls(alpha, beta, gamma, delta)

    @classmethod
    def identity(cls) -> "GramMatrix":
        return cls(1, 0, 0, 1)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.alpha, self.beta], [self.gamma, self.delta]])


def gram(u2: EvolutionMap2) -> GramMatrix:
    """
    Return ``U₂†U₂``, which differs from the identity exactly when ``U₂`` is not unitary.

    :param u2: The evolution of particle 2.
    :type u2: EvolutionMap2
    :return: The Gram matrix.
    :rtype: GramMatrix
    """

    if u2.role != Role.U2:
        raise ValidationError({"role": _("The Gram matrix is taken of U2, got {}.").format(u2.role)})

    return GramMatrix.from_matrix(u2.matrix.conj().T @ u2.matrix)


def gram_root(g: GramMatrix) -> EvolutionMap2:
    """The positive semidefinite square root of ``g``: a ``U₂`` with ``U₂†U₂ = g``."""

    eigenvalues, vectors = eigh(g.matrix)
    root = vectors @ np.diag(np.sqrt(np.clip(eigenvalues, 0, None))) @ vectors.conj().T

    return EvolutionMap2(root, Role.U2)


def marginal_probs_closed(g: GramMatrix) -> tuple[float, float]:
    """
    Side-1 detection probabilities ``P(1₊) = ½(|β|² + |δ|²)`` and ``P(1₋) = ½(|α|² + |γ|²)``.

    Only ``U₂†U₂`` enters, so for a unitary ``U₂`` both are ½ whatever happens on side 1.
    They need not sum to one when ``U₂`` is not unitary.

    :param g: The Gram matrix of particle 2's evolution.
    :type g: GramMatrix
    :return: ``(P₊, P₋)``.
    :rtype: Tuple[float, float]
    """

    p_plus = (abs(g.beta) ** 2 + abs(g.delta) ** 2) / 2
    p_minus = (abs(g.alpha) ** 2 + abs(g.gamma) ** 2) / 2

    return p_plus, p_minus


def marginal_probs_oracle(u1: EvolutionMap2, u2: EvolutionMap2) -> tuple[float, float]:
    """
    Evaluate the side-1 probabilities directly on the four-dimensional two-particle state.

    The state ``(|1₊(t)⟩|2₋(t)⟩ + |1₋(t)⟩|2₊(t)⟩)/√2`` is built from the evolved basis
    vectors, and ``P(1±) = Σ_s |⟨1±(t)|⟨2s(t)|t⟩|²`` projects onto the evolved (possibly
    non-normalized) particle-2 states.

    :param u1: Unitary evolution of particle 1.
    :type u1: EvolutionMap2
    :param u2: Evolution of particle 2.
    :type u2: EvolutionMap2
    :return: ``(P₊, P₋)``.
    :rtype: Tuple[float, float]
    :raises UnitarityError: When ``u1`` is not unitary.
    """

    if not u1.is_unitary():
        raise UnitarityError({"matrix": _("The side-1 evolution must be unitary.")}, code="not_unitary")

    one = {"+": u1.matrix @ PLUS, "-": u1.matrix @ MINUS}
    two = {"+": u2.matrix @ PLUS, "-": u2.matrix @ MINUS}
    state = (np.kron(one["+"], two["-"]) + np.kron(one["-"], two["+"])) / math.sqrt(2)

    def probability(sign: str) -> float:
        return float(sum(abs(np.vdot(np.kron(one[sign], two[s]), state)) ** 2 for s in ["+", "-"]))

    return probability("+"), probability("-")


def signaling_deviation(g: GramMatrix) -> float:
    """``max(| |β|²+|δ|² − 1 |, | |α|²+|γ|² − 1 |)``: zero exactly when side 1 cannot tell ``U₂`` from a unitary."""

    return max(abs(abs(g.beta) ** 2 + abs(g.delta) ** 2 - 1), abs(abs(g.alpha) ** 2 + abs(g.gamma) ** 2 - 1))


def heaviside(t: float, switch_time: float) -> float:
    """``θ`` with ``θ = 0`` for ``t < T`` and ``θ = 1`` for ``t ≥ T``."""

    return 0.0 if t < switch_time else 1.0


@dataclass(frozen=True)
class TimeSwitch:
    """
    A non-unitary perturbation of particle 2's evolution switched on abruptly at ``T``.

    Before ``T`` the Gram matrix is the identity; from ``T`` on it is
    ``((1 + α₀, β₀), (γ₀, 1 + δ₀))``, which must be Hermitian positive semidefinite.
    """

    switch_time: float
    alpha0: complex = 0
    beta0: complex = 0
    gamma0: complex = 0
    delta0: complex = 0

    def __post_init__(self):
        self.clean()

    def clean(self) -> None:
        if not math.isfinite(self.switch_time):
            raise ValidationError({"switch_time": _("The switch time must be finite, got {}.").format(self.switch_time)})

        try:
            self.switched()
        except ValidationError as e:
            raise ValidationError({"{}0".format(field): messages for field, messages in e.message_dict.items()})

    def switched(self) -> GramMatrix:
        return GramMatrix(1 + self.alpha0, self.beta0, self.gamma0, 1 + self.delta0)

    def gram_at(self, t: float) -> GramMatrix:
        if heaviside(t, self.switch_time):
            return self.switched()

        return GramMatrix.identity()


def probs_vs_time(switch: TimeSwitch, t: float) -> tuple[float, float]:
    """
    Side-1 probabilities at time ``t`` under a Heaviside time switch.

    :param switch: The perturbation and its switch time.
    :type switch: TimeSwitch
    :param t: The observation time.
    :type t: Float
    :return: ``(½, ½)`` before the switch, the perturbed closed form after it.
    :rtype: Tuple[float, float]
    """

    probabilities = marginal_probs_closed(switch.gram_at(t))
    logger.debug("P(1+), P(1-) at t = %s: %s", t, probabilities)

    return probabilities
