import logging
import math
import numbers
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import pandas as pd
from django.conf import settings
from django.core.exceptions import ValidationError
from django.db import models
from django.utils.translation import gettext_lazy as _
from scipy.integrate import cumulative_trapezoid

from entanglement.exceptions import AxisMismatchError
from entanglement.modes import PhaseShift
from entanglement.patterns import DetectionPattern

from .exceptions import BudgetExceededError, UnreadablePhaseError
from .streams import MAX_SEED, CounterStream

logger = logging.getLogger(__name__)

DENSITY_FLOOR = 1e-300
IDENTICAL_PATTERN_TOLERANCE = 1e-12
DEFAULT_MAX_N = 100_000

# Uniforms held in memory per accuracy chunk.
CHUNK_DRAWS = 2**22


class Symbol(models.TextChoices):
    ZERO = "0", _("φ = 0")
    PI = "pi", _("φ = π")

    @property
    def shift(self) -> PhaseShift:
        return PhaseShift(0.0 if self == Symbol.ZERO else math.pi)

    @classmethod
    def from_phase(cls, phi) -> "Symbol":
        if isinstance(phi, cls):
            return phi

        if isinstance(phi, str) and phi in cls.values:
            return cls(phi)

        canonical = PhaseShift(float(phi)).canonical
        if canonical == 0.0:
            return cls.ZERO

        if math.isclose(canonical, math.pi, rel_tol=0.0, abs_tol=1e-12):
            return cls.PI

        raise ValidationError({"phi_true": _("The alphabet is {{0, π}}, got φ = {}.").format(phi)})


@dataclass(frozen=True, eq=False)
class ReadoutExperiment:
    """
    Reading a binary phase off detector-1 fringes.

    The sender picks ``φ ∈ {0, π}``; the receiver sees ``N`` detections drawn from the
    corresponding pattern and answers with the maximum-likelihood symbol.

    :ivar pattern_zero: The detection pattern for ``φ = 0``.
    :type pattern_zero: DetectionPattern
    :ivar pattern_pi: The detection pattern for ``φ = π``.
    :type pattern_pi: DetectionPattern
    :ivar confidence: Required accuracy for each symbol, in ``(0.5, 1)``.
    :type confidence: Float
    :ivar seed: Seed of the counter-based stream, ``LAB_DEFAULT_SEED`` when omitted.
    :type seed: Int
    :ivar max_N: Largest particle budget the search may try.
    :type max_N: Int
    """

    pattern_zero: DetectionPattern
    pattern_pi: DetectionPattern
    confidence: float = 0.99
    seed: int | None = None
    max_N: int = DEFAULT_MAX_N

    def __post_init__(self):
        if self.seed is None:
            object.__setattr__(self, "seed", getattr(settings, "LAB_DEFAULT_SEED", 20240601))

        self.clean()

    def clean(self) -> None:
        if self.pattern_zero.axis != self.pattern_pi.axis:
            raise AxisMismatchError(_("Both alphabet patterns must live on one axis."), code="axis_mismatch")

        errors = {}

        for name in ["pattern_zero", "pattern_pi"]:
            if not getattr(self, name).normalized:
                errors[name] = _("Readout patterns must be normalized densities.")

        if not (isinstance(self.confidence, numbers.Real) and 0.5 < self.confidence < 1):
            errors["confidence"] = _("The confidence must lie in (0.5, 1), got {}.").format(self.confidence)

        if isinstance(self.seed, bool) or not isinstance(self.seed, numbers.Integral) or not 0 <= self.seed < MAX_SEED:
            errors["seed"] = _("The seed must be an integer in [0, 2⁶⁴), got {!r}.").format(self.seed)

        if isinstance(self.max_N, bool) or not isinstance(self.max_N, numbers.Integral) or self.max_N < 1:
            errors["max_N"] = _("The particle cap must be an integer ≥ 1, got {!r}.").format(self.max_N)

        if errors:
            raise ValidationError(errors)

    @property
    def axis(self):
        return self.pattern_zero.axis

    @property
    def stream(self) -> CounterStream:
        return CounterStream(self.seed)

    def pattern(self, symbol: Symbol) -> DetectionPattern:
        return self.pattern_zero if symbol == Symbol.ZERO else self.pattern_pi

    def require_readable(self) -> None:
        """Raise :class:`UnreadablePhaseError` when the two patterns coincide within ``10⁻¹²·max``."""

        zero, pi = self.pattern_zero.density, self.pattern_pi.density
        scale = max(float(np.max(zero)), float(np.max(pi)))

        if float(np.max(np.abs(zero - pi))) <= IDENTICAL_PATTERN_TOLERANCE * scale:
            raise UnreadablePhaseError(_("The φ = 0 and φ = π patterns are identical; the phase cannot be read."), code="identical_patterns")

    @cached_property
    def _cdfs(self) -> dict[Symbol, np.ndarray]:
        cdfs = {}

        for symbol in Symbol:
            cdf = cumulative_trapezoid(self.pattern(symbol).density, self.axis.points, initial=0.0)
            cdfs[symbol] = cdf / cdf[-1]

        return cdfs

    def sample(self, symbol: Symbol, uniforms: np.ndarray) -> np.ndarray:
        """Map uniforms to detector positions through the inverse CDF of the symbol's pattern."""

        return np.interp(uniforms, self._cdfs[symbol], self.axis.points)

    def log_likelihood_ratio(self, positions: np.ndarray) -> np.ndarray:
        """``Σ log ρ₀(x) − log ρ_π(x)`` over the last axis of ``positions``."""

        x = self.axis.points
        zero = np.log(np.maximum(np.interp(positions, x, self.pattern_zero.density), DENSITY_FLOOR))
        pi = np.log(np.maximum(np.interp(positions, x, self.pattern_pi.density), DENSITY_FLOOR))

        return np.sum(zero - pi, axis=-1)


def _decide(ratio: np.ndarray) -> np.ndarray:
    # Ties resolve to φ = 0.
    return ratio >= 0


def simulate_readout(exp: ReadoutExperiment, phi_true: Symbol | float, N: int, trial: int = 0) -> Symbol:
    """
    Draw ``N`` detections for ``phi_true`` and return the maximum-likelihood symbol.

    :param exp: The experiment.
    :type exp: ReadoutExperiment
    :param phi_true: The symbol sent, as a :class:`Symbol` or a phase equal to 0 or π.
    :type phi_true: Symbol | Float
    :param N: Number of detections.
    :type N: Int
    :param trial: Which trial of the counter-based stream supplies the uniforms.
    :type trial: Int
    :return: The decoded symbol.
    :rtype: Symbol
    :raises UnreadablePhaseError: When the two patterns are identical.
    """

    exp.require_readable()
    _require_count("N", N)

    uniforms = exp.stream.uniforms(1, N, first_trial=trial)[0]
    ratio = exp.log_likelihood_ratio(exp.sample(Symbol.from_phase(phi_true), uniforms))

    return Symbol.ZERO if _decide(ratio) else Symbol.PI


def _require_count(name: str, value) -> None:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
        raise ValidationError({name: _("{} must be an integer ≥ 1, got {!r}.").format(name, value)})


def readout_accuracy(exp: ReadoutExperiment, n: int, trials: int | None = None) -> tuple[float, float]:
    """
    Fraction of trials decoded correctly for each symbol with ``n`` detections per trial.

    Both symbols are sampled from the same uniforms, trial by trial, so the two
    accuracies are paired.

    :param exp: The experiment.
    :type exp: ReadoutExperiment
    :param n: Detections per trial.
    :type n: Int
    :param trials: Number of trials, ``LAB_MONTE_CARLO_TRIALS`` when omitted.
    :type trials: Int | None
    :return: ``(accuracy for φ = 0, accuracy for φ = π)``.
    :rtype: Tuple[float, float]
    """

    exp.require_readable()
    trials = trials if trials is not None else getattr(settings, "LAB_MONTE_CARLO_TRIALS", 10_000)
    _require_count("n", n)
    _require_count("trials", trials)

    rows = max(1, CHUNK_DRAWS // n)
    correct = {Symbol.ZERO: 0, Symbol.PI: 0}

    for start in range(0, trials, rows):
        uniforms = exp.stream.uniforms(min(rows, trials - start), n, first_trial=start)

        for symbol in Symbol:
            decided_zero = _decide(exp.log_likelihood_ratio(exp.sample(symbol, uniforms)))
            correct[symbol] += int(np.count_nonzero(decided_zero if symbol == Symbol.ZERO else ~decided_zero))

    return correct[Symbol.ZERO] / trials, correct[Symbol.PI] / trials


@dataclass(frozen=True)
class ReadoutPoint:
    N: int
    accuracy_phi0: float
    accuracy_phipi: float

    @property
    def accuracy(self) -> float:
        return min(self.accuracy_phi0, self.accuracy_phipi)


@dataclass(frozen=True)
class ReadoutSearch:
    """The smallest sufficient budget and every budget tried on the way, in search order."""

    N: int
    trace: list[ReadoutPoint] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [[point.N, point.accuracy_phi0, point.accuracy_phipi] for point in self.trace], columns=["N", "accuracy_phi0", "accuracy_phipi"]
        )


def required_N(exp: ReadoutExperiment, trials: int | None = None) -> ReadoutSearch:
    """
    Smallest ``N ≤ max_N`` at which both symbols are decoded with the requested confidence.

    The budget is doubled from 1 until it suffices (the last step is clipped to
    ``max_N``), then the gap to the previous budget is bisected. Every accuracy uses the
    same trials of the same stream, so the search is deterministic given the seed.

    :param exp: The experiment.
    :type exp: ReadoutExperiment
    :param trials: Monte Carlo trials per budget, ``LAB_MONTE_CARLO_TRIALS`` when omitted.
    :type trials: Int | None
    :return: The budget and the search trace.
    :rtype: ReadoutSearch
    :raises UnreadablePhaseError: When the two patterns are identical.
    :raises BudgetExceededError: When even ``max_N`` detections fall short.
    """

    exp.require_readable()
    trace = []

    def measure(n: int) -> ReadoutPoint:
        point = ReadoutPoint(n, *readout_accuracy(exp, n, trials))
        trace.append(point)
        logger.debug("N = %s: accuracy %s / %s", n, point.accuracy_phi0, point.accuracy_phipi)

        return point

    lower, n = 0, 1

    while True:
        n = min(n, exp.max_N)
        if measure(n).accuracy >= exp.confidence:
            upper = n
            break

        if n == exp.max_N:
            best = max(point.accuracy for point in trace)
            raise BudgetExceededError(
                _("Accuracy {} < {} with the full budget of {} particles.").format(best, exp.confidence, exp.max_N),
                best_accuracy=best,
                trace=trace,
                code="budget_exceeded",
            )

        lower, n = n, 2 * n

    while upper - lower > 1:
        middle = (lower + upper) // 2

        if measure(middle).accuracy >= exp.confidence:
            upper = middle
        else:
            lower = middle

    logger.info("Required N = %s at confidence %s after %s evaluations", upper, exp.confidence, len(trace))

    return ReadoutSearch(upper, trace)
