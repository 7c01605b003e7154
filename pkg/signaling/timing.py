import logging
import math
import numbers
from dataclasses import dataclass

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _
from scipy.constants import c as SPEED_OF_LIGHT

logger = logging.getLogger(__name__)


def _positive_errors(**values) -> dict:
    return {
        name: _("{} must be positive and finite, got {}.").format(name, value)
        for name, value in values.items()
        if not (isinstance(value, numbers.Real) and math.isfinite(value) and value > 0)
    }


def _count_errors(N) -> dict:
    if isinstance(N, bool) or not isinstance(N, numbers.Integral) or N < 1:
        return {"N": _("The particle budget must be an integer ≥ 1, got {!r}.").format(N)}

    return {}


def threshold_tau(L: float, N: int, c: float = SPEED_OF_LIGHT) -> float:
    """
    The largest mean emission interval that still allows a superluminal message.

    All ``N`` particles have to reach detector 1 before a light signal from slit C
    could, so ``τ < L/(N·c)``.

    :param L: Slit-C-to-detector-1 separation in metres.
    :type L: Float
    :param N: Detected-particle budget.
    :type N: Int
    :param c: Speed of light in metres per second.
    :type c: Float
    :return: ``L/(N·c)`` in seconds.
    :rtype: Float
    :raises ValidationError: When ``L`` or ``c`` is not positive or ``N < 1``.
    """

    errors = _positive_errors(L=L, c=c) | _count_errors(N)
    if errors:
        raise ValidationError(errors)

    return L / (N * c)


@dataclass(frozen=True)
class TimingScenario:
    """
    An emission rate, a geometry and a particle budget.

    :ivar tau: Mean time between two emitted pairs, in seconds.
    :type tau: Float
    :ivar L: Slit-C-to-detector-1 separation in metres.
    :type L: Float
    :ivar N: Detected-particle budget.
    :type N: Int
    :ivar c: Speed of light in metres per second.
    :type c: Float
    """

    tau: float
    L: float
    N: int
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        self.clean()

    def clean(self) -> None:
        errors = _positive_errors(tau=self.tau, L=self.L, c=self.c) | _count_errors(self.N)
        if errors:
            raise ValidationError(errors)

    @property
    def threshold(self) -> float:
        return threshold_tau(self.L, self.N, self.c)

    @property
    def arrival_window(self) -> float:
        """Delay between the first and the last of ``N`` arrivals, taken as ``N·τ``."""

        return self.N * self.tau


@dataclass(frozen=True)
class TimingReport:
    threshold: float
    feasible: bool
    margin: float

    def __post_init__(self):
        if self.feasible != (self.margin < 1):
            raise ValidationError({"feasible": _("feasible must agree with margin < 1, got {} and {}.").format(self.feasible, self.margin)})

    def to_json_dict(self) -> dict:
        return {"threshold_s": self.threshold, "feasible": self.feasible, "margin": self.margin}


def evaluate(scenario: TimingScenario) -> TimingReport:
    """Compare the emission interval with ``L/(N·c)``; the inequality is strict."""

    threshold = scenario.threshold
    margin = scenario.tau / threshold

    logger.debug("tau = %s s against threshold %s s (margin %s)", scenario.tau, threshold, margin)

    return TimingReport(threshold=threshold, feasible=margin < 1, margin=margin)
