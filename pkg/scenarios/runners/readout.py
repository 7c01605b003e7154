import math

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from entanglement.modes import PhaseShift
from entanglement.patterns import detection_pattern
from signaling.readout import DEFAULT_MAX_N, ReadoutExperiment, required_N

from ..config import Parameter
from ..models import Scenario
from .base import BaseRunner, make, owned_by
from .pairs import PAIR_PARAMETERS, build_pair


class ReadoutRunner(BaseRunner):
    """Search the smallest particle budget that reads ``φ ∈ {0, π}`` off the fringes with the requested confidence."""

    name = "Phase readout budget"
    scenario = Scenario.READOUT
    parameters = PAIR_PARAMETERS | {
        "confidence": Parameter(float, 0.99),
        "max_N": Parameter(int, DEFAULT_MAX_N),
        "trials": Parameter(int, None),
    }

    def prepare(self, values: dict) -> dict:
        pair = build_pair(values)
        experiment = make(
            ReadoutExperiment,
            pattern_zero=detection_pattern(pair, PhaseShift(0.0)),
            pattern_pi=detection_pattern(pair, PhaseShift(math.pi)),
            confidence=values["confidence"],
            seed=values["seed"],
            max_N=values["max_N"],
        )

        with owned_by("ReadoutExperiment"):
            experiment.require_readable()

            if values["trials"] is not None and values["trials"] < 1:
                raise ValidationError({"trials": _("At least one Monte Carlo trial is needed, got {}.").format(values["trials"])})

        return {"experiment": experiment, "trials": values["trials"]}

    def execute(self, prepared: dict) -> dict:
        experiment = prepared["experiment"]
        search = required_N(experiment, prepared["trials"])

        summary = {"required_N": search.N, "confidence": experiment.confidence, "seed": experiment.seed, "evaluations": len(search.trace)}

        return {"readout.csv": search.to_frame(), "readout.json": summary}
