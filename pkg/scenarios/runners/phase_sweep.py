import math

import pandas as pd
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from entanglement.modes import PhaseShift
from entanglement.patterns import detection_pattern, fringe_phase_shift, visibility

from ..config import Parameter, floats, phases
from ..models import Scenario
from .base import BaseRunner, make, owned_by
from .pairs import PAIR_PARAMETERS, build_pair


class PhaseSweepRunner(BaseRunner):
    """Recover the phase imprinted at slit C from the fringes of particle 1, one row per ``φ``."""

    name = "Fringe phase sweep"
    scenario = Scenario.PHASE_SWEEP
    parameters = PAIR_PARAMETERS | {"phis": Parameter(phases, [0.0, 0.7, math.pi]), "window": Parameter(floats, None)}

    def prepare(self, values: dict) -> dict:
        pair = build_pair(values)
        shifts = [make(PhaseShift, phi=phi) for phi in values["phis"]]
        window = tuple(values["window"] or [pair.axis.x_min, pair.axis.x_max])
        reference = detection_pattern(pair)

        with owned_by("DetectionPattern"):
            if len(window) != 2 or not window[0] < window[1]:
                raise ValidationError({"window": _("The window is two increasing bounds, got {}.").format(list(window))})

            fringe_phase_shift(reference, reference, window)

        return {"pair": pair, "shifts": shifts, "reference": reference, "window": window}

    def execute(self, prepared: dict) -> dict:
        rows = []

        for shift in prepared["shifts"]:
            shifted = detection_pattern(prepared["pair"], shift)
            recovered = fringe_phase_shift(prepared["reference"], shifted, prepared["window"])

            rows.append([shift.phi, recovered, visibility(shifted, prepared["window"])])

        return {"phase_sweep.csv": pd.DataFrame(rows, columns=["phi", "recovered", "visibility"])}
