from entanglement.modes import PhaseShift
from entanglement.patterns import detection_pattern
from entanglement.states import state_norm

from ..config import Parameter, boolean
from ..models import Scenario
from .base import BaseRunner, make, owned_by
from .pairs import PAIR_PARAMETERS, build_pair


class PatternRunner(BaseRunner):
    name = "Detection pattern"
    scenario = Scenario.PATTERN
    parameters = PAIR_PARAMETERS | {"phi": Parameter(float, 0.0), "normalize": Parameter(boolean, True)}

    def prepare(self, values: dict) -> dict:
        pair = build_pair(values)
        shift = make(PhaseShift, phi=values["phi"])

        with owned_by("EntangledBranchPair"):
            state_norm(pair.with_phase(shift))

        return {"pair": pair, "shift": shift, "normalize": values["normalize"]}

    def execute(self, prepared: dict) -> dict:
        pair, shift = prepared["pair"], prepared["shift"]
        pattern = detection_pattern(pair, shift, prepared["normalize"])

        frame = pattern.to_frame()
        frame["background"] = pattern.background
        frame["interference"] = pattern.interference

        summary = {
            "phi": shift.phi,
            "overlap_i": pair.with_phase(shift).overlap_i.value,
            "overlap_j": pair.overlap_j.value,
            "state_norm": state_norm(pair.with_phase(shift)),
            "total": pattern.total(),
        }

        # Branches before the phase at slit C is applied.
        modes = {"mode_{}.csv".format(mode.label.lower()): mode.to_frame() for mode in [pair.mode_1a, pair.mode_1b, pair.mode_2c, pair.mode_2d]}

        return {"pattern.csv": frame, "pattern.json": summary} | modes
