from signaling.timing import SPEED_OF_LIGHT, TimingScenario, evaluate

from ..config import Parameter
from ..models import Scenario
from .base import BaseRunner, make


class TimingRunner(BaseRunner):
    name = "Signaling timing"
    scenario = Scenario.TIMING
    parameters = {"tau": Parameter(float), "L": Parameter(float), "N": Parameter(int), "c": Parameter(float, SPEED_OF_LIGHT)}

    def prepare(self, values: dict) -> dict:
        return {"scenario": make(TimingScenario, tau=values["tau"], L=values["L"], N=values["N"], c=values["c"])}

    def execute(self, prepared: dict) -> dict:
        return {"timing.json": evaluate(prepared["scenario"]).to_json_dict()}
