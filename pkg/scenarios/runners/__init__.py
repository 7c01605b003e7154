from ..config import ScenarioConfig
from ..models import Scenario
from .base import BaseRunner, RunManifest
from .pattern import PatternRunner
from .phase_sweep import PhaseSweepRunner
from .qubit import QubitRunner
from .readout import ReadoutRunner
from .slit_defect import SlitDefectRunner
from .timing import TimingRunner

RUNNERS: dict[str, type[BaseRunner]] = {
    Scenario.PATTERN: PatternRunner,
    Scenario.PHASE_SWEEP: PhaseSweepRunner,
    Scenario.SLIT_DEFECT: SlitDefectRunner,
    Scenario.QUBIT: QubitRunner,
    Scenario.TIMING: TimingRunner,
    Scenario.READOUT: ReadoutRunner,
}


def get_runner(config: ScenarioConfig, seed: int | None = None) -> BaseRunner:
    return RUNNERS[config.scenario](config, seed)


def validate(config: ScenarioConfig) -> list[str]:
    """Every problem that would stop ``config`` from running; empty when it is runnable."""

    return get_runner(config).validate()


def run(config: ScenarioConfig, out=None, seed: int | None = None, force: bool = False) -> RunManifest:
    return get_runner(config, seed).run(out, force)
