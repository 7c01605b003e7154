import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd
from django.conf import settings
from django.core.exceptions import ValidationError

from GedankenLab import __version__

from ..artifacts import prepare_output_dir, write_artifact
from ..config import Parameter, ScenarioConfig, seed
from ..exceptions import ScenarioConfigError
from ..models import ScenarioRun

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


@contextmanager
def owned_by(owner: str):
    """
    Re-raise validation errors with their fields qualified as ``owner.field``.

    Errors already qualified by an inner block pass through unchanged.
    """

    try:
        yield

    except ValidationError as e:
        if getattr(e, "owner", None):
            raise

        if hasattr(e, "error_dict"):
            error = ValidationError({"{}.{}".format(owner, name): messages for name, messages in e.message_dict.items()})
        else:
            error = ValidationError({owner: e.messages})

        error.owner = owner
        raise error from e


def make(cls: type, **kwargs):
    with owned_by(cls.__name__):
        return cls(**kwargs)


def diagnostics(error: ValidationError) -> list[str]:
    if hasattr(error, "error_dict"):
        return ["{}: {}".format(name, message) for name, messages in error.message_dict.items() for message in messages]

    return [str(message) for message in error.messages]


@dataclass(frozen=True)
class RunManifest:
    """
    What a run did and where it put the results.

    :ivar scenario: The scenario that ran.
    :type scenario: Str
    :ivar config: The configuration as read, echoed back.
    :type config: Dict
    :ivar artifacts: File names written next to the manifest.
    :type artifacts: List[str]
    :ivar version: Version of the lab.
    :type version: Str
    :ivar duration: Wall-clock seconds.
    :type duration: Float
    :ivar seed: The seed in force.
    :type seed: Int
    :ivar output_dir: The run directory.
    :type output_dir: Str
    """

    scenario: str
    config: dict
    artifacts: list[str] = field(default_factory=list)
    version: str = __version__
    duration: float = 0.0
    seed: int = 0
    output_dir: str = ""

    def to_json_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "config": self.config,
            "artifacts": self.artifacts,
            "version": self.version,
            "duration_s": self.duration,
            "seed": self.seed,
            "output_dir": self.output_dir,
        }


class BaseRunner(object):
    """
    Base class for scenario runners.

    A runner declares the parameters its scenario accepts, builds the domain objects
    from them in :meth:`prepare` (which is where every precondition is checked) and
    computes the artifacts in :meth:`execute`. Validation is a :meth:`prepare` that
    stops before anything is computed, so a configuration that validates cleanly does
    not fail on preconditions when run.

    :ivar name: The name identifying the runner.
    :type name: Str
    :ivar scenario: The scenario section the runner handles.
    :type scenario: Str
    :ivar parameters: Keys the scenario accepts besides ``seed`` and ``output``.
    :type parameters: Dict[str, Parameter]
    """

    name: str = "Base Runner"
    scenario: str = ""
    parameters: dict[str, Parameter] = {}

    common_parameters = {"seed": Parameter(seed, None), "output": Parameter(str, None)}

    def __init__(self, config: ScenarioConfig, seed: int | None = None):
        self.config = config
        self.seed_override = seed

    @property
    def schema(self) -> dict[str, Parameter]:
        return self.common_parameters | self.parameters

    def values(self) -> dict:
        """
        The cast parameters, with ``seed`` resolved from the override, the file or ``LAB_DEFAULT_SEED``.

        :raises ScenarioConfigError: When keys are unknown, missing or unreadable.
        """

        values = self.config.cast(self.schema)

        if self.seed_override is not None:
            values["seed"] = self.seed_override
        elif values["seed"] is None:
            values["seed"] = getattr(settings, "LAB_DEFAULT_SEED", 20240601)

        return values

    def prepare(self, values: dict) -> dict:
        """
        Build the domain objects the scenario needs and check every precondition.

        :param values: The cast parameters.
        :type values: Dict
        :return: Whatever :meth:`execute` needs.
        :rtype: Dict
        :raises ValidationError: With fields qualified by the owning type.
        """

        raise NotImplementedError

    def execute(self, prepared: dict) -> dict[str, pd.DataFrame | dict]:
        """
        Compute the scenario's artifacts.

        :param prepared: The output of :meth:`prepare`.
        :type prepared: Dict
        :return: Artifact file names mapped to a table (CSV) or a mapping (JSON).
        :rtype: Dict[str, pd.DataFrame | dict]
        """

        raise NotImplementedError

    def validate(self) -> list[str]:
        try:
            self.prepare(self.values())

        except ScenarioConfigError as e:
            return e.diagnostics

        except ValidationError as e:
            return diagnostics(e)

        return []

    def output_dir(self, values: dict, out: str | Path | None = None) -> Path:
        if out is None:
            out = values["output"]

        if out is None:
            out = Path(getattr(settings, "LAB_OUTPUT_DIR", "runs")) / "{}-{}".format(self.scenario, values["seed"])

        return Path(out)

    def run(self, out: str | Path | None = None, force: bool = False) -> RunManifest:
        """
        Prepare, execute and write the scenario, then record it as a :class:`ScenarioRun`.

        :param out: Run directory, overriding the file's ``output`` and the default.
        :type out: Str | Path | None
        :param force: Whether an existing non-empty run directory may be overwritten.
        :type force: Bool
        :return: The manifest, also written as ``manifest.json``.
        :rtype: RunManifest
        """

        started = time.perf_counter()

        values = self.values()
        prepared = self.prepare(values)
        directory = prepare_output_dir(self.output_dir(values, out), force)

        logger.info("Running the %s scenario (seed %s) into %s", self.scenario, values["seed"], directory)

        artifacts = self.execute(prepared)
        for name, artifact in artifacts.items():
            write_artifact(directory, name, artifact)

        manifest = RunManifest(
            scenario=str(self.scenario),
            config=self.config.to_json_dict(),
            artifacts=list(artifacts),
            duration=time.perf_counter() - started,
            seed=values["seed"],
            output_dir=str(directory),
        )
        write_artifact(directory, MANIFEST_NAME, manifest.to_json_dict())

        ScenarioRun.objects.create(
            scenario=manifest.scenario,
            seed=manifest.seed,
            config=manifest.config,
            artifacts=manifest.artifacts,
            output_dir=manifest.output_dir,
            version=manifest.version,
            duration=manifest.duration,
        )

        logger.info("Finished the %s scenario in %.3f s", self.scenario, manifest.duration)

        return manifest
