import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from decouple import Csv, strtobool

from .exceptions import ScenarioConfigError
from .models import Scenario

REQUIRED = object()


@dataclass(frozen=True)
class Parameter:
    """
    One key a scenario accepts.

    :ivar cast: Turns the raw text into a value; raises ``ValueError`` on bad input.
    :type cast: Callable[[str], Any]
    :ivar default: Value used when the key is absent; :data:`REQUIRED` makes the key mandatory.
    :type default: Any
    """

    cast: Callable[[str], Any]
    default: Any = REQUIRED


def boolean(value: str) -> bool:
    return bool(strtobool(value))


def floats(value: str) -> list[float]:
    return Csv(cast=float)(value)


def phases(value: str) -> list[float]:
    """Comma-separated phases in radians; the token ``pi`` stands for π."""

    return Csv(cast=lambda entry: math.pi if entry.lower() == "pi" else float(entry))(value)


def complexes(value: str) -> list[complex]:
    return Csv(cast=lambda entry: complex(entry.replace(" ", "")))(value)


def one_of(choices: type) -> Callable[[str], str]:
    """Cast to a member of a ``TextChoices`` enumeration."""

    def cast(value: str):
        try:
            return choices(value.strip())
        except ValueError:
            raise ValueError("expected one of {}".format(", ".join(choices.values)))

    return cast


def seed(value: str) -> int:
    number = int(value)
    if not 0 <= number < 2**64:
        raise ValueError("a seed is an integer in [0, 2^64)")

    return number


@dataclass(frozen=True)
class ScenarioConfig:
    """
    A parsed scenario file: one INI section named after the scenario, its keys the parameters.

    Values are kept as text until a runner casts them against its parameter table.

    :ivar scenario: The scenario to run.
    :type scenario: Scenario
    :ivar parameters: Raw parameter values by key.
    :type parameters: Dict[str, str]
    :ivar source: Where the configuration was read from.
    :type source: Str
    """

    scenario: Scenario
    parameters: dict[str, str] = field(default_factory=dict)
    source: str = "<string>"

    def cast(self, schema: dict[str, Parameter]) -> dict[str, Any]:
        """
        Cast every parameter through ``schema``, filling in defaults.

        :raises ScenarioConfigError: Listing every unknown key, missing key and value that does not parse.
        """

        diagnostics = [
            "ScenarioConfig.{}: unknown parameter for the {} scenario".format(key, self.scenario)
            for key in sorted(set(self.parameters) - set(schema))
        ]
        values = {}

        for name, parameter in schema.items():
            if name in self.parameters:
                try:
                    values[name] = parameter.cast(self.parameters[name])
                except (ValueError, TypeError) as e:
                    diagnostics.append("ScenarioConfig.{}: cannot read {!r} ({})".format(name, self.parameters[name], e))

            elif parameter.default is REQUIRED:
                diagnostics.append("ScenarioConfig.{}: missing required parameter".format(name))

            else:
                values[name] = parameter.default

        if diagnostics:
            raise ScenarioConfigError(diagnostics)

        return values

    def to_json_dict(self) -> dict:
        return {"scenario": str(self.scenario), "parameters": dict(sorted(self.parameters.items()))}


def parse_config(text: str, source: str = "<string>") -> ScenarioConfig:
    """
    Read a scenario from INI text.

    Keys are case-sensitive, interpolation is off, and a ``[DEFAULT]`` section is not
    allowed since a file describes exactly one scenario.

    :param text: The file contents.
    :type text: Str
    :param source: Name used in messages and echoed in the manifest.
    :type source: Str
    :return: The scenario and its raw parameters.
    :rtype: ScenarioConfig
    :raises ScenarioConfigError: When the text is not a single known scenario section.
    """

    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str

    try:
        parser.read_string(text, source=source)
    except configparser.Error as e:
        raise ScenarioConfigError("ScenarioConfig: {}".format(" ".join(str(e).split())))

    if parser.defaults():
        raise ScenarioConfigError("ScenarioConfig: a [DEFAULT] section is not allowed")

    sections = parser.sections()
    if len(sections) != 1:
        raise ScenarioConfigError("ScenarioConfig.scenario: expected exactly one scenario section, found {}".format(len(sections)))

    name = sections[0]
    if name not in Scenario.values:
        raise ScenarioConfigError("ScenarioConfig.scenario: unknown scenario {!r}; expected one of {}".format(name, ", ".join(Scenario.values)))

    return ScenarioConfig(Scenario(name), {key: value.strip() for key, value in parser.items(name)}, source)


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)

    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError:
        raise ScenarioConfigError("ScenarioConfig: {} is not UTF-8 text".format(path))

    return parse_config(text, str(path))
