from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from ..exceptions import ScenarioConfigError
from ..runners.base import diagnostics

CONFIG_EXIT_CODE = 2
PRECONDITION_EXIT_CODE = 3
IO_EXIT_CODE = 4


class ScenarioCommand(BaseCommand):
    """Prints each step with dotted padding and maps failures to exit codes: configuration 2, precondition 3, I/O 4."""

    dots_padding = 3

    def steps(self, *labels: str) -> None:
        self.total_width = max(len(label) for label in labels) + self.dots_padding

    def begin(self, label: str) -> None:
        dots_needed = self.total_width - len(label)
        self.stdout.write("  - " + f"{label} {"." * dots_needed}", ending="")

    def step(self, label: str, func, *args, **kwargs):
        self.begin(label)

        try:
            result = func(*args, **kwargs)

        except ScenarioConfigError as e:
            self.fail(e.diagnostics, CONFIG_EXIT_CODE)

        except ValidationError as e:
            self.fail(diagnostics(e), PRECONDITION_EXIT_CODE)

        except OSError as e:
            self.fail([str(e)], IO_EXIT_CODE)

        self.stdout.write(self.style.SUCCESS(" done"))

        return result

    def fail(self, messages: list[str], returncode: int):
        self.stdout.write(self.style.ERROR(" failed"))

        for message in messages:
            self.stderr.write(f"    {message}")

        raise CommandError(messages[0] if len(messages) == 1 else f"{len(messages)} problems", returncode=returncode)
