from ...config import load_config
from ...runners import validate
from ..base import CONFIG_EXIT_CODE, PRECONDITION_EXIT_CODE, ScenarioCommand


class Command(ScenarioCommand):
    help = "Check a scenario file without running it."

    def add_arguments(self, parser):
        parser.add_argument("config", type=str, help="Path to the scenario file.")

    def handle(self, *args, **options):
        self.stdout.write("\nValidating scenario ...")
        self.steps("Reading configuration", "Checking parameters")

        config = self.step("Reading configuration", load_config, options["config"])
        self.begin("Checking parameters")
        problems = validate(config)

        if problems:
            parse_level = any(problem.startswith("ScenarioConfig") for problem in problems)
            self.fail(problems, CONFIG_EXIT_CODE if parse_level else PRECONDITION_EXIT_CODE)

        self.stdout.write(self.style.SUCCESS(" done"))

        self.stdout.write(self.style.SUCCESS(f"\n{config.source} is a runnable {config.scenario} scenario."))
