from pathlib import Path

from ...config import load_config, seed
from ...runners import get_runner
from ..base import ScenarioCommand


class Command(ScenarioCommand):
    help = "Run a scenario file and write its artifacts and manifest into a run directory."

    def add_arguments(self, parser):
        parser.add_argument("config", type=str, help="Path to the scenario file.")
        parser.add_argument("--out", type=str, default=None, help="Run directory. Default is LAB_OUTPUT_DIR/<scenario>-<seed>.")
        parser.add_argument("--seed", type=seed, default=None, help="64-bit seed, overriding the file and LAB_DEFAULT_SEED.")
        parser.add_argument("--force", action="store_true", help="Overwrite a non-empty run directory.")

    def handle(self, *args, **options):
        self.stdout.write("\nRunning scenario ...")
        self.steps("Reading configuration")

        config = self.step("Reading configuration", load_config, options["config"])
        runner = get_runner(config, options["seed"])

        self.steps("Reading configuration", runner.name)
        manifest = self.step(runner.name, runner.run, options["out"], options["force"])

        for name in manifest.artifacts:
            self.stdout.write(f"    {Path(manifest.output_dir) / name}")

        self.stdout.write(self.style.SUCCESS(f"\nFinished in {manifest.duration:.3f} s (seed {manifest.seed})."))
