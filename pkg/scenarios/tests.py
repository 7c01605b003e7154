import json
import math
import tempfile
from io import StringIO
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pandas as pd
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, override_settings
from scipy.integrate import trapezoid

from kernels.units import NaturalUnits

from .artifacts import csv_bytes, json_bytes, prepare_output_dir, write_atomic
from .config import complexes, load_config, parse_config, phases, seed
from .exceptions import ScenarioConfigError
from .models import Scenario, ScenarioRun
from .runners import get_runner, run, validate

TIMING = """
[timing]
tau = 1e-3
L = 0.5
N = 7000
"""

UNITARY_QUBIT = """
[qubit]
u2 = 0.7071067811865476, 0.7071067811865476, 0.7071067811865476, -0.7071067811865476
"""


class TemporaryDirectoryMixin:
    def setUp(self):
        super().setUp()
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def write_config(self, text: str, name: str = "scenario.ini") -> Path:
        path = self.root / name
        path.write_text(text, encoding="utf-8")

        return path


class ConfigTestCase(SimpleTestCase):
    def test_parse(self):
        config = parse_config(TIMING)

        self.assertEqual(config.scenario, Scenario.TIMING)
        self.assertEqual(config.parameters, {"tau": "1e-3", "L": "0.5", "N": "7000"})

    def test_unknown_scenario(self):
        with self.assertRaises(ScenarioConfigError) as context:
            parse_config("[teleport]\nx = 1\n")

        self.assertTrue(context.exception.diagnostics[0].startswith("ScenarioConfig.scenario"))

    def test_one_section(self):
        with self.assertRaises(ScenarioConfigError):
            parse_config(TIMING + "\n[qubit]\nalpha = 1\n")

        with self.assertRaises(ScenarioConfigError):
            parse_config("")

    def test_syntax_error(self):
        with self.assertRaises(ScenarioConfigError):
            parse_config("tau = 1\n")

        with self.assertRaises(ScenarioConfigError):
            parse_config("[timing]\ntau = 1\ntau = 2\n")

    def test_default_section_rejected(self):
        with self.assertRaises(ScenarioConfigError):
            parse_config("[DEFAULT]\nseed = 1\n" + TIMING)

    def test_unknown_key(self):
        runner = get_runner(parse_config(TIMING + "bogus = 1\n"))

        with self.assertRaises(ScenarioConfigError) as context:
            runner.values()

        self.assertEqual(context.exception.diagnostics, ["ScenarioConfig.bogus: unknown parameter for the timing scenario"])

    def test_missing_and_unreadable(self):
        runner = get_runner(parse_config("[timing]\ntau = soon\nL = 0.5\n"))

        with self.assertRaises(ScenarioConfigError) as context:
            runner.values()

        self.assertEqual(sorted(d.split(":")[0] for d in context.exception.diagnostics), ["ScenarioConfig.N", "ScenarioConfig.tau"])

    def test_casts(self):
        self.assertEqual(phases("0, 0.7, pi"), [0.0, 0.7, math.pi])
        self.assertEqual(complexes("1, 0.5+0.5j, -1j"), [1, 0.5 + 0.5j, -1j])
        self.assertEqual(seed("18446744073709551615"), 2**64 - 1)

        with self.assertRaises(ValueError):
            seed("-1")

    @override_settings(LAB_DEFAULT_SEED=99)
    def test_seed_resolution(self):
        self.assertEqual(get_runner(parse_config(TIMING)).values()["seed"], 99)
        self.assertEqual(get_runner(parse_config(TIMING + "seed = 4\n")).values()["seed"], 4)
        self.assertEqual(get_runner(parse_config(TIMING + "seed = 4\n"), seed=7).values()["seed"], 7)


class ArtifactsTestCase(TemporaryDirectoryMixin, SimpleTestCase):
    def test_csv_format(self):
        frame = pd.DataFrame({"a": [0.1, 1 / 3], "n": [1, 2]})

        self.assertEqual(csv_bytes(frame), b"a,n\n0.10000000000000001,1\n0.33333333333333331,2\n")

    def test_json_format(self):
        data = {"b": np.float64(0.1), "a": 1 + 2j, "c": np.arange(2)}

        self.assertEqual(json_bytes(data), b'{\n  "a": {\n    "im": 2,\n    "re": 1\n  },\n  "b": 0.10000000000000001,\n  "c": [\n    0,\n    1\n  ]\n}\n')
        self.assertEqual(json_bytes({"x": (1 / 3, "pi")}), b'{\n  "x": [\n    0.33333333333333331,\n    "pi"\n  ]\n}\n')
        self.assertEqual(json.loads(json_bytes({"v": 0.1, "w": -2.5e-300})), {"v": 0.1, "w": -2.5e-300})

    def test_atomic_write(self):
        path = write_atomic(self.root / "out.json", b"{}\n")

        self.assertEqual(path.read_bytes(), b"{}\n")
        self.assertEqual([p.name for p in self.root.iterdir()], ["out.json"])

    def test_refuses_to_overwrite(self):
        directory = prepare_output_dir(self.root / "run")
        (directory / "manifest.json").write_text("{}")

        with self.assertRaises(FileExistsError):
            prepare_output_dir(directory)

        self.assertEqual(prepare_output_dir(directory, force=True), directory)


class ValidateTestCase(SimpleTestCase):
    def test_well_formed_pattern(self):
        self.assertEqual(validate(parse_config("[pattern]\nphi = 0.7\n")), [])

    def test_slit_half_width(self):
        problems = validate(parse_config("[slit-defect]\nb = 1.0, -1.0\n"))

        self.assertEqual(len(problems), 1)
        self.assertTrue(problems[0].startswith("SlitGeometry.b: "))

    def test_timing_tau(self):
        problems = validate(parse_config("[timing]\ntau = 0\nL = 0.5\nN = 7000\n"))

        self.assertEqual(len(problems), 1)
        self.assertTrue(problems[0].startswith("TimingScenario.tau: "))

    def test_unreadable_phase(self):
        problems = validate(parse_config("[readout]\nx2_min = -30\nx2_max = 30\nn2_points = 6001\nseparation = 40\n"))

        self.assertEqual(len(problems), 1)
        self.assertTrue(problems[0].startswith("ReadoutExperiment: "))

    def test_kernel_axis_too_narrow(self):
        problems = validate(parse_config("[pattern]\nmodes = kernel\n"))

        self.assertEqual(len(problems), 1)
        self.assertTrue(problems[0].startswith("GridAxis: "))

    def test_qubit_forms(self):
        self.assertEqual(validate(parse_config(UNITARY_QUBIT)), [])
        self.assertEqual(validate(parse_config("[qubit]\nalpha = 1\ndelta = 0.25\n")), [])
        self.assertEqual(validate(parse_config("[qubit]\nswitch_time = 1\nalpha0 = -0.5\ntimes = 0, 1, 2\n")), [])

        self.assertTrue(validate(parse_config("[qubit]\nu2 = 1, 0, 0, 1\nalpha = 1\n"))[0].startswith("ScenarioConfig."))
        self.assertTrue(validate(parse_config("[qubit]\nalpha = 1\nbeta = 2\ngamma = 2\n"))[0].startswith("GramMatrix."))
        self.assertTrue(validate(parse_config("[qubit]\nu1 = 1, 0, 0, 0.5\nu2 = 1, 0, 0, 1\n"))[0].startswith("EvolutionMap2.matrix"))

    def test_phase_sweep_window(self):
        self.assertTrue(validate(parse_config("[phase-sweep]\nwindow = 2, 1\n"))[0].startswith("DetectionPattern.window"))

    def test_sample_configs(self):
        for path in sorted((Path(settings.BASE_DIR) / "configs").glob("*.ini")):
            with self.subTest(config=path.name):
                self.assertEqual(validate(load_config(path)), [])


class RunTestCase(TemporaryDirectoryMixin, TestCase):
    def read_csv(self, manifest, name: str) -> pd.DataFrame:
        return pd.read_csv(Path(manifest.output_dir) / name)

    def read_json(self, manifest, name: str) -> dict:
        return json.loads((Path(manifest.output_dir) / name).read_text(encoding="utf-8"))

    def test_unitary_qubit(self):
        manifest = run(parse_config(UNITARY_QUBIT), out=self.root / "qubit")
        row = self.read_csv(manifest, "qubit.csv").iloc[0]

        self.assertEqual(manifest.artifacts, ["qubit.csv"])
        for column in ["p_plus", "p_minus", "oracle_p_plus", "oracle_p_minus"]:
            self.assertAlmostEqual(row[column], 0.5, delta=1e-12)
        self.assertAlmostEqual(row["deviation"], 0.0, delta=1e-12)

    def test_time_switch(self):
        config = parse_config("[qubit]\nswitch_time = 1\nalpha0 = -0.5\ntimes = 0, 1, 2\n")
        frame = self.read_csv(run(config, out=self.root / "switch"), "qubit.csv")

        self.assertEqual(list(frame.columns), ["t", "p_plus", "p_minus", "deviation", "oracle_p_plus", "oracle_p_minus"])
        np.testing.assert_allclose(frame["p_minus"], [0.5, 0.125, 0.125], rtol=0, atol=1e-12)
        np.testing.assert_allclose(frame["oracle_p_minus"], frame["p_minus"], rtol=0, atol=1e-12)

    def test_timing(self):
        manifest = run(parse_config(TIMING), out=self.root / "timing")
        report = self.read_json(manifest, "timing.json")

        self.assertEqual(sorted(report), ["feasible", "margin", "threshold_s"])
        self.assertAlmostEqual(report["threshold_s"] / 2.38e-13, 1.0, delta=0.01)
        self.assertFalse(report["feasible"])

    def test_phase_sweep(self):
        manifest = run(parse_config("[phase-sweep]\nphis = 0, 0.7, pi\n"), out=self.root / "sweep")
        frame = self.read_csv(manifest, "phase_sweep.csv")

        for phi, recovered in zip(frame["phi"], frame["recovered"]):
            self.assertLessEqual(abs(math.remainder(recovered - phi, 2 * math.pi)), 1e-3)

    def test_pattern(self):
        manifest = run(parse_config("[pattern]\nphi = 0.7\nseparation = 2.0\n"), out=self.root / "pattern")
        frame = self.read_csv(manifest, "pattern.csv")
        summary = self.read_json(manifest, "pattern.json")

        self.assertEqual(list(frame.columns), ["x", "density", "background", "interference"])
        self.assertAlmostEqual(trapezoid(frame["density"], frame["x"]), 1.0, delta=1e-6)
        self.assertAlmostEqual(summary["total"], 1.0, delta=1e-6)
        self.assertAlmostEqual(math.hypot(summary["overlap_i"]["re"], summary["overlap_i"]["im"]), math.exp(-0.5), delta=1e-9)

        self.assertEqual(
            manifest.artifacts, ["pattern.csv", "pattern.json", "mode_1a.csv", "mode_1b.csv", "mode_2c.csv", "mode_2d.csv"]
        )

        mode = self.read_csv(manifest, "mode_2c.csv")
        self.assertEqual(list(mode.columns), ["x", "re", "im"])
        self.assertEqual(len(mode), 3001)
        self.assertAlmostEqual(trapezoid(mode["re"] ** 2 + mode["im"] ** 2, mode["x"]), 1.0, delta=1e-9)
        self.assertAlmostEqual(mode["x"][mode["re"].idxmax()], 1.0, delta=1e-9)

    def test_slit_defect(self):
        frame = self.read_csv(run(parse_config("[slit-defect]\nb = 0.5, 2.0, 16.0\n"), out=self.root / "natural"), "slit_defect.csv")

        self.assertEqual(list(frame.columns), ["b", "transmitted", "output_norm2", "defect"])
        self.assertTrue(np.all(np.diff(frame["defect"]) <= 0))
        self.assertLessEqual(frame["defect"].iloc[-1], 1e-5)
        self.assertTrue(np.all((frame["transmitted"] > 0) & (frame["transmitted"] <= 1)))

    def test_slit_defect_si_units(self):
        units = NaturalUnits(length_scale=1e-6)
        natural = self.read_csv(run(parse_config("[slit-defect]\nb = 0.5, 2.0\n"), out=self.root / "natural"), "slit_defect.csv")

        si = parse_config(
            "[slit-defect]\nunits = si\nlength_scale = 1e-6\n"
            f"x_min = {units.to_meters(-20.0)!r}\nx_max = {units.to_meters(20.0)!r}\nsigma = {units.to_meters(1.0)!r}\n"
            f"t_c = {units.to_seconds(1.0)!r}\nt_f = {units.to_seconds(2.0)!r}\n"
            f"b = {units.to_meters(0.5)!r}, {units.to_meters(2.0)!r}\n"
        )
        frame = self.read_csv(run(si, out=self.root / "si"), "slit_defect.csv")

        np.testing.assert_allclose(frame["b"], [5e-7, 2e-6], rtol=1e-12)
        np.testing.assert_allclose(frame["defect"], natural["defect"], rtol=0, atol=1e-9)

    @override_settings(LAB_MONTE_CARLO_TRIALS=500)
    def test_readout(self):
        manifest = run(parse_config("[readout]\nconfidence = 0.9\nseed = 12\n"), out=self.root / "readout")
        trace = self.read_csv(manifest, "readout.csv")
        summary = self.read_json(manifest, "readout.json")

        self.assertEqual(list(trace.columns), ["N", "accuracy_phi0", "accuracy_phipi"])
        self.assertEqual(summary["seed"], 12)
        self.assertEqual(summary["evaluations"], len(trace))
        self.assertIn(summary["required_N"], list(trace["N"]))

    def test_byte_identical_outputs(self):
        for text, name in [(UNITARY_QUBIT, "qubit.csv"), (TIMING, "timing.json")]:
            first = run(parse_config(text), out=self.root / "first", seed=3, force=True)
            second = run(parse_config(text), out=self.root / "second", seed=3, force=True)

            self.assertEqual((Path(first.output_dir) / name).read_bytes(), (Path(second.output_dir) / name).read_bytes())

    def test_manifest_and_record(self):
        manifest = run(parse_config(TIMING), out=self.root / "timing", seed=8)
        written = self.read_json(manifest, "manifest.json")

        self.assertEqual(written["seed"], 8)
        self.assertEqual(written["artifacts"], ["timing.json"])
        self.assertEqual(written["config"], {"scenario": "timing", "parameters": {"L": "0.5", "N": "7000", "tau": "1e-3"}})

        record = ScenarioRun.objects.get()
        self.assertEqual(record.scenario, Scenario.TIMING)
        self.assertEqual(int(record.seed), 8)
        self.assertEqual(record.artifacts, ["timing.json"])

    def test_default_output_dir(self):
        with override_settings(LAB_OUTPUT_DIR=str(self.root)):
            manifest = run(parse_config(TIMING), seed=21)

        self.assertEqual(Path(manifest.output_dir), self.root / "timing-21")

    def test_refuses_to_overwrite(self):
        run(parse_config(TIMING), out=self.root / "timing")

        with self.assertRaises(FileExistsError):
            run(parse_config(TIMING), out=self.root / "timing")

        run(parse_config(TIMING), out=self.root / "timing", force=True)
        self.assertEqual(ScenarioRun.objects.count(), 2)

    @patch("scenarios.runners.base.write_artifact", side_effect=PermissionError("read-only"))
    def test_failed_write_is_not_recorded(self, mock_write_artifact):
        with self.assertRaises(PermissionError):
            run(parse_config(TIMING), out=self.root / "timing")

        mock_write_artifact.assert_called_once()
        self.assertFalse(ScenarioRun.objects.exists())


class CommandTestCase(TemporaryDirectoryMixin, TestCase):
    def call(self, *args, **kwargs):
        stdout, stderr = StringIO(), StringIO()
        call_command(*args, stdout=stdout, stderr=stderr, **kwargs)

        return stdout.getvalue()

    def assertExitCode(self, code: int, *args, **kwargs):
        with self.assertRaises(CommandError) as context:
            self.call(*args, **kwargs)

        self.assertEqual(context.exception.returncode, code)

    def test_run(self):
        output = self.call("runscenario", str(self.write_config(TIMING)), out=str(self.root / "run"), seed=5)

        self.assertIn("Reading configuration ", output)
        self.assertIn(" done", output)
        self.assertIn("timing.json", output)
        self.assertTrue((self.root / "run" / "manifest.json").exists())

    def test_config_error(self):
        self.assertExitCode(2, "runscenario", str(self.write_config("[timing]\ntau = 1\nL = 1\nN = 1\nfoo = 2\n")), out=str(self.root / "run"))

    def test_precondition_error(self):
        self.assertExitCode(3, "runscenario", str(self.write_config("[timing]\ntau = -1\nL = 1\nN = 1\n")), out=str(self.root / "run"))

    def test_undecodable_config(self):
        path = self.root / "scenario.ini"
        path.write_bytes(b"[timing]\ntau = \xff\n")

        self.assertExitCode(2, "runscenario", str(path), out=str(self.root / "run"))
        self.assertExitCode(2, "validatescenario", str(path))

    @patch("scenarios.management.commands.runscenario.get_runner", wraps=get_runner)
    def test_seed_option(self, mock_get_runner):
        self.call("runscenario", str(self.write_config(TIMING)), out=str(self.root / "run"), seed=11)

        self.assertEqual(mock_get_runner.call_args.args[1], 11)
        self.assertEqual(int(ScenarioRun.objects.get().seed), 11)

    def test_io_error(self):
        self.assertExitCode(4, "runscenario", str(self.root / "missing.ini"))

        path = self.write_config(TIMING)
        self.call("runscenario", str(path), out=str(self.root / "run"))
        self.assertExitCode(4, "runscenario", str(path), out=str(self.root / "run"))
        self.call("runscenario", str(path), out=str(self.root / "run"), force=True)

    def test_validate(self):
        self.assertIn("runnable timing scenario", self.call("validatescenario", str(self.write_config(TIMING))))

        self.assertExitCode(3, "validatescenario", str(self.write_config("[timing]\ntau = 0\nL = 1\nN = 1\n")))
        self.assertExitCode(2, "validatescenario", str(self.write_config("[timing]\ntau = 1\nL = 1\nN = 1\nfoo = 2\n")))
        self.assertExitCode(2, "validatescenario", str(self.write_config("[timing\n")))
