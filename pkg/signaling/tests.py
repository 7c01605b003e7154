import math
from dataclasses import replace

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, override_settings

from entanglement.grids import GridAxis
from entanglement.modes import ModeFunction, ModeLabel, PhaseShift
from entanglement.patterns import detection_pattern
from entanglement.states import EntangledBranchPair

from .exceptions import BudgetExceededError, UnreadablePhaseError
from .readout import ReadoutExperiment, Symbol, readout_accuracy, required_N, simulate_readout
from .streams import CounterStream
from .timing import SPEED_OF_LIGHT, TimingReport, TimingScenario, evaluate, threshold_tau

AXIS_1 = GridAxis(-24.0, 24.0, 4801)
AXIS_2 = GridAxis(-30.0, 30.0, 6001)


def fringe_experiment(separation_2: float, **kwargs) -> ReadoutExperiment:
    """
    Readout patterns with visibility ``exp(-d²/8)`` set by the particle-2 separation ``d``.

    Particle-1 modes share one envelope and carry wavenumbers ``±2``, so the fringes
    have period π/2.
    """

    pair = EntangledBranchPair(
        mode_1a=ModeFunction.gaussian(AXIS_1, sigma=4.0, wavenumber=2.0, label=ModeLabel.MODE_1A),
        mode_2d=ModeFunction.gaussian(AXIS_2, center=-separation_2 / 2, label=ModeLabel.MODE_2D),
        mode_1b=ModeFunction.gaussian(AXIS_1, sigma=4.0, wavenumber=-2.0, label=ModeLabel.MODE_1B),
        mode_2c=ModeFunction.gaussian(AXIS_2, center=separation_2 / 2, label=ModeLabel.MODE_2C),
    )

    return ReadoutExperiment(detection_pattern(pair, PhaseShift(0.0)), detection_pattern(pair, PhaseShift(math.pi)), **kwargs)


FULL_VISIBILITY = 0.0
HALF_VISIBILITY = math.sqrt(8 * math.log(2))
NO_VISIBILITY = 40.0


class ThresholdTestCase(SimpleTestCase):
    def test_typical_values(self):
        threshold = threshold_tau(0.5, 7000, 2.998e8)

        self.assertGreaterEqual(threshold, 2.3e-13)
        self.assertLessEqual(threshold, 2.5e-13)

    def test_default_speed_of_light(self):
        self.assertEqual(SPEED_OF_LIGHT, 299792458.0)
        self.assertEqual(threshold_tau(SPEED_OF_LIGHT, 1), 1.0)

    def test_doubling_n_halves(self):
        self.assertEqual(threshold_tau(0.5, 14000), threshold_tau(0.5, 7000) / 2)

    def test_invalid_inputs(self):
        for kwargs, field in [({"L": 0.0, "N": 1}, "L"), ({"L": 1.0, "N": 0}, "N"), ({"L": 1.0, "N": 1, "c": -1.0}, "c"), ({"L": 1.0, "N": 1.5}, "N")]:
            with self.subTest(field=field):
                with self.assertRaises(ValidationError) as context:
                    threshold_tau(**kwargs)

                self.assertIn(field, context.exception.message_dict)


class TimingScenarioTestCase(SimpleTestCase):
    def test_slow_source(self):
        report = evaluate(TimingScenario(tau=1e-3, L=0.5, N=7000))

        self.assertFalse(report.feasible)
        self.assertAlmostEqual(report.margin / 4.2e9, 1.0, delta=0.01)

    def test_strict_boundary(self):
        scenario = TimingScenario(tau=1.0, L=0.5, N=7000)
        at_threshold = evaluate(replace(scenario, tau=scenario.threshold))
        below = evaluate(replace(scenario, tau=scenario.threshold / 2))

        self.assertFalse(at_threshold.feasible)
        self.assertEqual(at_threshold.margin, 1.0)
        self.assertTrue(below.feasible)
        self.assertEqual(below.margin, 0.5)

    def test_scale_invariance(self):
        base = evaluate(TimingScenario(tau=1e-13, L=0.5, N=7000))

        for k in [1e-3, 0.5, 7.0, 1e6]:
            scaled = evaluate(TimingScenario(tau=1e-13, L=0.5 * k, N=7000, c=SPEED_OF_LIGHT * k))

            self.assertAlmostEqual(scaled.threshold / base.threshold, 1.0, delta=1e-12)
            self.assertEqual(scaled.feasible, base.feasible)

    def test_feasibility_monotone(self):
        scenario = TimingScenario(tau=2e-13, L=0.5, N=7000)

        self.assertTrue(evaluate(scenario).feasible)

        for factor in [0.9, 0.5, 1e-3]:
            self.assertTrue(evaluate(replace(scenario, tau=scenario.tau * factor)).feasible)

    def test_arrival_window(self):
        self.assertEqual(TimingScenario(tau=1e-3, L=0.5, N=7000).arrival_window, 7.0)

    def test_invalid_tau(self):
        with self.assertRaises(ValidationError) as context:
            TimingScenario(tau=0.0, L=0.5, N=7000)

        self.assertEqual(list(context.exception.message_dict), ["tau"])

    def test_report_consistency(self):
        self.assertEqual(TimingReport(1.0, True, 0.5).to_json_dict(), {"threshold_s": 1.0, "feasible": True, "margin": 0.5})

        with self.assertRaises(ValidationError):
            TimingReport(1.0, True, 1.0)


class CounterStreamTestCase(SimpleTestCase):
    def test_deterministic(self):
        np.testing.assert_array_equal(CounterStream(7).uniforms(4, 5), CounterStream(7).uniforms(4, 5))

    def test_draws_independent_of_length(self):
        stream = CounterStream(7)

        np.testing.assert_array_equal(stream.uniforms(3, 5), stream.uniforms(3, 10)[:, :5])

    def test_trials_addressable(self):
        stream = CounterStream(7)

        np.testing.assert_array_equal(stream.uniforms(2, 4, first_trial=1), stream.uniforms(3, 4)[1:])

    def test_seeds_differ(self):
        self.assertFalse(np.array_equal(CounterStream(7).uniforms(1, 8), CounterStream(8).uniforms(1, 8)))

    def test_uniform_range(self):
        values = CounterStream(2**64 - 1).uniforms(10, 100)

        self.assertTrue(np.all((values >= 0) & (values < 1)))

    def test_invalid_seed(self):
        for seed in [-1, 2**64, 1.5]:
            with self.assertRaises(ValidationError):
                CounterStream(seed)


class ReadoutExperimentTestCase(SimpleTestCase):
    @override_settings(LAB_DEFAULT_SEED=11)
    def test_default_seed(self):
        self.assertEqual(fringe_experiment(FULL_VISIBILITY).seed, 11)

    def test_invalid_confidence(self):
        for confidence in [0.5, 1.0, 1.2]:
            with self.assertRaises(ValidationError) as context:
                fringe_experiment(FULL_VISIBILITY, confidence=confidence)

            self.assertIn("confidence", context.exception.message_dict)

    def test_requires_normalized_patterns(self):
        experiment = fringe_experiment(FULL_VISIBILITY)
        unnormalized = replace(experiment.pattern_zero, normalized=False)

        with self.assertRaises(ValidationError) as context:
            ReadoutExperiment(unnormalized, experiment.pattern_pi)

        self.assertIn("pattern_zero", context.exception.message_dict)

    def test_symbol_from_phase(self):
        self.assertEqual(Symbol.from_phase(0.0), Symbol.ZERO)
        self.assertEqual(Symbol.from_phase(math.pi), Symbol.PI)
        self.assertEqual(Symbol.from_phase(3 * math.pi), Symbol.PI)
        self.assertEqual(Symbol.from_phase("pi"), Symbol.PI)

        with self.assertRaises(ValidationError):
            Symbol.from_phase(0.7)

    def test_samples_follow_pattern(self):
        experiment = fringe_experiment(FULL_VISIBILITY)
        positions = experiment.sample(Symbol.ZERO, experiment.stream.uniforms(1, 20000)[0])

        # φ = 0 puts the bright fringes at cos(4x) = 1 and dark ones at cos(4x) = −1.
        self.assertGreater(float(np.mean(np.cos(4 * positions))), 0.4)


class SimulateReadoutTestCase(SimpleTestCase):
    def test_full_visibility(self):
        experiment = fringe_experiment(FULL_VISIBILITY)

        for symbol in Symbol:
            self.assertEqual(simulate_readout(experiment, symbol, 1000), symbol)

        self.assertEqual(simulate_readout(experiment, math.pi, 1000), Symbol.PI)

    def test_no_visibility(self):
        experiment = fringe_experiment(NO_VISIBILITY)

        with self.assertRaises(UnreadablePhaseError):
            simulate_readout(experiment, Symbol.ZERO, 10)

        with self.assertRaises(UnreadablePhaseError):
            required_N(experiment)

    def test_label_swap(self):
        experiment = fringe_experiment(HALF_VISIBILITY)
        swapped = ReadoutExperiment(experiment.pattern_pi, experiment.pattern_zero, seed=experiment.seed)

        for trial in range(50):
            for n in [1, 3, 10]:
                decoded = simulate_readout(experiment, Symbol.ZERO, n, trial)
                decoded_swapped = simulate_readout(swapped, Symbol.PI, n, trial)

                self.assertEqual(decoded == Symbol.ZERO, decoded_swapped == Symbol.PI)

    def test_deterministic(self):
        experiment = fringe_experiment(HALF_VISIBILITY, seed=3)

        decisions = [simulate_readout(experiment, Symbol.PI, 5, trial) for trial in range(20)]

        self.assertEqual(decisions, [simulate_readout(fringe_experiment(HALF_VISIBILITY, seed=3), Symbol.PI, 5, trial) for trial in range(20)])


class ReadoutAccuracyTestCase(SimpleTestCase):
    def test_full_visibility_large_n(self):
        accuracy_zero, accuracy_pi = readout_accuracy(fringe_experiment(FULL_VISIBILITY), 1000, trials=10_000)

        self.assertGreaterEqual(accuracy_zero, 0.999)
        self.assertGreaterEqual(accuracy_pi, 0.999)

    def test_estimator_sanity(self):
        accuracy_zero, accuracy_pi = readout_accuracy(fringe_experiment(HALF_VISIBILITY), 10_000, trials=1000)

        self.assertGreaterEqual(accuracy_zero, 0.9999)
        self.assertGreaterEqual(accuracy_pi, 0.9999)

    @override_settings(LAB_MONTE_CARLO_TRIALS=500)
    def test_trials_setting(self):
        accuracy_zero, _ = readout_accuracy(fringe_experiment(HALF_VISIBILITY), 1)

        # Counts over 500 trials are multiples of 1/500.
        self.assertAlmostEqual(accuracy_zero * 500, round(accuracy_zero * 500), delta=1e-9)

    def test_invalid_n(self):
        with self.assertRaises(ValidationError):
            readout_accuracy(fringe_experiment(FULL_VISIBILITY), 0)


class RequiredNTestCase(SimpleTestCase):
    def test_full_visibility_small(self):
        search = required_N(fringe_experiment(FULL_VISIBILITY, seed=20240601), trials=10_000)

        self.assertEqual(search.N, 7)
        self.assertEqual(
            [(point.N, round(point.accuracy_phi0 * 10_000), round(point.accuracy_phipi * 10_000)) for point in search.trace],
            [(1, 8157, 8128), (2, 8984, 9056), (4, 9666, 9708), (8, 9953, 9969), (6, 9891, 9893), (7, 9923, 9939)],
        )

    def test_halving_visibility_costs_particles(self):
        full = required_N(fringe_experiment(FULL_VISIBILITY), trials=10_000)
        half = required_N(fringe_experiment(HALF_VISIBILITY), trials=10_000)

        self.assertLess(full.N, half.N)

    def test_higher_confidence(self):
        experiment = fringe_experiment(FULL_VISIBILITY)

        self.assertGreaterEqual(required_N(replace(experiment, confidence=0.999), trials=10_000).N, required_N(experiment, trials=10_000).N)

    def test_deterministic(self):
        first = required_N(fringe_experiment(HALF_VISIBILITY, seed=5), trials=2000)
        second = required_N(fringe_experiment(HALF_VISIBILITY, seed=5), trials=2000)

        self.assertEqual(first, second)
        self.assertEqual(list(first.to_frame().columns), ["N", "accuracy_phi0", "accuracy_phipi"])

    def test_budget_exceeded(self):
        with self.assertRaises(BudgetExceededError) as context:
            required_N(fringe_experiment(7.0, max_N=4), trials=1000)

        self.assertGreater(context.exception.best_accuracy, 0.0)
        self.assertLess(context.exception.best_accuracy, 0.99)
        self.assertEqual(context.exception.trace[-1].N, 4)
