import math
from dataclasses import replace

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, override_settings

from .exceptions import AxisMismatchError, DegenerateStateError, GridUnderresolutionError, NormalizationError, UndefinedVisibilityError, UnrecoverablePhaseError
from .grids import GridAxis, check_convergence
from .modes import ModeFunction, ModeLabel, PhaseShift, apply_phase, overlap
from .patterns import DetectionPattern, detection_pattern, fringe_displacement, fringe_phase_shift, visibility
from .states import DEFAULT_COEFFICIENT, EntangledBranchPair, reduced_density, state_norm


def bump(axis: GridAxis, center: float, half_width: float, label: ModeLabel = ModeLabel.FREE) -> ModeFunction:
    """A normalized cos² bump that is exactly zero outside ``center ± half_width``."""

    x = axis.points - center
    samples = np.where(np.abs(x) < half_width, np.cos(np.pi * x / (2 * half_width)) ** 2, 0.0)

    return ModeFunction(axis, samples, label).normalized()


def generic_pair(axis_1: GridAxis, axis_2: GridAxis, c1: complex = 0.6, c2: complex = 0.8j) -> EntangledBranchPair:
    return EntangledBranchPair(
        mode_1a=ModeFunction.gaussian(axis_1, center=-1.0, sigma=1.0, wavenumber=1.5, label=ModeLabel.MODE_1A),
        mode_2d=ModeFunction.gaussian(axis_2, center=0.3, sigma=1.0, wavenumber=0.5, label=ModeLabel.MODE_2D),
        mode_1b=ModeFunction.gaussian(axis_1, center=1.0, sigma=1.2, wavenumber=-1.0, label=ModeLabel.MODE_1B),
        mode_2c=ModeFunction.gaussian(axis_2, center=-0.4, sigma=1.1, label=ModeLabel.MODE_2C),
        c1=c1,
        c2=c2,
    )


def symmetric_pair(separation_2: float, wavenumber: float = 2.0) -> EntangledBranchPair:
    """Particle-1 modes share one wide envelope and differ by ``±k``; ``|I|`` is set by the particle-2 separation."""

    axis_1 = GridAxis(-48.0, 48.0, 9601)
    axis_2 = GridAxis(-15.0, 15.0, 3001)

    return EntangledBranchPair(
        mode_1a=ModeFunction.gaussian(axis_1, sigma=8.0, wavenumber=wavenumber, label=ModeLabel.MODE_1A),
        mode_2d=ModeFunction.gaussian(axis_2, center=-separation_2 / 2, label=ModeLabel.MODE_2D),
        mode_1b=ModeFunction.gaussian(axis_1, sigma=8.0, wavenumber=-wavenumber, label=ModeLabel.MODE_1B),
        mode_2c=ModeFunction.gaussian(axis_2, center=separation_2 / 2, label=ModeLabel.MODE_2C),
    )


def brute_force_wavefunction(pair: EntangledBranchPair, shift: PhaseShift) -> np.ndarray:
    mode_2c = pair.mode_2c.samples * np.exp(1j * shift.phi)

    return pair.c1 * np.outer(pair.mode_1a.samples, pair.mode_2d.samples) + pair.c2 * np.outer(pair.mode_1b.samples, mode_2c)


HALF_OVERLAP_SEPARATION = math.sqrt(8 * math.log(2))


class GridAxisTestCase(SimpleTestCase):
    def test_spacing(self):
        axis = GridAxis(0.0, 1.0, 11)

        self.assertAlmostEqual(axis.spacing, 0.1)
        self.assertEqual(axis.points.shape, (11,))
        self.assertAlmostEqual(float(np.sum(axis.weights)), 1.0)

    def test_invalid_bounds(self):
        with self.assertRaises(ValidationError) as context:
            GridAxis(1.0, 0.0, 10)

        self.assertIn("x_max", context.exception.message_dict)

        with self.assertRaises(ValidationError) as context:
            GridAxis(0.0, 1.0, 1)

        self.assertIn("n_points", context.exception.message_dict)

    def test_integrate_gaussian(self):
        axis = GridAxis(-10.0, 10.0, 2001)

        self.assertAlmostEqual(axis.integrate(np.exp(-(axis.points**2))), math.sqrt(math.pi), delta=1e-12)

    def test_refined_shares_points(self):
        axis = GridAxis(-3.0, 5.0, 81)
        refined = axis.refined()

        self.assertEqual(refined.n_points, 161)
        np.testing.assert_allclose(refined.points[::2], axis.points, atol=1e-12)

    def test_window_mask(self):
        axis = GridAxis(-1.0, 1.0, 21)

        self.assertEqual(int(np.count_nonzero(axis.window_mask(-0.5, 0.5))), 11)

        with self.assertRaises(ValidationError):
            axis.window_mask(0.5, -0.5)

        with self.assertRaises(ValidationError):
            axis.window_mask(-2.0, 0.0)

    def test_check_convergence_passes(self):
        change = check_convergence(lambda axis: axis.integrate(np.exp(-(axis.points**2))), GridAxis(-10.0, 10.0, 401))

        self.assertLess(change, 1e-6)

    def test_check_convergence_detects_underresolution(self):
        with self.assertRaises(GridUnderresolutionError):
            check_convergence(lambda axis: axis.integrate(np.cos(40 * axis.points) ** 2), GridAxis(0.0, 1.0, 11))

    @override_settings(LAB_CONVERGENCE_TOLERANCE=1e-30)
    def test_check_convergence_tolerance_from_settings(self):
        with self.assertRaises(GridUnderresolutionError):
            check_convergence(lambda axis: axis.integrate(np.exp(-(axis.points**2))), GridAxis(-10.0, 10.0, 401))

    def test_detection_pattern_converges(self):
        def evaluate(axis):
            return detection_pattern(generic_pair(axis, GridAxis(-10.0, 10.0, 801)), PhaseShift(0.4)).density

        self.assertLess(check_convergence(evaluate, GridAxis(-12.0, 12.0, 1201)), 1e-6)


class ModeFunctionTestCase(SimpleTestCase):
    def setUp(self):
        self.axis = GridAxis(-12.0, 12.0, 1201)

    def test_gaussian_is_normalized(self):
        mode = ModeFunction.gaussian(self.axis, center=0.5, sigma=0.8, wavenumber=3.0)

        self.assertTrue(mode.is_normalized())
        np.testing.assert_allclose(mode.amplitude**2, np.abs(mode.samples) ** 2)

    def test_zero_mode_rejected(self):
        with self.assertRaises(NormalizationError) as context:
            ModeFunction(self.axis, np.zeros(self.axis.n_points))

        self.assertEqual(context.exception.code, "zero_norm")

        mode = ModeFunction.gaussian(self.axis)
        with self.assertRaises(NormalizationError):
            mode.with_samples(mode.samples * 0)

    def test_non_finite_rejected(self):
        samples = np.ones(self.axis.n_points, dtype=complex)
        samples[3] = np.nan

        with self.assertRaises(ValidationError):
            ModeFunction(self.axis, samples)

    def test_wrong_shape_rejected(self):
        with self.assertRaises(ValidationError):
            ModeFunction(self.axis, np.ones(10))

    def test_samples_are_read_only(self):
        mode = ModeFunction.gaussian(self.axis)

        with self.assertRaises(ValueError):
            mode.samples[0] = 1.0

    def test_to_frame(self):
        frame = ModeFunction.gaussian(self.axis).to_frame()

        self.assertEqual(list(frame.columns), ["x", "re", "im"])
        self.assertEqual(len(frame), self.axis.n_points)


class OverlapTestCase(SimpleTestCase):
    def setUp(self):
        self.axis = GridAxis(-12.0, 12.0, 1201)

    def test_self_overlap(self):
        mode = ModeFunction.gaussian(self.axis, center=0.3, sigma=1.3, wavenumber=-2.0)

        self.assertAlmostEqual(overlap(mode, mode).value, 1 + 0j, delta=1e-9)

    def test_disjoint_supports(self):
        self.assertAlmostEqual(overlap(bump(self.axis, -3.0, 1.0), bump(self.axis, 3.0, 1.0)).value, 0j, delta=1e-12)

    def test_gaussian_overlap_closed_form(self):
        for axis in [self.axis, self.axis.refined()]:
            f = ModeFunction.gaussian(axis, center=-1.0)
            g = ModeFunction.gaussian(axis, center=1.0)

            self.assertAlmostEqual(overlap(f, g).value, math.exp(-0.5), delta=1e-9)

    def test_conjugate_symmetry(self):
        f = ModeFunction.gaussian(self.axis, center=-0.5, wavenumber=1.0)
        g = ModeFunction.gaussian(self.axis, center=0.7, sigma=0.9, wavenumber=-0.4)

        self.assertEqual(overlap(f, g).value, overlap(g, f).value.conjugate())
        self.assertEqual(overlap(f, g).conjugate(), overlap(g, f))

    def test_axis_mismatch(self):
        f = ModeFunction.gaussian(self.axis)
        g = ModeFunction.gaussian(GridAxis(-12.0, 12.0, 601))

        with self.assertRaises(AxisMismatchError):
            overlap(f, g)

    def test_non_normalized_input(self):
        f = ModeFunction.gaussian(self.axis)
        doubled = f.with_samples(2 * f.samples)

        with self.assertRaisesMessage(NormalizationError, "squared norm is 4.0"):
            overlap(f, doubled)

    def test_overlap_bounded(self):
        f = ModeFunction.gaussian(self.axis, center=-0.2, wavenumber=0.3)
        g = ModeFunction.gaussian(self.axis, center=0.2, sigma=2.0)
        value = overlap(f, g)

        self.assertLessEqual(value.modulus, 1 + 1e-9)
        self.assertAlmostEqual(value.phase, math.atan2(value.value.imag, value.value.real))


class PhaseShiftTestCase(SimpleTestCase):
    def setUp(self):
        self.axis = GridAxis(-12.0, 12.0, 1201)
        self.mode_2c = ModeFunction.gaussian(self.axis, center=-0.5, label=ModeLabel.MODE_2C)
        self.mode_2d = ModeFunction.gaussian(self.axis, center=0.5, wavenumber=1.0, label=ModeLabel.MODE_2D)

    def test_zero_phase_is_identity(self):
        np.testing.assert_array_equal(apply_phase(self.mode_2c, PhaseShift(0.0)).samples, self.mode_2c.samples)

    def test_full_turn(self):
        np.testing.assert_allclose(apply_phase(self.mode_2c, PhaseShift(2 * math.pi)).samples, self.mode_2c.samples, atol=1e-12)

    def test_norm_preserved(self):
        shifted = apply_phase(self.mode_2d, PhaseShift(1.234))

        self.assertAlmostEqual(shifted.norm_squared(), self.mode_2d.norm_squared(), delta=1e-12)

    def test_quarter_turn_rotates_overlap(self):
        before = overlap(self.mode_2d, self.mode_2c)
        after = overlap(self.mode_2d, apply_phase(self.mode_2c, PhaseShift(math.pi / 2)))

        self.assertAlmostEqual(after.value, before.value * complex(0, -1), delta=1e-9)
        self.assertAlmostEqual(math.remainder(after.phase - (before.phase - math.pi / 2), 2 * math.pi), 0.0, delta=1e-9)

    def test_non_finite_phase(self):
        with self.assertRaises(ValidationError):
            PhaseShift(float("inf"))

    def test_canonical(self):
        self.assertAlmostEqual(PhaseShift(-0.5).canonical, 2 * math.pi - 0.5)
        self.assertAlmostEqual(PhaseShift(7.0).canonical, 7.0 - 2 * math.pi)
        self.assertEqual(PhaseShift(2 * math.pi).canonical, 0.0)
        self.assertEqual(PhaseShift(-1e-17).canonical, 0.0)


class EntangledBranchPairTestCase(SimpleTestCase):
    def setUp(self):
        self.axis_1 = GridAxis(-12.0, 12.0, 1201)
        self.axis_2 = GridAxis(-10.0, 10.0, 801)

    def test_default_coefficients(self):
        pair = generic_pair(self.axis_1, self.axis_2, DEFAULT_COEFFICIENT, DEFAULT_COEFFICIENT)

        self.assertAlmostEqual(abs(pair.c1) ** 2 + abs(pair.c2) ** 2, 1.0, delta=1e-12)

    def test_unbalanced_coefficients_rejected(self):
        with self.assertRaises(ValidationError) as context:
            generic_pair(self.axis_1, self.axis_2, 0.6, 0.6)

        self.assertIn("c2", context.exception.message_dict)

    def test_axis_mismatch(self):
        pair = generic_pair(self.axis_1, self.axis_2)

        with self.assertRaises(AxisMismatchError):
            replace(pair, mode_1b=ModeFunction.gaussian(GridAxis(-12.0, 12.0, 601)))

    def test_non_normalized_mode_rejected(self):
        pair = generic_pair(self.axis_1, self.axis_2)

        with self.assertRaises(NormalizationError):
            replace(pair, mode_2c=pair.mode_2c.with_samples(0.5 * pair.mode_2c.samples))

    def test_orthogonal_particle_2_modes(self):
        pair = replace(generic_pair(self.axis_1, self.axis_2, DEFAULT_COEFFICIENT, DEFAULT_COEFFICIENT), mode_2c=bump(self.axis_2, -4.0, 1.0), mode_2d=bump(self.axis_2, 4.0, 1.0))

        self.assertAlmostEqual(state_norm(pair), 1.0, delta=1e-12)

    def test_orthogonal_particle_1_modes(self):
        pair = replace(generic_pair(self.axis_1, self.axis_2, DEFAULT_COEFFICIENT, DEFAULT_COEFFICIENT), mode_1a=bump(self.axis_1, -4.0, 1.0), mode_1b=bump(self.axis_1, 4.0, 1.0))

        self.assertEqual(pair.overlap_j.value, 0j)
        self.assertAlmostEqual(state_norm(pair), 1.0, delta=1e-12)

    def test_real_overlaps(self):
        separation = 1.5
        g = math.exp(-(separation**2) / 8)
        pair = EntangledBranchPair(
            mode_1a=ModeFunction.gaussian(self.axis_1, center=-separation / 2),
            mode_2d=ModeFunction.gaussian(self.axis_2, center=-separation / 2),
            mode_1b=ModeFunction.gaussian(self.axis_1, center=separation / 2),
            mode_2c=ModeFunction.gaussian(self.axis_2, center=separation / 2),
        )

        self.assertAlmostEqual(state_norm(pair), math.sqrt(1 + g**2), delta=1e-9)

        psi = brute_force_wavefunction(pair, PhaseShift())
        brute_force = self.axis_1.integrate(self.axis_2.integrate(np.abs(psi) ** 2, axis=1))
        self.assertAlmostEqual(state_norm(pair) ** 2, brute_force, delta=1e-9)

    def test_degenerate_state(self):
        mode_1 = ModeFunction.gaussian(self.axis_1)
        mode_2 = ModeFunction.gaussian(self.axis_2)

        with self.assertRaises(DegenerateStateError):
            EntangledBranchPair(mode_1, mode_2, mode_1, mode_2, c1=DEFAULT_COEFFICIENT, c2=-DEFAULT_COEFFICIENT)


class DetectionPatternTestCase(SimpleTestCase):
    def setUp(self):
        self.axis_1 = GridAxis(-12.0, 12.0, 1201)
        self.axis_2 = GridAxis(-10.0, 10.0, 801)
        self.pair = generic_pair(self.axis_1, self.axis_2)
        self.uncorrelated = replace(self.pair, mode_2c=bump(self.axis_2, -4.0, 1.0), mode_2d=bump(self.axis_2, 4.0, 1.0))

    def test_no_interference_without_overlap(self):
        pattern = detection_pattern(self.uncorrelated, PhaseShift(0.3), normalize=False)
        expected = abs(self.pair.c1) ** 2 * self.pair.mode_1a.amplitude**2 + abs(self.pair.c2) ** 2 * self.pair.mode_1b.amplitude**2

        np.testing.assert_array_equal(pattern.density, expected)

    def test_no_interference_gate_is_bitwise(self):
        reference = detection_pattern(self.uncorrelated, PhaseShift(0.0))

        for phi in [0.7, math.pi, 5.0]:
            np.testing.assert_array_equal(detection_pattern(self.uncorrelated, PhaseShift(phi)).density, reference.density)

    def test_half_turn_negates_interference(self):
        zero = detection_pattern(self.pair, PhaseShift(0.0), normalize=False)
        half_turn = detection_pattern(self.pair, PhaseShift(math.pi), normalize=False)

        np.testing.assert_allclose(half_turn.interference, -zero.interference, rtol=0, atol=1e-12)
        np.testing.assert_array_equal(half_turn.background, zero.background)

    def test_normalized_pattern_integrates_to_one(self):
        for phi in [0.0, 0.7, 2.0, math.pi]:
            pattern = detection_pattern(self.pair, PhaseShift(phi))

            self.assertTrue(pattern.normalized)
            self.assertAlmostEqual(pattern.total(), 1.0, delta=1e-6)
            self.assertGreaterEqual(float(np.min(pattern.density)), 0.0)

    def test_phase_covariance(self):
        for phi in [0.25, 1.9, 4.4]:
            shift = PhaseShift(phi)
            moved = replace(self.pair, mode_2c=apply_phase(self.pair.mode_2c, shift))

            np.testing.assert_allclose(detection_pattern(self.pair, shift).density, detection_pattern(moved, PhaseShift(0.0)).density, rtol=0, atol=1e-12)

    def test_marginal_oracle(self):
        axis = GridAxis(-8.0, 8.0, 128)
        rng = np.random.default_rng(7)

        for _ in range(5):
            angle, relative = rng.uniform(0.2, 1.4), rng.uniform(0, 2 * math.pi)
            modes = [ModeFunction.gaussian(axis, center=rng.uniform(-2, 2), sigma=rng.uniform(0.6, 1.2), wavenumber=rng.uniform(-2, 2)) for _ in range(4)]
            pair = EntangledBranchPair(*modes, c1=math.cos(angle), c2=math.sin(angle) * np.exp(1j * relative))
            shift = PhaseShift(rng.uniform(0, 2 * math.pi))

            psi = brute_force_wavefunction(pair, shift)
            marginal = axis.integrate(np.abs(psi) ** 2, axis=1)
            marginal /= axis.integrate(marginal)

            np.testing.assert_allclose(detection_pattern(pair, shift).density, marginal, rtol=0, atol=1e-6)

    def test_negative_density_rejected(self):
        density = np.zeros(self.axis_1.n_points)
        density[10] = -1e-6

        with self.assertRaises(ValidationError):
            DetectionPattern(self.axis_1, density)

    def test_unnormalized_density_flagged(self):
        with self.assertRaises(ValidationError):
            DetectionPattern(self.axis_1, np.ones(self.axis_1.n_points), normalized=True)

    def test_to_frame(self):
        frame = detection_pattern(self.pair).to_frame()

        self.assertEqual(list(frame.columns), ["x", "density"])


class ReducedDensityTestCase(SimpleTestCase):
    def setUp(self):
        self.axis = GridAxis(-8.0, 8.0, 201)
        self.pair = generic_pair(self.axis, self.axis)

    def test_hermitian_unit_trace(self):
        rho = reduced_density(self.pair, PhaseShift(0.9))

        self.assertTrue(rho.is_hermitian())
        self.assertAlmostEqual(rho.trace(), 1.0, delta=1e-6)
        self.assertGreaterEqual(float(np.min(rho.eigenvalues())), -1e-8)

    def test_diagonal_is_detection_pattern(self):
        shift = PhaseShift(2.2)

        np.testing.assert_allclose(reduced_density(self.pair, shift).diagonal(), detection_pattern(self.pair, shift).density, rtol=0, atol=1e-12)

    def test_product_state(self):
        pair = replace(self.pair, c1=1.0, c2=0.0)
        rho = reduced_density(pair)
        a = pair.mode_1a.samples

        np.testing.assert_allclose(rho.matrix, np.outer(a, a.conj()), rtol=0, atol=1e-12)

        eigenvalues = rho.eigenvalues()
        self.assertAlmostEqual(float(eigenvalues[0]), 1.0, delta=1e-9)
        np.testing.assert_allclose(eigenvalues[1:], 0.0, atol=1e-9)
        self.assertAlmostEqual(rho.purity(), 1.0, delta=1e-9)

    def test_diagonal_mixture(self):
        pair = EntangledBranchPair(bump(self.axis, -3.0, 1.5), bump(self.axis, 3.0, 1.5), bump(self.axis, 3.0, 1.5), bump(self.axis, -3.0, 1.5))
        eigenvalues = reduced_density(pair).eigenvalues()

        np.testing.assert_allclose(eigenvalues[:2], [0.5, 0.5], atol=1e-9)
        np.testing.assert_allclose(eigenvalues[2:], 0.0, atol=1e-9)
        self.assertAlmostEqual(reduced_density(pair).purity(), 0.5, delta=1e-9)

    def test_partial_trace_oracle(self):
        shift = PhaseShift(1.3)
        psi = brute_force_wavefunction(self.pair, shift)
        oracle = (psi * self.axis.weights[None, :]) @ psi.conj().T
        oracle /= self.axis.integrate(oracle.diagonal().real)

        np.testing.assert_allclose(reduced_density(self.pair, shift).matrix, oracle, rtol=0, atol=1e-6)


class VisibilityTestCase(SimpleTestCase):
    window = (-0.8, 0.8)

    def test_full_contrast(self):
        pattern = detection_pattern(symmetric_pair(0.0))

        self.assertAlmostEqual(symmetric_pair(0.0).overlap_i.value, 1 + 0j, delta=1e-9)
        self.assertGreaterEqual(visibility(pattern, self.window), 1 - 1e-3)

    def test_half_contrast(self):
        pair = symmetric_pair(HALF_OVERLAP_SEPARATION)

        self.assertAlmostEqual(pair.overlap_i.modulus, 0.5, delta=1e-9)
        self.assertAlmostEqual(visibility(detection_pattern(pair), self.window), 0.5, delta=1e-2)

    def test_no_fringes(self):
        self.assertLess(visibility(detection_pattern(symmetric_pair(20.0)), self.window), 1e-2)

    def test_undefined_visibility(self):
        axis = GridAxis(-1.0, 1.0, 21)
        density = np.where(axis.points > 0.5, 1.0, 0.0)

        with self.assertRaises(UndefinedVisibilityError):
            visibility(DetectionPattern(axis, density), (-0.5, 0.0))


class FringePhaseShiftTestCase(SimpleTestCase):
    window = (-3.0, 3.0)

    def setUp(self):
        axis_1 = GridAxis(-16.0, 16.0, 1601)
        axis_2 = GridAxis(-10.0, 10.0, 801)
        self.pair = EntangledBranchPair(
            mode_1a=ModeFunction.gaussian(axis_1, center=-0.5, sigma=2.0, wavenumber=1.0),
            mode_2d=ModeFunction.gaussian(axis_2, center=-0.6, wavenumber=0.2),
            mode_1b=ModeFunction.gaussian(axis_1, center=0.5, sigma=2.0, wavenumber=-1.0),
            mode_2c=ModeFunction.gaussian(axis_2, center=0.6),
        )

    def test_identical_patterns(self):
        pattern = detection_pattern(self.pair)

        self.assertAlmostEqual(fringe_phase_shift(pattern, pattern, self.window), 0.0, delta=1e-6)

    def test_recovers_shift(self):
        reference = detection_pattern(self.pair, PhaseShift(0.0))
        shifted = detection_pattern(self.pair, PhaseShift(0.7))

        self.assertAlmostEqual(fringe_phase_shift(reference, shifted, self.window), 0.7, delta=1e-3)

    def test_full_turn(self):
        reference = detection_pattern(self.pair, PhaseShift(0.0))
        shifted = detection_pattern(self.pair, PhaseShift(2 * math.pi))

        self.assertAlmostEqual(fringe_phase_shift(reference, shifted, self.window), 0.0, delta=1e-6)

    def test_large_shift_is_canonical(self):
        reference = detection_pattern(self.pair, PhaseShift(0.0))
        shifted = detection_pattern(self.pair, PhaseShift(-1.0))

        self.assertAlmostEqual(fringe_phase_shift(reference, shifted, self.window), 2 * math.pi - 1.0, delta=1e-3)

    def test_unrecoverable_without_fringes(self):
        pair = symmetric_pair(20.0)

        with self.assertRaises(UnrecoverablePhaseError):
            fringe_phase_shift(detection_pattern(pair), detection_pattern(pair, PhaseShift(0.7)), (-0.8, 0.8))

    def test_plain_density_is_unrecoverable(self):
        pattern = detection_pattern(self.pair)
        plain = DetectionPattern(pattern.axis, pattern.density)

        with self.assertRaises(UnrecoverablePhaseError):
            fringe_phase_shift(plain, pattern, self.window)

        with self.assertRaises(UnrecoverablePhaseError) as context:
            fringe_phase_shift(pattern, plain, self.window)

        self.assertEqual(context.exception.code, "no_decomposition")

    def test_far_field_displacement(self):
        pair = symmetric_pair(HALF_OVERLAP_SEPARATION)
        reference = detection_pattern(pair, PhaseShift(0.0))
        shifted = detection_pattern(pair, PhaseShift(0.7))

        self.assertAlmostEqual(fringe_displacement(reference, shifted, (-0.8, 0.8)), 0.7 / 4.0, delta=1e-4)
