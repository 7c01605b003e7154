import cmath
import math

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, override_settings
from scipy import constants
from scipy.linalg import eigvalsh
from scipy.signal import find_peaks
from scipy.special import erfinv

from entanglement.grids import GridAxis
from entanglement.modes import ModeFunction, ModeLabel

from .exceptions import GridUnderresolutionError, SlitGeometryError, TimeOrderError
from .params import GaussianPacket, KernelParams, Segment, SlitGeometry, SlitProfile
from .propagation import (
    PropagationMethod,
    check_slit_setup,
    conservation_operator,
    double_slit_modes,
    free_kernel_value,
    propagate_free,
    propagate_mode,
    propagate_slit,
    unitarity_defect,
)
from .units import NaturalUnits


def centroid(mode: ModeFunction) -> float:
    density = np.abs(mode.samples) ** 2
    return mode.axis.integrate(mode.axis.points * density) / mode.axis.integrate(density)


def spread(mode: ModeFunction) -> float:
    density = np.abs(mode.samples) ** 2
    mean = centroid(mode)
    return math.sqrt(mode.axis.integrate((mode.axis.points - mean) ** 2 * density) / mode.axis.integrate(density))


class KernelParamsTestCase(SimpleTestCase):
    def test_durations(self):
        params = KernelParams(t_i=0.5, t_c=1.25, t_f=3.0)

        self.assertAlmostEqual(params.duration(Segment.INITIAL_TO_SCREEN), 0.75)
        self.assertAlmostEqual(params.duration(Segment.SCREEN_TO_FINAL), 1.75)
        self.assertAlmostEqual(params.duration(Segment.INITIAL_TO_FINAL), 2.5)

    def test_time_order(self):
        with self.assertRaises(TimeOrderError) as context:
            KernelParams(t_c=2.0, t_f=1.0)

        self.assertIn("t_f", context.exception.message_dict)

        with self.assertRaises(TimeOrderError):
            KernelParams(t_i=1.0, t_c=1.0)

    def test_positive_mass(self):
        with self.assertRaises(ValidationError) as context:
            KernelParams(mass=0.0)

        self.assertIn("mass", context.exception.message_dict)

    def test_slit_half_width(self):
        with self.assertRaises(SlitGeometryError) as context:
            SlitGeometry(b=0.0)

        self.assertIn("b", context.exception.message_dict)

    def test_slit_windows(self):
        axis = GridAxis(-2.0, 2.0, 401)

        hard = SlitGeometry(b=0.505, center=0.25).window(axis)
        self.assertEqual(set(np.unique(hard)), {0.0, 1.0})
        self.assertEqual(int(np.sum(hard)), 101)

        gaussian = SlitGeometry(b=0.5, profile=SlitProfile.GAUSSIAN).window(axis)
        self.assertAlmostEqual(float(gaussian[200]), 1.0)
        self.assertAlmostEqual(float(gaussian[250]), math.exp(-0.5))

    def test_packet_width(self):
        with self.assertRaises(ValidationError) as context:
            GaussianPacket(sigma=-1.0)

        self.assertIn("sigma", context.exception.message_dict)

    def test_packet_sample_matches_gaussian_mode(self):
        axis = GridAxis(-12.0, 12.0, 1201)
        packet = GaussianPacket(center=0.5, sigma=1.3, wavenumber=-1.0)

        np.testing.assert_allclose(packet.sample(axis).samples, ModeFunction.gaussian(axis, 0.5, 1.3, -1.0).samples, rtol=0, atol=1e-12)


class NaturalUnitsTestCase(SimpleTestCase):
    def test_time_scale(self):
        units = NaturalUnits(length_scale=1e-6)

        self.assertAlmostEqual(units.time_scale, constants.m_e * 1e-12 / constants.hbar)

    def test_conversions(self):
        units = NaturalUnits(length_scale=2e-6, mass=constants.m_n)

        self.assertAlmostEqual(units.length(1e-5), 5.0)
        self.assertAlmostEqual(units.to_meters(units.length(3e-6)), 3e-6)
        self.assertAlmostEqual(units.to_seconds(units.time(1e-3)), 1e-3)
        self.assertAlmostEqual(units.wavenumber(1e6), 2.0)

    def test_invalid_scale(self):
        with self.assertRaises(ValidationError):
            NaturalUnits(length_scale=0.0)


class FreeKernelTestCase(SimpleTestCase):
    def setUp(self):
        self.params = KernelParams(t_i=0.0, t_c=1.0, t_f=2.0)

    def test_modulus_is_constant(self):
        rng = np.random.default_rng(3)
        values = free_kernel_value(rng.uniform(-5, 5, 50), rng.uniform(-5, 5, 50), self.params, Segment.INITIAL_TO_FINAL)

        np.testing.assert_allclose(np.abs(values), math.sqrt(1 / (2 * math.pi * 2.0)), rtol=1e-12)

    def test_prefactor_branch(self):
        params = KernelParams(t_i=0.0, t_c=2 * math.pi, t_f=4 * math.pi)
        value = free_kernel_value(0.3, 0.3, params, Segment.INITIAL_TO_SCREEN)

        self.assertIsInstance(value, complex)
        self.assertAlmostEqual(value, cmath.sqrt(1 / (4 * math.pi**2 * 1j)), delta=1e-15)
        self.assertAlmostEqual(cmath.phase(value), -math.pi / 4, delta=1e-15)

    def test_broadcasting(self):
        values = free_kernel_value(np.zeros((3, 1)), np.zeros((1, 4)), self.params, Segment.SCREEN_TO_FINAL)

        self.assertEqual(values.shape, (3, 4))

    def damped_composition(self, x_f: float, x_i: float, damping: float) -> complex:
        """Closed form of ``∫K_cf(x_f, x)K_ic(x, x_i)exp(−εx²)dx``."""

        a_1 = 1 / (2 * self.params.duration(Segment.INITIAL_TO_SCREEN))
        a_2 = 1 / (2 * self.params.duration(Segment.SCREEN_TO_FINAL))
        prefactor = free_kernel_value(0.0, 0.0, self.params, Segment.SCREEN_TO_FINAL) * free_kernel_value(0.0, 0.0, self.params, Segment.INITIAL_TO_SCREEN)

        a = damping - 1j * (a_1 + a_2)
        b = -2j * (a_2 * x_f + a_1 * x_i)
        c = 1j * (a_2 * x_f**2 + a_1 * x_i**2)

        return prefactor * cmath.sqrt(math.pi / a) * cmath.exp(b**2 / (4 * a) + c)

    def test_damped_composition_quadrature(self):
        axis = GridAxis(-25.0, 25.0, 20001)
        x_f, x_i, damping = 0.7, -0.4, 0.05

        integrand = (
            free_kernel_value(x_f, axis.points, self.params, Segment.SCREEN_TO_FINAL)
            * free_kernel_value(axis.points, x_i, self.params, Segment.INITIAL_TO_SCREEN)
            * np.exp(-damping * axis.points**2)
        )

        self.assertAlmostEqual(complex(axis.integrate(integrand)), self.damped_composition(x_f, x_i, damping), delta=1e-6)

    def test_composition_limit(self):
        for x_f, x_i in [(0.0, 0.0), (0.7, -0.4), (-2.0, 3.5)]:
            composed = self.damped_composition(x_f, x_i, 0.0)

            self.assertAlmostEqual(composed, free_kernel_value(x_f, x_i, self.params, Segment.INITIAL_TO_FINAL), delta=1e-12)


class FreePropagationTestCase(SimpleTestCase):
    def test_closed_form_oracle(self):
        axis = GridAxis(-64.0, 64.0, 4097)
        rng = np.random.default_rng(11)

        for _ in range(10):
            packet = GaussianPacket(center=rng.uniform(-4, 4), sigma=rng.uniform(0.5, 2.0), wavenumber=rng.uniform(-3, 3))
            duration = rng.uniform(0.5, 3.0)
            params = KernelParams(t_c=duration / 2, t_f=duration)

            output = propagate_free(packet, axis, params)

            self.assertAlmostEqual(output.norm_squared(), 1.0, delta=1e-6)
            np.testing.assert_allclose(output.samples, packet.evolved(axis, params, duration).samples, rtol=0, atol=1e-6)

    def test_spreading_width(self):
        axis = GridAxis(-40.0, 40.0, 4001)
        params = KernelParams(t_c=1.0, t_f=2.0)
        packet = GaussianPacket(sigma=1.0)

        output = propagate_free(packet, axis, params)

        self.assertAlmostEqual(packet.sigma_at(params, 2.0), math.sqrt(2.0))
        self.assertAlmostEqual(spread(output), math.sqrt(2.0), delta=1e-6)

    def test_centroid_motion(self):
        axis = GridAxis(-30.0, 30.0, 3001)
        params = KernelParams(t_c=0.5, t_f=1.0)

        output = propagate_free(GaussianPacket(wavenumber=2.0), axis, params)

        self.assertAlmostEqual(centroid(output), 2.0, delta=1e-4)

    def test_short_time_limit(self):
        axis = GridAxis(-12.0, 12.0, 1201)
        params = KernelParams(t_c=5e-7, t_f=1e-6)
        packet = GaussianPacket(center=0.3, wavenumber=1.0)

        output = propagate_free(packet, axis, params)

        np.testing.assert_allclose(output.samples, packet.sample(axis).samples, rtol=0, atol=1e-4)

    def test_quadrature_matches_closed_form(self):
        axis = GridAxis(-14.0, 14.0, 2801)
        params = KernelParams(t_c=0.5, t_f=1.0)
        packet = GaussianPacket(sigma=1.0, wavenumber=1.0)

        output = propagate_free(packet, axis, params, method=PropagationMethod.QUADRATURE)

        np.testing.assert_allclose(output.samples, packet.evolved(axis, params, 1.0).samples, rtol=0, atol=1e-6)

    def test_quadrature_undersampled(self):
        axis = GridAxis(-14.0, 14.0, 401)
        params = KernelParams(t_c=0.5, t_f=1.0)

        with self.assertRaisesMessage(GridUnderresolutionError, "use a spacing of at most"):
            propagate_free(GaussianPacket(), axis, params, method=PropagationMethod.QUADRATURE)

    @override_settings(LAB_POINTS_PER_OSCILLATION=1000)
    def test_points_per_oscillation_from_settings(self):
        with self.assertRaises(GridUnderresolutionError):
            propagate_free(GaussianPacket(), GridAxis(-12.0, 12.0, 1201), KernelParams(t_c=0.5, t_f=1.0))

    def test_axis_too_narrow(self):
        with self.assertRaises(GridUnderresolutionError):
            propagate_free(GaussianPacket(), GridAxis(-5.0, 5.0, 1001), KernelParams())

    def test_composition(self):
        axis = GridAxis(-24.0, 24.0, 2401)
        params = KernelParams(t_c=0.7, t_f=1.5)
        packet = GaussianPacket(center=-1.0, sigma=0.8, wavenumber=1.5)

        at_screen = propagate_free(packet, axis, params, Segment.INITIAL_TO_SCREEN)
        two_step = propagate_mode(at_screen, params, Segment.SCREEN_TO_FINAL)

        np.testing.assert_allclose(two_step.samples, propagate_free(packet, axis, params).samples, rtol=0, atol=1e-6)

    def test_linearity(self):
        axis = GridAxis(-16.0, 16.0, 2049)
        params = KernelParams(t_c=1.0, t_f=2.0)
        psi = GaussianPacket(center=-2.0, wavenumber=1.0).sample(axis)
        chi = GaussianPacket(center=1.5, sigma=1.2, wavenumber=-2.0).sample(axis)
        a, b = 0.3 - 0.2j, 1.1

        for method in PropagationMethod:
            combined = propagate_mode(psi.with_samples(a * psi.samples + b * chi.samples), params, Segment.INITIAL_TO_FINAL, method, 15.0)
            separate = [propagate_mode(mode, params, Segment.INITIAL_TO_FINAL, method, 15.0).samples for mode in [psi, chi]]

            np.testing.assert_allclose(combined.samples, a * separate[0] + b * separate[1], rtol=0, atol=1e-8)


class SlitPropagationTestCase(SimpleTestCase):
    def setUp(self):
        self.axis = GridAxis(-20.0, 20.0, 16385)
        self.params = KernelParams(t_c=1.0, t_f=2.0)
        self.packet = GaussianPacket(sigma=1.0)
        self.width_at_screen = self.packet.sigma_at(self.params, 1.0)

    def test_open_screen(self):
        result = propagate_slit(self.packet, self.axis, self.params, None)

        self.assertAlmostEqual(unitarity_defect(result), 0.0, delta=1e-6)
        self.assertAlmostEqual(result.transmitted, 1.0, delta=1e-12)

    def test_wide_hard_slit(self):
        result = propagate_slit(self.packet, self.axis, self.params, SlitGeometry(b=8 * self.width_at_screen))

        self.assertAlmostEqual(result.output_norm2, 1.0, delta=1e-5)
        self.assertLessEqual(unitarity_defect(result), 1e-5)

    def test_wide_gaussian_slit(self):
        result = propagate_slit(self.packet, self.axis, self.params, SlitGeometry(b=1000.0, profile=SlitProfile.GAUSSIAN))

        self.assertLessEqual(unitarity_defect(result), 1e-5)

    def test_mid_plane_identity(self):
        for center in [-1.0, 0.0, 0.5, 1.5]:
            packet = GaussianPacket(center=center, sigma=1.0)

            for b in [0.3, 0.7, 1.2, 2.0, 3.0]:
                result = propagate_slit(packet, self.axis, self.params, SlitGeometry(b=b, center=0.25))

                self.assertAlmostEqual(result.output_norm2, result.mid_plane.norm_squared(), delta=1e-8)
                self.assertAlmostEqual(unitarity_defect(result), 1 - result.transmitted, delta=1e-8)

    def test_half_defect(self):
        b = math.sqrt(2) * self.width_at_screen * float(erfinv(0.5))
        result = propagate_slit(self.packet, self.axis, self.params, SlitGeometry(b=b))

        self.assertAlmostEqual(unitarity_defect(result), 0.5, delta=1e-3)

    def test_narrow_slit_defect(self):
        result = propagate_slit(self.packet, self.axis, self.params, SlitGeometry(b=self.width_at_screen / 2))

        self.assertGreaterEqual(unitarity_defect(result), 0.3)

    def test_distant_slit_blocks(self):
        result = propagate_slit(self.packet, self.axis, self.params, SlitGeometry(b=0.5, center=15.0))

        self.assertLessEqual(result.output_norm2, 1e-4)

    def test_monotone_in_half_width(self):
        norms = [propagate_slit(self.packet, self.axis, self.params, SlitGeometry(b=b)).output_norm2 for b in np.linspace(0.1, 4.0, 12)]

        self.assertTrue(np.all(np.diff(norms) >= 0))

    def test_quadrature_agrees_with_spectral(self):
        axis = GridAxis(-15.0, 15.0, 3001)
        slit = SlitGeometry(b=0.8, profile=SlitProfile.GAUSSIAN, center=0.3)

        spectral = propagate_slit(self.packet, axis, self.params, slit)
        quadrature = propagate_slit(self.packet, axis, self.params, slit, PropagationMethod.QUADRATURE)

        np.testing.assert_allclose(quadrature.output.samples, spectral.output.samples, rtol=0, atol=1e-6)

    def test_setup_check(self):
        check_slit_setup(self.packet, self.axis, self.params)

        with self.assertRaises(GridUnderresolutionError):
            check_slit_setup(self.packet, GridAxis(-4.0, 4.0, 801), self.params)

        with self.assertRaises(GridUnderresolutionError):
            check_slit_setup(self.packet, GridAxis(-20.0, 20.0, 41), self.params)

        with self.assertRaises(GridUnderresolutionError):
            check_slit_setup(self.packet, GridAxis(-15.0, 15.0, 401), self.params, PropagationMethod.QUADRATURE)


class DoubleSlitTestCase(SimpleTestCase):
    def setUp(self):
        self.axis = GridAxis(-24.0, 24.0, 6145)
        self.params = KernelParams(t_c=1.0, t_f=2.0)
        self.packet = GaussianPacket(sigma=2.0)

    def test_mirror_symmetry(self):
        modes = double_slit_modes(self.packet, self.axis, self.params, SlitGeometry(b=0.51, center=-1.5), SlitGeometry(b=0.51, center=1.5))

        np.testing.assert_allclose(modes.mode_a.samples, modes.mode_b.samples[::-1], rtol=0, atol=1e-8)
        self.assertEqual(modes.mode_a.label, ModeLabel.MODE_1A)
        self.assertTrue(modes.mode_b.is_normalized())

    def test_transmitted_fractions(self):
        modes = double_slit_modes(self.packet, self.axis, self.params, SlitGeometry(b=0.8, center=-1.0), SlitGeometry(b=1.2, center=1.5))

        self.assertGreater(modes.transmitted_a, 0)
        self.assertLessEqual(modes.transmitted_a + modes.transmitted_b, 1 + 1e-8)

    def test_overlapping_windows(self):
        with self.assertRaises(SlitGeometryError):
            double_slit_modes(self.packet, self.axis, self.params, SlitGeometry(b=1.0, center=-0.5), SlitGeometry(b=1.0, center=0.5))

    def test_fringe_spacing(self):
        axis = GridAxis(-128.0, 128.0, 4097)
        params = KernelParams(t_c=0.001, t_f=5.001)
        separation = 6.0

        modes = double_slit_modes(
            GaussianPacket(sigma=5.0),
            axis,
            params,
            SlitGeometry(b=0.3, profile=SlitProfile.GAUSSIAN, center=-separation / 2),
            SlitGeometry(b=0.3, profile=SlitProfile.GAUSSIAN, center=separation / 2),
        )

        central = np.abs(axis.points) < 12
        intensity = np.abs(modes.mode_a.samples + modes.mode_b.samples)[central] ** 2
        peaks, _ = find_peaks(intensity)
        spacing = float(np.mean(np.diff(axis.points[central][peaks])))

        expected = 2 * math.pi * params.duration(Segment.SCREEN_TO_FINAL) / separation
        self.assertGreaterEqual(len(peaks), 3)
        self.assertAlmostEqual(spacing / expected, 1.0, delta=0.05)


class ConservationOperatorTestCase(SimpleTestCase):
    def setUp(self):
        self.axis = GridAxis(-8.0, 8.0, 257)
        self.params = KernelParams(t_c=0.5, t_f=1.0)

    def test_free_evolution_conserves(self):
        np.testing.assert_allclose(conservation_operator(self.axis, self.params), np.eye(256), rtol=0, atol=1e-12)

    def test_hard_slit_spectrum(self):
        slit = SlitGeometry(b=2.0, center=0.5)
        eigenvalues = eigvalsh(conservation_operator(self.axis, self.params, slit))

        np.testing.assert_allclose(eigenvalues, np.sort(slit.window(self.axis)[:-1] ** 2), rtol=0, atol=1e-10)

    def test_covering_slit_conserves(self):
        operator = conservation_operator(self.axis, self.params, SlitGeometry(b=100.0))

        np.testing.assert_allclose(operator, np.eye(256), rtol=0, atol=1e-12)
