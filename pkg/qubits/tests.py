import math

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from scipy.linalg import eigvalsh
from scipy.stats import unitary_group

from .evolution import (
    EvolutionMap2,
    GramMatrix,
    Role,
    TimeSwitch,
    gram,
    gram_root,
    heaviside,
    marginal_probs_closed,
    marginal_probs_oracle,
    probs_vs_time,
    signaling_deviation,
)
from .exceptions import UnitarityError

HADAMARD = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def random_unitary(rng: np.random.Generator, role: Role = Role.U2) -> EvolutionMap2:
    return EvolutionMap2(unitary_group.rvs(2, random_state=rng), role)


def random_map(rng: np.random.Generator) -> EvolutionMap2:
    """Entries drawn uniformly from the unit disc."""

    radius = np.sqrt(rng.uniform(0, 1, (2, 2)))
    angle = rng.uniform(0, 2 * math.pi, (2, 2))

    return EvolutionMap2(radius * np.exp(1j * angle))


class EvolutionMapTestCase(SimpleTestCase):
    def test_u1_must_be_unitary(self):
        with self.assertRaises(UnitarityError):
            EvolutionMap2(np.diag([1.0, 0.5]), Role.U1)

        self.assertTrue(EvolutionMap2(HADAMARD, Role.U1).is_unitary())

    def test_non_unitary_u2_allowed(self):
        self.assertFalse(EvolutionMap2(np.diag([1.0, 0.5])).is_unitary())

    def test_shape_and_finiteness(self):
        with self.assertRaises(ValidationError):
            EvolutionMap2(np.eye(3))

        with self.assertRaises(ValidationError):
            EvolutionMap2(np.array([[1, np.inf], [0, 1]]))


class GramMatrixTestCase(SimpleTestCase):
    def test_unitary_gives_identity(self):
        rng = np.random.default_rng(5)

        for _ in range(100):
            np.testing.assert_allclose(gram(random_unitary(rng)).matrix, np.eye(2), rtol=0, atol=1e-12)

    def test_diagonal(self):
        self.assertEqual(gram(EvolutionMap2(np.diag([1.0, 0.5]))), GramMatrix(1, 0, 0, 0.25))

    def test_positive_semidefinite(self):
        rng = np.random.default_rng(6)

        for _ in range(100):
            self.assertGreaterEqual(float(eigvalsh(gram(random_map(rng)).matrix)[0]), -1e-12)

    def test_requires_u2(self):
        with self.assertRaises(ValidationError) as context:
            gram(EvolutionMap2(np.eye(2), Role.U1))

        self.assertIn("role", context.exception.message_dict)

    def test_hermiticity_enforced(self):
        with self.assertRaises(ValidationError) as context:
            GramMatrix(1, 0.5, 0.2, 1)

        self.assertIn("gamma", context.exception.message_dict)

        with self.assertRaises(ValidationError):
            GramMatrix(1j, 0, 0, 1)

    def test_positivity_enforced(self):
        with self.assertRaises(ValidationError):
            GramMatrix(1, 2, 2, 1)

    def test_root(self):
        for g in [GramMatrix(1, 0, 0, 0), GramMatrix(2, 0.5 - 0.5j, 0.5 + 0.5j, 1), GramMatrix(0.5, 0, 0, 1)]:
            np.testing.assert_allclose(gram(gram_root(g)).matrix, g.matrix, rtol=0, atol=1e-12)


class MarginalProbabilitiesTestCase(SimpleTestCase):
    def test_identity(self):
        self.assertEqual(marginal_probs_closed(GramMatrix.identity()), (0.5, 0.5))

    def test_projector(self):
        self.assertEqual(marginal_probs_closed(GramMatrix(1, 0, 0, 0)), (0.0, 0.5))

    def test_attenuated_minus(self):
        p_plus, p_minus = marginal_probs_closed(gram(EvolutionMap2(np.diag([1.0, 0.5]))))

        self.assertAlmostEqual(p_plus, 0.03125, delta=1e-15)
        self.assertAlmostEqual(p_minus, 0.5, delta=1e-15)
        self.assertNotAlmostEqual(p_plus + p_minus, 1.0)

    def test_unitary_cannot_signal(self):
        rng = np.random.default_rng(7)

        for _ in range(1000):
            g = gram(random_unitary(rng))
            p_plus, p_minus = marginal_probs_closed(g)

            self.assertAlmostEqual(p_plus, 0.5, delta=1e-12)
            self.assertAlmostEqual(p_minus, 0.5, delta=1e-12)
            self.assertAlmostEqual(signaling_deviation(g), 0.0, delta=1e-12)

    def test_oracle_identity(self):
        identity = EvolutionMap2(np.eye(2), Role.U1)

        np.testing.assert_allclose(marginal_probs_oracle(identity, EvolutionMap2(np.eye(2))), (0.5, 0.5), rtol=0, atol=1e-15)

    def test_oracle_independent_of_u1(self):
        u2 = EvolutionMap2(np.diag([1.0, 0.5]))
        rng = np.random.default_rng(8)

        for u1 in [EvolutionMap2(HADAMARD, Role.U1)] + [random_unitary(rng, Role.U1) for _ in range(10)]:
            p_plus, p_minus = marginal_probs_oracle(u1, u2)

            self.assertAlmostEqual(p_plus, 0.03125, delta=1e-12)
            self.assertAlmostEqual(p_minus, 0.5, delta=1e-12)

    def test_oracle_matches_closed_form(self):
        rng = np.random.default_rng(9)

        for _ in range(100):
            u1, u2 = random_unitary(rng, Role.U1), random_map(rng)

            np.testing.assert_allclose(marginal_probs_oracle(u1, u2), marginal_probs_closed(gram(u2)), rtol=0, atol=1e-12)

    def test_oracle_requires_unitary_u1(self):
        with self.assertRaises(UnitarityError):
            marginal_probs_oracle(EvolutionMap2(np.diag([1.0, 0.5])), EvolutionMap2(np.eye(2)))

    def test_signaling_deviation(self):
        self.assertEqual(signaling_deviation(GramMatrix.identity()), 0.0)
        self.assertEqual(signaling_deviation(GramMatrix(1, 0, 0, 0)), 1.0)


class TimeSwitchTestCase(SimpleTestCase):
    def test_heaviside(self):
        self.assertEqual(heaviside(0.999, 1.0), 0.0)
        self.assertEqual(heaviside(1.0, 1.0), 1.0)
        self.assertEqual(heaviside(3.0, 1.0), 1.0)

    def test_before_switch(self):
        switch = TimeSwitch(switch_time=2.0, alpha0=-0.5, beta0=0.1, gamma0=0.1)

        self.assertEqual(probs_vs_time(switch, 2.0 - 1e-9), (0.5, 0.5))

    def test_zero_perturbation(self):
        self.assertEqual(probs_vs_time(TimeSwitch(switch_time=1.0), 5.0), (0.5, 0.5))

    def test_attenuated_plus(self):
        p_plus, p_minus = probs_vs_time(TimeSwitch(switch_time=1.0, alpha0=-0.5), 1.0)

        self.assertAlmostEqual(p_plus, 0.5)
        self.assertAlmostEqual(p_minus, 0.125)

    def test_invalid_switched_gram(self):
        with self.assertRaises(ValidationError) as context:
            TimeSwitch(switch_time=1.0, alpha0=-2.0)

        self.assertIn("alpha0", context.exception.message_dict)

        with self.assertRaises(ValidationError) as context:
            TimeSwitch(switch_time=1.0, beta0=0.3, gamma0=0.1)

        self.assertIn("gamma0", context.exception.message_dict)
