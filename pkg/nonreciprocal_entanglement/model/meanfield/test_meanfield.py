# Copyright (c) 2026, itsdave GmbH and Contributors
# See license.txt

import unittest
from dataclasses import replace

import numpy as np

from nonreciprocal_entanglement.exceptions import InvalidParameterError
from nonreciprocal_entanglement.model.meanfield.meanfield import (
	fixed_point_meanfield,
	residual,
	select_branch,
	solve_meanfield,
)
from nonreciprocal_entanglement.model.params.params import apply_overrides, reference_params, resolve


class TestMeanfield(unittest.TestCase):
	def setUp(self):
		self.np_ = resolve(reference_params())

	def test_undriven_system_sits_at_the_origin(self):
		np_ = apply_overrides(self.np_, {"E": 0.0})
		solution = solve_meanfield(np_)
		self.assertEqual(len(solution.branches), 1)
		ss = solution.steady_state
		self.assertEqual(ss.alpha1, 0)
		self.assertEqual(ss.alpha2, 0)
		self.assertEqual(ss.beta1, 0)
		self.assertEqual(ss.Delta_prime, np_.Delta)

	def test_decoupled_linear_cavity(self):
		np_ = apply_overrides(self.np_, {"g_m": 0.0, "J1": 0.0, "J2": 0.0})
		solution = solve_meanfield(np_)
		self.assertEqual(len(solution.branches), 1)
		expected = np_.E1 / (1j * np_.Delta + np_.kappa1)
		self.assertAlmostEqual(abs(solution.steady_state.alpha1 - expected), 0.0, places=12)

	def test_decoupled_solution_scales_with_the_drive(self):
		np_ = apply_overrides(self.np_, {"g_m": 0.0})
		ss = solve_meanfield(np_).steady_state
		for s in (0.5, 3.0, 10.0):
			scaled = solve_meanfield(apply_overrides(np_, {"E1": s * np_.E1, "E2": s * np_.E2})).steady_state
			self.assertAlmostEqual(abs(scaled.alpha1 - s * ss.alpha1), 0.0, delta=1e-13 * s * abs(ss.alpha1))
			self.assertAlmostEqual(abs(scaled.alpha2 - s * ss.alpha2), 0.0, delta=1e-13 * s * abs(ss.alpha2))
			self.assertEqual(scaled.Delta_prime, np_.Delta)

	def test_reference_point(self):
		solution = solve_meanfield(self.np_)
		self.assertEqual(len(solution.branches), 1)
		self.assertFalse(solution.multistable)
		self.assertTrue(solution.stable[0])
		ss = solution.steady_state
		self.assertLess(ss.residual, 1e-12)
		self.assertAlmostEqual(ss.u, abs(ss.alpha1) ** 2)
		self.assertGreater(ss.u, 200)
		self.assertLess(ss.u, 400)
		self.assertAlmostEqual(abs(ss.G1 - self.np_.g1 * ss.alpha1), 0.0)

	def test_cubic_agrees_with_fixed_point_iteration(self):
		for E in (8.0, 16.0):
			np_ = apply_overrides(self.np_, {"E": E})
			cubic = solve_meanfield(np_).steady_state.alpha1
			iterated = fixed_point_meanfield(np_).alpha1
			self.assertLess(abs(cubic - iterated) / abs(cubic), 1e-9)

	def test_random_draws_around_reference_point(self):
		rng = np.random.default_rng(7)
		for _ in range(200):
			np_ = apply_overrides(self.np_, {
				"E": rng.uniform(2.0, 16.0),
				"Delta_c1": rng.uniform(0.8, 1.2),
				"Delta_c2": rng.uniform(0.8, 1.2),
			})
			solution = solve_meanfield(np_)
			for ss in solution.branches:
				self.assertLess(ss.residual, 1e-12)
			if len(solution.branches) == 1:
				iterated = fixed_point_meanfield(np_).alpha1
				cubic = solution.steady_state.alpha1
				self.assertLess(abs(cubic - iterated) / abs(cubic), 1e-9)

	def test_residual_detects_inconsistent_state(self):
		ss = solve_meanfield(self.np_).steady_state
		broken = replace(ss, beta1=0j)
		self.assertGreater(residual(self.np_, broken), 1e-6)

	def test_branch_selection(self):
		solution = solve_meanfield(self.np_)
		self.assertIs(solution.branch(0), solution.branches[0])
		self.assertIs(select_branch(solution, 0).steady_state, solution.branches[0])
		with self.assertRaises(InvalidParameterError):
			solution.branch(3)
		with self.assertRaises(InvalidParameterError):
			select_branch(solution, -1)

	def test_invalid_damping(self):
		with self.assertRaises(InvalidParameterError):
			fixed_point_meanfield(self.np_, damping=0.0)
