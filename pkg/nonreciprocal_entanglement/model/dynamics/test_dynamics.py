# Copyright (c) 2026, itsdave GmbH and Contributors
# See license.txt

import unittest

import numpy as np

from nonreciprocal_entanglement.model.dynamics.dynamics import (
	QUADRATURES,
	build_diffusion,
	build_drift,
	matrices_frame,
)
from nonreciprocal_entanglement.model.lyapunov.lyapunov import solve_lyapunov
from nonreciprocal_entanglement.model.meanfield.meanfield import SteadyState, solve_meanfield
from nonreciprocal_entanglement.model.params.params import apply_overrides, reference_params, resolve, vary, with_direction


def langevin_drift(np_, ss):
	"""Drift in the quadrature basis, built from the ladder-operator equations."""
	dp, G1, G2 = ss.Delta_prime, complex(ss.G1), complex(ss.G2)
	k1, k2, g1, g2 = np_.kappa1, np_.kappa2, np_.gamma1, np_.gamma2
	J1, J2, D2 = np_.J1, np_.J2, np_.Delta_c2
	# basis (a1, a1+, a2, a2+, b1, b1+, b2, b2+)
	M = np.zeros((8, 8), dtype=complex)
	M[0] = [-(1j * dp + k1), 0, -1j * J1, 0, -1j * G1, -1j * G1, -1j * G2, -1j * G2]
	M[1] = [0, -(-1j * dp + k1), 0, 1j * J1, 1j * G1.conjugate(), 1j * G1.conjugate(), 1j * G2.conjugate(), 1j * G2.conjugate()]
	M[2] = [-1j * J2, 0, -(1j * D2 + k2), 0, 0, 0, 0, 0]
	M[3] = [0, 1j * J2, 0, -(-1j * D2 + k2), 0, 0, 0, 0]
	M[4] = [-1j * G1.conjugate(), -1j * G1, 0, 0, -(1j + g1), 0, 0, 0]
	M[5] = [1j * G1.conjugate(), 1j * G1, 0, 0, 0, -(-1j + g1), 0, 0]
	M[6] = [-1j * G2.conjugate(), -1j * G2, 0, 0, 0, 0, -(1j + g2), 0]
	M[7] = [1j * G2.conjugate(), 1j * G2, 0, 0, 0, 0, 0, -(-1j + g2)]
	block = np.array([[1, 1], [-1j, 1j]]) / np.sqrt(2)
	T = np.kron(np.eye(4), block)
	return T @ M @ np.linalg.inv(T)


class TestDynamics(unittest.TestCase):
	def setUp(self):
		self.np_ = resolve(reference_params())

	def test_reference_point_entries(self):
		ss = solve_meanfield(self.np_).steady_state
		a = build_drift(self.np_, ss).a
		self.assertAlmostEqual(a[0][3], 0.3)
		self.assertAlmostEqual(a[2][1], 1.0)
		self.assertAlmostEqual(a[3][0], -1.0)
		self.assertEqual(a[0][1], ss.Delta_prime)
		self.assertEqual(a[4][5], 1.0)
		self.assertEqual(a[5][4], -1.0)

	def test_matches_ladder_operator_equations(self):
		rng = np.random.default_rng(11)
		for _ in range(10):
			G1, G2 = rng.normal(size=2) + 1j * rng.normal(size=2)
			ss = SteadyState(0j, 0j, 0j, 0j, rng.normal(), G1, G2, 0.0, 0.0)
			expected = langevin_drift(self.np_, ss)
			self.assertLess(np.max(np.abs(expected.imag)), 1e-12)
			np.testing.assert_allclose(build_drift(self.np_, ss).a, expected.real, atol=1e-12)

	def test_spin_only_enters_through_detuning_without_molecules(self):
		np_ = apply_overrides(self.np_, {"g_m": 0.0})
		cw, ccw = with_direction(np_, "CW"), with_direction(np_, "CCW")
		a_cw = build_drift(cw, solve_meanfield(cw).steady_state).a
		a_ccw = build_drift(ccw, solve_meanfield(ccw).steady_state).a
		differs = np.argwhere(a_cw != a_ccw)
		self.assertEqual(sorted(map(tuple, differs)), [(0, 1), (1, 0)])
		self.assertAlmostEqual(a_cw[0][1] - a_ccw[0][1], -0.2)

	def test_diffusion(self):
		d = build_diffusion(self.np_).d
		self.assertTrue(np.array_equal(d, np.diag(np.diag(d))))
		self.assertEqual(d[0][0], self.np_.kappa1)
		self.assertEqual(d[3][3], self.np_.kappa2)
		self.assertAlmostEqual(d[5][5], self.np_.gamma1 * (2 * self.np_.nbar_B1 + 1))
		self.assertAlmostEqual(d[7][7], self.np_.gamma2 * (2 * self.np_.nbar_B2 + 1))

	def test_matrices_frame_labels(self):
		ss = solve_meanfield(self.np_).steady_state
		A, D = matrices_frame(build_drift(self.np_, ss), build_diffusion(self.np_))
		self.assertEqual(tuple(A.index), QUADRATURES)
		self.assertEqual(tuple(D.columns), QUADRATURES)
		self.assertEqual(A.loc["x1", "y2"], self.np_.J1)

	def test_diffusion_is_symmetric_positive_definite(self):
		for T in (0.0, 200.0, 312.0):
			d = build_diffusion(vary(self.np_, "T", T)).d
			np.testing.assert_array_equal(d, d.T)
			self.assertGreater(np.min(np.linalg.eigvalsh(d)), 0)

	def test_reciprocal_coupling_without_shift_ignores_the_spin_label(self):
		np_ = apply_overrides(self.np_, {"J2": self.np_.J1, "Delta_F": 0.0})
		results = []
		for direction in ("CW", "CCW"):
			point = with_direction(np_, direction)
			ss = solve_meanfield(point).steady_state
			A, D = build_drift(point, ss), build_diffusion(point)
			results.append((A.a, D.d, solve_lyapunov(A, D).v))
		for cw, ccw in zip(*results):
			np.testing.assert_array_equal(cw, ccw)

