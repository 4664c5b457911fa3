# Copyright (c) 2026, itsdave GmbH and contributors
# For license information, please see license.txt

import logging
from dataclasses import dataclass, replace

import numpy as np

from nonreciprocal_entanglement.exceptions import (
	InvalidParameterError,
	NoSteadyStateError,
	NumericalFailureError,
	ValidationError,
	throw,
)
from nonreciprocal_entanglement.model.dynamics.dynamics import build_drift
from nonreciprocal_entanglement.model.stability.stability import is_stable

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-12
MAX_NEWTON = 60


@dataclass(frozen=True)
class SteadyState:
	alpha1: complex
	alpha2: complex
	beta1: complex
	beta2: complex
	Delta_prime: float
	G1: complex
	G2: complex
	u: float
	residual: float


@dataclass(frozen=True)
class MeanfieldSolution:
	branches: tuple
	selected: int
	multistable: bool
	stable: tuple

	@property
	def steady_state(self):
		return self.branches[self.selected]

	def branch(self, index=None):
		if index is None:
			return self.steady_state
		if not 0 <= index < len(self.branches):
			throw(f"branch {index} does not exist, {len(self.branches)} branch(es) found", InvalidParameterError)
		return self.branches[index]


@dataclass(frozen=True)
class _Reduction:
	chi: float
	K: float
	D0: float
	S: complex
	den2: complex

	@property
	def coefficients(self):
		return np.array([
			self.chi ** 2,
			-2 * self.D0 * self.chi,
			self.K ** 2 + self.D0 ** 2,
			-abs(self.S) ** 2,
		])

	def defect(self, alpha):
		B = self.K + 1j * (self.D0 - self.chi * abs(alpha) ** 2)
		return alpha * B - self.S


def _reduction(np_):
	den2 = 1j * np_.Delta_c2 + np_.kappa2
	c = np_.J1 * np_.J2 / den2
	chi = 2 * (np_.g1 ** 2 / (1 + np_.gamma1 ** 2) + np_.g2 ** 2 / (1 + np_.gamma2 ** 2))
	return _Reduction(
		chi=chi,
		K=np_.kappa1 + c.real,
		D0=np_.Delta + c.imag,
		S=np_.E1 - 1j * np_.J1 * np_.E2 / den2,
		den2=den2,
	)


def _scale(np_):
	return max(1.0, abs(np_.E1), abs(np_.E2))


def build_state(np_, alpha1):
	"""Reconstruct the full steady state from alpha1 alone."""
	alpha1 = complex(alpha1)
	u = abs(alpha1) ** 2
	beta1 = -1j * np_.g1 * u / (1j + np_.gamma1)
	beta2 = -1j * np_.g2 * u / (1j + np_.gamma2)
	Delta_prime = np_.Delta + 2 * (np_.g1 * beta1.real + np_.g2 * beta2.real)
	alpha2 = (np_.E2 - 1j * np_.J2 * alpha1) / (1j * np_.Delta_c2 + np_.kappa2)
	ss = SteadyState(
		alpha1=alpha1,
		alpha2=alpha2,
		beta1=beta1,
		beta2=beta2,
		Delta_prime=Delta_prime,
		G1=np_.g1 * alpha1,
		G2=np_.g2 * alpha1,
		u=u,
		residual=0.0,
	)
	return replace(ss, residual=residual(np_, ss))


def residual(np_, ss):
	"""Max-norm defect of the mean-field equations, in units of omega_m.

	Delta' is re-derived from the betas, so an inconsistent state shows up here too.
	"""
	u = abs(ss.alpha1) ** 2
	Delta_prime = np_.Delta + 2 * (np_.g1 * ss.beta1.real + np_.g2 * ss.beta2.real)
	cavity1 = (1j * Delta_prime + np_.kappa1) * ss.alpha1 + 1j * np_.J1 * ss.alpha2 - np_.E1
	cavity2 = 1j * np_.J2 * ss.alpha1 + (1j * np_.Delta_c2 + np_.kappa2) * ss.alpha2 - np_.E2
	mech1 = (1j + np_.gamma1) * ss.beta1 + 1j * np_.g1 * u
	mech2 = (1j + np_.gamma2) * ss.beta2 + 1j * np_.g2 * u
	defects = (cavity1, cavity2, mech1, mech2)
	return max(abs(d) for d in defects)


def _polish_u(coeffs, u):
	poly = np.poly1d(coeffs)
	deriv = poly.deriv()
	for _ in range(MAX_NEWTON):
		slope = deriv(u)
		if slope == 0:
			break
		step = poly(u) / slope
		u -= step
		if abs(step) <= 1e-15 * max(1.0, abs(u)):
			break
	return max(u, 0.0)


def _polish_alpha(red, alpha, tol):
	for _ in range(MAX_NEWTON):
		F = red.defect(alpha)
		if abs(F) <= tol:
			return alpha
		B = red.K + 1j * (red.D0 - red.chi * abs(alpha) ** 2)
		Fx = B - 2j * red.chi * alpha.real * alpha
		Fy = 1j * B - 2j * red.chi * alpha.imag * alpha
		jac = np.array([[Fx.real, Fy.real], [Fx.imag, Fy.imag]])
		try:
			dx, dy = np.linalg.solve(jac, [-F.real, -F.imag])
		except np.linalg.LinAlgError:
			# fold point, the Jacobian is singular
			return alpha
		alpha = alpha + complex(dx, dy)
	return alpha


def _candidate_roots(red):
	coeffs = red.coefficients
	if not np.any(coeffs[:-1]):
		return coeffs, []
	roots = np.roots(coeffs)
	real = [r.real for r in roots if abs(r.imag) <= 1e-8 * max(1.0, abs(r))]
	return coeffs, sorted(r for r in real if r >= -1e-12)


def solve_meanfield(np_):
	"""All admissible mean-field branches of one parameter point.

	Branches come sorted by u = |alpha1|^2. The selected one is the smallest u whose
	drift matrix is stable, or the smallest u if none is.
	"""
	red = _reduction(np_)
	coeffs, candidates = _candidate_roots(red)
	if not candidates:
		throw("cubic reduction has no nonnegative real root", NoSteadyStateError)

	tol = 1e-14 * _scale(np_)
	branches = []
	for u0 in candidates:
		u = _polish_u(coeffs, u0)
		alpha1 = red.S / (red.K + 1j * (red.D0 - red.chi * u))
		alpha1 = _polish_alpha(red, alpha1, tol)
		ss = build_state(np_, alpha1)
		if ss.residual >= RESIDUAL_TOL:
			logger.debug("dropping root u=%.6e, residual %.3e after polishing", u0, ss.residual)
			continue
		if any(abs(ss.u - b.u) <= 1e-9 * max(1.0, ss.u) for b in branches):
			continue
		branches.append(ss)

	if not branches:
		throw(f"no root of the cubic polished below residual {RESIDUAL_TOL:g}", NumericalFailureError)
	branches.sort(key=lambda b: b.u)

	stable = []
	for ss in branches:
		try:
			stable.append(is_stable(build_drift(np_, ss)).stable)
		except ValidationError:
			stable.append(False)

	selected = stable.index(True) if any(stable) else 0
	logger.debug("mean field: %d branch(es) u=%s, stable=%s, selected %d",
		len(branches), [f"{b.u:.6e}" for b in branches], stable, selected)
	return MeanfieldSolution(
		branches=tuple(branches),
		selected=selected,
		multistable=sum(stable) > 1,
		stable=tuple(stable),
	)


def select_branch(solution, index):
	solution.branch(index)
	return replace(solution, selected=index)


def linear_solution(np_, Delta=None):
	"""Cavity amplitudes of the linear two-mode problem at effective detuning Delta."""
	Delta = np_.Delta if Delta is None else Delta
	matrix = np.array([
		[1j * Delta + np_.kappa1, 1j * np_.J1],
		[1j * np_.J2, 1j * np_.Delta_c2 + np_.kappa2],
	])
	try:
		return np.linalg.solve(matrix, np.array([np_.E1, np_.E2], dtype=complex))
	except np.linalg.LinAlgError:
		throw("linear cavity system is singular", NumericalFailureError)


def fixed_point_meanfield(np_, damping=0.5, tol=1e-13, max_iter=10000):
	"""Damped fixed-point iteration of the full mean-field equations.

	Starts from the g_m = 0 solution; every step recomputes the betas and the
	shifted detuning and solves the cavity pair again. Independent of the cubic.
	"""
	if not 0 < damping <= 1:
		throw(f"damping must be in (0, 1], got {damping}", InvalidParameterError)
	alpha1 = linear_solution(np_)[0]
	for iteration in range(max_iter):
		u = abs(alpha1) ** 2
		shift = 2 * u * (np_.g1 ** 2 / (1 + np_.gamma1 ** 2) + np_.g2 ** 2 / (1 + np_.gamma2 ** 2))
		target = linear_solution(np_, np_.Delta - shift)[0]
		updated = (1 - damping) * alpha1 + damping * target
		if not np.isfinite(updated):
			throw("fixed-point iteration diverged", NumericalFailureError)
		step = abs(updated - alpha1)
		alpha1 = updated
		if step <= tol * max(1.0, abs(alpha1)):
			logger.debug("fixed point converged after %d iterations", iteration + 1)
			return build_state(np_, alpha1)
	throw(f"fixed-point iteration did not converge in {max_iter} steps", NumericalFailureError)
