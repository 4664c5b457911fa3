# Copyright (c) 2026, itsdave GmbH and contributors
# For license information, please see license.txt

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from nonreciprocal_entanglement.exceptions import (
	IntegrationTimeoutError,
	InvalidParameterError,
	NumericalFailureError,
	PreconditionError,
	throw,
)
from nonreciprocal_entanglement.model.stability.stability import is_stable

logger = logging.getLogger(__name__)

METHODS = ("kronecker", "bartels-stewart")
RESIDUAL_TOL = 1e-10
STATIONARY_TOL = 1e-10
BONA_FIDE_TOL = -1e-9


@dataclass(frozen=True)
class CovarianceMatrix:
	v: np.ndarray
	residual: float = 0.0


def _matrix(x, attr):
	return getattr(x, attr) if hasattr(x, attr) else np.asarray(x, dtype=float)


def lyapunov_residual(a, d, v):
	return float(np.linalg.norm(a @ v + v @ a.T + d, "fro"))


def solve_lyapunov(A, D, method="kronecker"):
	"""Stationary covariance V of A V + V A^T = -D for a stable drift matrix."""
	a, d = _matrix(A, "a"), _matrix(D, "d")
	if method not in METHODS:
		throw(f"unknown Lyapunov method {method!r}, expected one of {METHODS}", InvalidParameterError)
	report = is_stable(a)
	if not report.stable:
		throw(f"drift matrix is not stable (margin {report.margin:.3e})", PreconditionError)

	n = a.shape[0]
	if method == "kronecker":
		identity = np.eye(n)
		system = np.kron(a, identity) + np.kron(identity, a)
		try:
			vec = scipy.linalg.solve(system, -d.reshape(-1))
		except (np.linalg.LinAlgError, ValueError) as e:
			throw(f"Lyapunov system is singular: {e}", NumericalFailureError)
		v = vec.reshape(n, n)
	else:
		v = scipy.linalg.solve_continuous_lyapunov(a, -d)

	v = 0.5 * (v + v.T)
	res = lyapunov_residual(a, d, v)
	if not np.isfinite(res) or res > RESIDUAL_TOL * float(np.linalg.norm(d, "fro")):
		throw(f"Lyapunov residual {res:.3e} too large ({method})", NumericalFailureError)
	return CovarianceMatrix(v, res)


def _rhs(a, d, v):
	return a @ v + v @ a.T + d


def integrate_moments(A, D, t_end=1e4, dt=0.01):
	"""Integrate dV/dt = A V + V A^T + D with RK4 from V(0) = 0 until it stops moving."""
	a, d = _matrix(A, "a"), _matrix(D, "d")
	if dt <= 0 or t_end <= 0:
		throw(f"dt and t_end must be positive, got dt={dt}, t_end={t_end}", InvalidParameterError)
	margin = float(np.max(np.linalg.eigvals(a).real))
	if margin < 0 and dt >= 0.1 / abs(margin):
		throw(f"dt={dt} must stay below 0.1/|margin| = {0.1 / abs(margin):.4g}", InvalidParameterError)

	v = np.zeros_like(a)
	steps = int(np.ceil(t_end / dt))
	for step in range(steps):
		k1 = _rhs(a, d, v)
		if np.linalg.norm(k1, "fro") < STATIONARY_TOL:
			logger.debug("moments stationary after t=%.4g", step * dt)
			return CovarianceMatrix(0.5 * (v + v.T), lyapunov_residual(a, d, v))
		k2 = _rhs(a, d, v + 0.5 * dt * k1)
		k3 = _rhs(a, d, v + 0.5 * dt * k2)
		k4 = _rhs(a, d, v + dt * k3)
		v = v + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
		if not np.all(np.isfinite(v)):
			throw(f"moment integration diverged at t={(step + 1) * dt:.4g}", IntegrationTimeoutError, last_iterate=v)
	if np.linalg.norm(_rhs(a, d, v), "fro") < STATIONARY_TOL:
		return CovarianceMatrix(0.5 * (v + v.T), lyapunov_residual(a, d, v))
	throw(f"moments not stationary at t_end={t_end}", IntegrationTimeoutError, last_iterate=v)


def symplectic_form(modes):
	omega = np.zeros((2 * modes, 2 * modes))
	for k in range(modes):
		omega[2 * k, 2 * k + 1] = 1.0
		omega[2 * k + 1, 2 * k] = -1.0
	return omega


def uncertainty_check(V):
	"""(bona_fide, min eigenvalue of V + i Omega/2).

	Reported only; the linearized model does not enforce it.
	"""
	v = _matrix(V, "v")
	omega = symplectic_form(v.shape[0] // 2)
	min_eig = float(np.min(np.linalg.eigvalsh(v + 0.5j * omega)))
	bona_fide = min_eig >= BONA_FIDE_TOL
	if not bona_fide:
		logger.info("covariance matrix violates the uncertainty relation (min eigenvalue %.3e)", min_eig)
	return bona_fide, min_eig
