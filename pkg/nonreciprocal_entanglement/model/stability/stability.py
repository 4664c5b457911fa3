# Copyright (c) 2026, itsdave GmbH and contributors
# For license information, please see license.txt

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from nonreciprocal_entanglement.exceptions import InvalidParameterError, NumericalFailureError, ValidationError, throw
from nonreciprocal_entanglement.model.params.params import vary
from nonreciprocal_entanglement.pool import pool_map

logger = logging.getLogger(__name__)

# below this distance from the boundary the two verdicts may legitimately differ
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class StabilityReport:
	stable: bool
	margin: float
	method_agreement: bool
	routh_stable: bool
	eigenvalues: np.ndarray = field(default=None, repr=False)


def characteristic_polynomial(a):
	"""Coefficients of det(s*I - a), highest power first, by the Faddeev-LeVerrier recursion."""
	a = np.asarray(a, dtype=float)
	n = a.shape[0]
	coeffs = np.zeros(n + 1)
	coeffs[0] = 1.0
	identity = np.eye(n)
	Mk = np.zeros_like(a)
	for k in range(1, n + 1):
		Mk = a @ Mk + coeffs[k - 1] * identity
		coeffs[k] = -np.trace(a @ Mk) / k
	return coeffs


def routh_table(coeffs):
	coeffs = np.asarray(coeffs, dtype=float)
	n = len(coeffs) - 1
	width = n // 2 + 1
	table = np.zeros((n + 1, width))
	table[0, :len(coeffs[0::2])] = coeffs[0::2]
	table[1, :len(coeffs[1::2])] = coeffs[1::2]
	for i in range(2, n + 1):
		pivot = table[i - 1, 0]
		if pivot == 0:
			# remaining rows stay zero, the verdict is "not stable" anyway
			break
		for j in range(width - 1):
			table[i, j] = (pivot * table[i - 2, j + 1] - table[i - 2, 0] * table[i - 1, j + 1]) / pivot
	return table


def routh_hurwitz_stable(a):
	first_column = routh_table(characteristic_polynomial(a))[:, 0]
	return bool(np.all(first_column > 0))


def is_stable(A):
	"""Eigenvalue verdict on the drift matrix, cross-checked with Routh-Hurwitz."""
	a = A.a if hasattr(A, "a") else np.asarray(A, dtype=float)
	if not np.all(np.isfinite(a)):
		throw("drift matrix has non-finite entries", NumericalFailureError)

	routh_stable = routh_hurwitz_stable(a)
	try:
		eigenvalues = np.linalg.eigvals(a)
	except np.linalg.LinAlgError as e:
		throw(f"eigensolver did not converge: {e}", NumericalFailureError, partial={"routh_stable": routh_stable})

	margin = float(np.max(eigenvalues.real))
	stable = margin < 0
	agreement = stable == routh_stable
	if not agreement:
		level = logging.DEBUG if abs(margin) < BOUNDARY_TOL else logging.WARNING
		logger.log(level, "eigenvalue and Routh-Hurwitz verdicts differ (margin %.3e)", margin)
	return StabilityReport(stable, margin, agreement, routh_stable, eigenvalues)


@dataclass
class StabilityMap:
	param1: str
	param2: str
	values1: np.ndarray
	values2: np.ndarray
	stable: np.ndarray
	margin: np.ndarray
	branch_count: np.ndarray
	status: np.ndarray

	def to_frame(self):
		"""Long format, one row per grid point, param1-major."""
		p1, p2 = np.meshgrid(self.values1, self.values2, indexing="ij")
		return pd.DataFrame({
			"param1": p1.ravel(),
			"param2": p2.ravel(),
			"stable": self.stable.ravel(),
			"margin": self.margin.ravel(),
			"branch_count": self.branch_count.ravel(),
			"status": self.status.ravel(),
		})


def _point_stability(np_, branch=None):
	from nonreciprocal_entanglement.model.dynamics.dynamics import build_drift
	from nonreciprocal_entanglement.model.meanfield.meanfield import solve_meanfield

	solution = solve_meanfield(np_)
	return solution, is_stable(build_drift(np_, solution.branch(branch)))


def _map_point(task):
	base, (name1, value1, couple1), (name2, value2, couple2), branch = task
	try:
		np_ = vary(vary(base, name1, value1, couple1), name2, value2, couple2)
		solution, report = _point_stability(np_, branch)
	except ValidationError as e:
		logger.warning("stability map point %s=%g, %s=%g failed: %s", name1, value1, name2, value2, e)
		return False, float("nan"), 0, e.status
	status = "ok" if report.stable else "unstable"
	return report.stable, report.margin, len(solution.branches), status


def stability_map(base, axis1, axis2, jobs=1, branch=None):
	"""Stability over a two-parameter grid of normalized parameters.

	Each axis is (name, values) or (name, values, couple_m); values must be strictly monotone.
	Points whose mean field cannot be solved count as unstable and carry their failure status.
	"""
	axes = []
	for axis in (axis1, axis2):
		name, values = axis[0], np.asarray(axis[1], dtype=float)
		couple = axis[2] if len(axis) > 2 else False
		steps = np.diff(values)
		if len(values) > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
			throw(f"axis {name} is not strictly monotone", ValidationError)
		axes.append((name, values, couple))

	(name1, values1, couple1), (name2, values2, couple2) = axes
	tasks = [
		(base, (name1, v1, couple1), (name2, v2, couple2), branch)
		for v1 in values1
		for v2 in values2
	]
	results = pool_map(_map_point, tasks, jobs)

	shape = (len(values1), len(values2))
	stable, margin, count, status = zip(*results) if results else ((), (), (), ())
	logger.info("stability map %s x %s: %d of %d points stable", name1, name2, sum(stable), len(tasks))
	return StabilityMap(
		param1=name1,
		param2=name2,
		values1=values1,
		values2=values2,
		stable=np.array(stable, dtype=bool).reshape(shape),
		margin=np.array(margin, dtype=float).reshape(shape),
		branch_count=np.array(count, dtype=int).reshape(shape),
		status=np.array(status, dtype=object).reshape(shape),
	)


def stability_onset(base, name, lo, hi, couple_m=False, rtol=1e-3, branch=None):
	"""Value of one parameter where the selected branch turns unstable, by bisection.

	lo must be stable and hi unstable. The bracket is halved until it is narrower
	than rtol * |hi|; its unstable end is returned. Failed points count as unstable.
	"""
	def stable_at(value):
		try:
			return _point_stability(vary(base, name, value, couple_m), branch)[1].stable
		except ValidationError as e:
			logger.debug("onset search: %s=%g failed: %s", name, value, e)
			return False

	if not rtol > 0:
		throw(f"rtol must be positive, got {rtol}", InvalidParameterError)
	if not stable_at(lo):
		throw(f"{name}={lo:g} is not stable, cannot bracket an onset", InvalidParameterError)
	if stable_at(hi):
		throw(f"{name}={hi:g} is still stable, no onset up to it", InvalidParameterError)

	steps = 0
	while abs(hi - lo) > rtol * abs(hi):
		mid = 0.5 * (lo + hi)
		if stable_at(mid):
			lo = mid
		else:
			hi = mid
		steps += 1
	logger.info("stability onset %s=%.6g after %d bisection steps", name, hi, steps)
	return hi
