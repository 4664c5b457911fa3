# Copyright (c) 2026, itsdave GmbH and contributors
# For license information, please see license.txt

import logging
import math
import re
from dataclasses import dataclass

import numpy as np

from nonreciprocal_entanglement.exceptions import InvalidParameterError, UnphysicalSubmatrixError, throw

logger = logging.getLogger(__name__)

MODES = ("a1", "a2", "B1", "B2")
UNPHYSICAL_TOL = -1e-12


@dataclass(frozen=True)
class ModePair:
	first: str
	second: str

	def __post_init__(self):
		for mode in (self.first, self.second):
			if mode not in MODES:
				throw(f"unknown mode {mode!r}, expected one of {MODES}", InvalidParameterError)
		if self.first == self.second:
			throw(f"a mode pair needs two different modes, got {self.first} twice", InvalidParameterError)

	@property
	def label(self):
		return self.first + self.second

	@property
	def indices(self):
		i, j = MODES.index(self.first), MODES.index(self.second)
		return (2 * i, 2 * i + 1), (2 * j, 2 * j + 1)

	@classmethod
	def parse(cls, label):
		modes = re.findall(r"a[12]|B[12]", label)
		if "".join(modes) != label or len(modes) != 2:
			throw(f"cannot parse mode pair {label!r}", InvalidParameterError)
		return cls(*modes)

	def __str__(self):
		return self.label


DEFAULT_PAIRS = tuple(ModePair.parse(label) for label in ("a2B1", "a2B2", "B1B2", "a1B1", "a1a2"))


@dataclass(frozen=True)
class EntanglementReport:
	pair: ModePair
	zeta: float
	E_N: float
	sigma: float
	det_sub: float


@dataclass(frozen=True)
class ContrastResult:
	pair: ModePair
	C: float
	undefined: bool


def extract_pair(V, pair):
	"""4x4 covariance block [[mu1, mu3], [mu3^T, mu2]] of the two modes of pair."""
	v = V.v if hasattr(V, "v") else np.asarray(V, dtype=float)
	first, second = pair.indices
	idx = list(first) + list(second)
	return v[np.ix_(idx, idx)]


def log_negativity(V_sub, pair):
	"""Logarithmic negativity of a two-mode Gaussian state from its 4x4 covariance block."""
	mu1, mu2, mu3 = V_sub[:2, :2], V_sub[2:, 2:], V_sub[:2, 2:]
	sigma = float(np.linalg.det(mu1) + np.linalg.det(mu2) - 2 * np.linalg.det(mu3))
	det_sub = float(np.linalg.det(V_sub))

	disc = sigma ** 2 - 4 * det_sub
	if disc < UNPHYSICAL_TOL:
		throw(f"{pair}: negative discriminant {disc:.3e}", UnphysicalSubmatrixError)
	root = math.sqrt(max(disc, 0.0))
	gap = sigma - root
	if gap < UNPHYSICAL_TOL:
		throw(f"{pair}: negative symplectic gap {gap:.3e}", UnphysicalSubmatrixError)

	# 2 det / (sigma + root) is the same number as sigma - root without the cancellation
	if sigma + root > 0:
		zeta_sq = 2 * max(det_sub, 0.0) / (sigma + root)
	else:
		zeta_sq = max(gap, 0.0) / 2
	if zeta_sq <= 0:
		throw(f"{pair}: vanishing symplectic eigenvalue, det {det_sub:.3e}", UnphysicalSubmatrixError)
	zeta = math.sqrt(zeta_sq)
	E_N = max(0.0, -math.log(2 * zeta))
	return EntanglementReport(pair, zeta, E_N, sigma, det_sub)


def entanglement_reports(V, pairs=DEFAULT_PAIRS):
	return [log_negativity(extract_pair(V, pair), pair) for pair in pairs]


def contrast_ratio(E_plus, E_minus, pair):
	"""|E+ - E-| / (E+ + E-) between the two spin directions; 0 and flagged when both vanish."""
	if E_plus < 0 or E_minus < 0:
		throw(f"{pair}: log-negativities must not be negative, got {E_plus}, {E_minus}", InvalidParameterError)
	total = E_plus + E_minus
	if total == 0:
		return ContrastResult(pair, 0.0, True)
	return ContrastResult(pair, abs(E_plus - E_minus) / total, False)
