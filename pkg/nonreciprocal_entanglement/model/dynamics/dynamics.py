# Copyright (c) 2026, itsdave GmbH and contributors
# For license information, please see license.txt

from dataclasses import dataclass

import numpy as np
import pandas as pd

# frozen ordering of the fluctuation vector, every index below depends on it
QUADRATURES = ("x1", "y1", "x2", "y2", "q1", "p1", "q2", "p2")


@dataclass(frozen=True)
class DriftMatrix:
	a: np.ndarray


@dataclass(frozen=True)
class DiffusionMatrix:
	d: np.ndarray


def build_drift(np_, ss):
	"""8x8 drift matrix of the linearized quadrature fluctuations around ss (omega_m = 1)."""
	G1, G2 = complex(ss.G1), complex(ss.G2)
	dp = ss.Delta_prime
	a = np.zeros((8, 8))

	a[0, 0] = -np_.kappa1
	a[0, 1] = dp
	a[0, 3] = np_.J1
	a[0, 4] = 2 * G1.imag
	a[0, 6] = 2 * G2.imag

	a[1, 0] = -dp
	a[1, 1] = -np_.kappa1
	a[1, 2] = -np_.J1
	a[1, 4] = -2 * G1.real
	a[1, 6] = -2 * G2.real

	a[2, 1] = np_.J2
	a[2, 2] = -np_.kappa2
	a[2, 3] = np_.Delta_c2

	a[3, 0] = -np_.J2
	a[3, 2] = -np_.Delta_c2
	a[3, 3] = -np_.kappa2

	a[4, 4] = -np_.gamma1
	a[4, 5] = 1.0
	a[5, 0] = -2 * G1.real
	a[5, 1] = -2 * G1.imag
	a[5, 4] = -1.0
	a[5, 5] = -np_.gamma1

	a[6, 6] = -np_.gamma2
	a[6, 7] = 1.0
	a[7, 0] = -2 * G2.real
	a[7, 1] = -2 * G2.imag
	a[7, 6] = -1.0
	a[7, 7] = -np_.gamma2
	return DriftMatrix(a)


def build_diffusion(np_):
	# cavities see vacuum noise only
	mech1 = np_.gamma1 * (2 * np_.nbar_B1 + 1)
	mech2 = np_.gamma2 * (2 * np_.nbar_B2 + 1)
	d = np.diag([np_.kappa1, np_.kappa1, np_.kappa2, np_.kappa2, mech1, mech1, mech2, mech2])
	return DiffusionMatrix(d)


def matrices_frame(A, D):
	"""A and D as DataFrames labelled with the quadrature names."""
	return (
		pd.DataFrame(A.a, index=QUADRATURES, columns=QUADRATURES),
		pd.DataFrame(D.d, index=QUADRATURES, columns=QUADRATURES),
	)
