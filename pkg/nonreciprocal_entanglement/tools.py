# Copyright (c) 2026, itsdave GmbH and contributors
# For license information, please see license.txt

import logging
from dataclasses import dataclass, field

from nonreciprocal_entanglement.exceptions import UnphysicalSubmatrixError, ValidationError
from nonreciprocal_entanglement.model.dynamics.dynamics import build_diffusion, build_drift, matrices_frame
from nonreciprocal_entanglement.model.entanglement.entanglement import DEFAULT_PAIRS, extract_pair, log_negativity
from nonreciprocal_entanglement.model.lyapunov.lyapunov import solve_lyapunov, uncertainty_check
from nonreciprocal_entanglement.model.meanfield.meanfield import solve_meanfield
from nonreciprocal_entanglement.model.stability.stability import is_stable

logger = logging.getLogger(__name__)


@dataclass
class PointResult:
    np_: object
    status: str = "ok"
    message: str = ""
    solution: object = None
    steady_state: object = None
    stability: object = None
    covariance: object = None
    bona_fide: bool = None
    bona_fide_min_eig: float = float("nan")
    reports: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.status == "ok"


def evaluate_point(np_, branch=None, pairs=DEFAULT_PAIRS, method="kronecker"):
    """Full pipeline for one normalized parameter point.

    Never raises on numerical trouble: the failing stage sets status and message,
    everything computed before it stays on the result.
    """
    result = PointResult(np_)
    try:
        result.solution = solve_meanfield(np_)
        result.steady_state = result.solution.branch(branch)
        A = build_drift(np_, result.steady_state)
        D = build_diffusion(np_)
        result.stability = is_stable(A)
        if not result.stability.stable:
            # kein Gleichgewicht, also auch keine Kovarianzmatrix
            result.status = "unstable"
            return result
        result.covariance = solve_lyapunov(A, D, method)
        result.bona_fide, result.bona_fide_min_eig = uncertainty_check(result.covariance)
        for pair in pairs:
            try:
                result.reports[pair.label] = log_negativity(extract_pair(result.covariance, pair), pair)
            except UnphysicalSubmatrixError as e:
                # nur dieses Paar fehlt, die anderen bleiben gültig
                result.status = e.status
                result.message = str(e)
    except ValidationError as e:
        result.status = e.status
        result.message = str(e)
    return result


def dump_matrices(np_, branch=None):
    """Drift and diffusion matrix of one point as labelled DataFrames."""
    ss = solve_meanfield(np_).branch(branch)
    return matrices_frame(build_drift(np_, ss), build_diffusion(np_))


def point_summary(result):
    # Ausgabe für den "point"-Befehl, alles JSON-fähig
    summary = {
        "status": result.status,
        "message": result.message,
        "parameters": result.np_.as_dict(),
    }
    if result.solution is not None:
        summary["branches"] = [
            {
                "u": ss.u,
                "alpha1": [ss.alpha1.real, ss.alpha1.imag],
                "alpha2": [ss.alpha2.real, ss.alpha2.imag],
                "beta1": [ss.beta1.real, ss.beta1.imag],
                "beta2": [ss.beta2.real, ss.beta2.imag],
                "Delta_prime": ss.Delta_prime,
                "residual": ss.residual,
                "stable": stable,
            }
            for ss, stable in zip(result.solution.branches, result.solution.stable)
        ]
        summary["selected_u"] = result.steady_state.u if result.steady_state is not None else None
        summary["multistable"] = result.solution.multistable
    if result.stability is not None:
        summary["stable"] = result.stability.stable
        summary["margin"] = result.stability.margin
        summary["method_agreement"] = result.stability.method_agreement
        summary["eigenvalues"] = [[ev.real, ev.imag] for ev in result.stability.eigenvalues]
    if result.covariance is not None:
        summary["lyapunov_residual"] = result.covariance.residual
        summary["bona_fide"] = result.bona_fide
        summary["bona_fide_min_eig"] = result.bona_fide_min_eig
        summary["covariance"] = result.covariance.v.tolist()
    summary["entanglement"] = {
        label: {"E_N": r.E_N, "zeta": r.zeta, "sigma": r.sigma, "det_sub": r.det_sub}
        for label, r in result.reports.items()
    }
    return summary
