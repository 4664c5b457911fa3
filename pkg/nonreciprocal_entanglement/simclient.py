import logging

from nonreciprocal_entanglement.model.dynamics.dynamics import build_diffusion, build_drift
from nonreciprocal_entanglement.model.entanglement.entanglement import (
    DEFAULT_PAIRS,
    contrast_ratio,
    entanglement_reports,
)
from nonreciprocal_entanglement.model.lyapunov.lyapunov import solve_lyapunov
from nonreciprocal_entanglement.model.meanfield.meanfield import solve_meanfield
from nonreciprocal_entanglement.model.params.params import load_params, reference_params, resolve, with_direction
from nonreciprocal_entanglement.model.stability.stability import is_stable
from nonreciprocal_entanglement.tools import dump_matrices, evaluate_point

logger = logging.getLogger(__name__)


class Simulator():

    def __init__(self, params=None, overrides=None, branch=None, method="kronecker"):
        if params is None:
            params = reference_params()
        elif isinstance(params, str):
            params, file_overrides = load_params(params)
            overrides = {**file_overrides, **(overrides or {})}
        self.params = params
        self.overrides = dict(overrides or {})
        self.branch = branch
        self.method = method
        self.np_ = resolve(params, self.overrides)

    def get_meanfield(self):
        return solve_meanfield(self.np_)

    def get_steady_state(self):
        return self.get_meanfield().branch(self.branch)

    def get_matrices(self):
        ss = self.get_steady_state()
        return build_drift(self.np_, ss), build_diffusion(self.np_)

    def get_matrix_frames(self):
        return dump_matrices(self.np_, self.branch)

    def get_stability(self):
        A, _ = self.get_matrices()
        return is_stable(A)

    def get_covariance(self):
        A, D = self.get_matrices()
        return solve_lyapunov(A, D, self.method)

    def get_entanglement(self, pairs=DEFAULT_PAIRS):
        return {r.pair.label: r for r in entanglement_reports(self.get_covariance(), pairs)}

    def evaluate(self, direction=None, pairs=DEFAULT_PAIRS):
        np_ = with_direction(self.np_, direction) if direction else self.np_
        return evaluate_point(np_, self.branch, pairs, self.method)

    def get_contrast(self, pairs=DEFAULT_PAIRS):
        #beide Drehrichtungen am selben Punkt rechnen
        plus = Simulator(self.params, self.overrides, self.branch, self.method)
        plus.np_ = with_direction(self.np_, "CW")
        minus = Simulator(self.params, self.overrides, self.branch, self.method)
        minus.np_ = with_direction(self.np_, "CCW")
        e_plus, e_minus = plus.get_entanglement(pairs), minus.get_entanglement(pairs)
        return {
            label: contrast_ratio(e_plus[label].E_N, e_minus[label].E_N, e_plus[label].pair)
            for label in e_plus
        }
