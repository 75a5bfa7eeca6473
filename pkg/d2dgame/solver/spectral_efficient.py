"""Spectral-efficient best response: rate maximization under the power
budget and rate floor, the baseline a selfish throughput-driven UE plays"""

import logging
from numbers import Number
from typing import Tuple

import numpy as np

from d2dgame.network.instance import UEParams
from d2dgame.solver._solver import (
    LOG2E, DualConfig, InterferenceView, SolverReport, WaterLevelError, _Solver
)

logger = logging.getLogger(__name__)


class SpectralEfficientSolver(_Solver):
    """Maximizes one player's rate. The water level is (1+alpha)log2(e)/beta,
    so the budget multiplier beta must stay positive

    Parameters
    ----------
    view : InterferenceView
        Interference measured on each channel
    params : UEParams
        Limits of the player's link, eta and p_cir do not affect the solution
    gains : array (K,)
        Direct gain on each channel
    dual : DualConfig, optional
        Dual ascent settings
    """

    def _free_level(self, q: Number) -> float:
        return np.inf

    def water_level(self, alpha: Number, beta: Number, q: Number = 0.0) -> float:
        if beta <= 0:
            raise WaterLevelError("beta is zero so the water level is infinite. Please bootstrap beta with a positive value")
        return (1 + alpha)*LOG2E/beta

    def _multipliers_at(self, level: Number, regime: str, q: Number) -> Tuple[float, float]:
        if regime == "infeasible":
            alpha = float(self.dual.alpha_cap)
            return alpha, (1 + alpha)*LOG2E/level
        return 0.0, LOG2E/level

    def solve(self) -> SolverReport:
        """Return the rate-maximizing powers. A single channel with a
        reachable rate floor transmits at p_max without dual iterations"""
        if self.view.n_channels == 1 and self.feasible:
            powers = np.array([float(self.params.p_max)])
            alpha, beta = self._multipliers_at(self.sum_level, "budget", 0.0)
            iters, feasible, fallbacks = 0, True, 0
        else:
            result = self.dual_ascent(0.0)
            powers, alpha, beta = result.powers, result.alpha, result.beta
            iters, feasible = result.iters, result.feasible
            fallbacks = int(not result.converged)
        if not feasible:
            self._warn_infeasible()
        se = self.rate(powers)
        logger.debug("spectral-efficient solve reached SE %.6g after %d dual iterations", se, iters)
        return SolverReport(
            powers=powers,
            q_star=se,
            subtractive_residual=0.0,
            outer_iters=1,
            inner_iters=iters,
            feasible=feasible,
            q_trace=(se,),
            alpha=alpha,
            beta=beta,
            dual_fallbacks=fallbacks
        )


def waterfill_se_d2d(
        view: InterferenceView, alpha: Number, beta: Number,
        params: UEParams, gains: "np.ndarray"
    ) -> "np.ndarray":
    """Return the per-channel powers [(1+alpha)log2(e)/beta - floor]+

    Raises
    ------
    WaterLevelError
        If beta is zero
    """
    if alpha < 0 or beta < 0:
        raise ValueError("Negative multipliers were passed. Please only pass non-negative values")
    solver = SpectralEfficientSolver(view, params, gains)
    return solver.allocate(solver.water_level(alpha, beta))


def waterfill_se_cellular(
        view: InterferenceView, delta_m: Number, theta: Number,
        params: UEParams, g_c: Number
    ) -> float:
    """Return the single-channel power [(1+delta)log2(e)/theta - floor]+"""
    return float(waterfill_se_d2d(view, delta_m, theta, params, [g_c])[0])


def solve_se(
        view: InterferenceView, params: UEParams, gains: "np.ndarray",
        cfg: DualConfig = None
    ) -> SolverReport:
    """Return the SE-maximizing powers of one player against ``view``

    Examples
    --------
    >>> view = InterferenceView([0.002], noise=1e-7, link="cellular")
    >>> round(solve_se(view, UEParams(p_max=0.2), [1.0]).q_star, 3)
    6.658
    """
    return SpectralEfficientSolver(view, params, gains, cfg).solve()
