"""Energy-efficient best response: Dinkelbach iterations over the EE ratio,
each solving the subtractive problem rate - q * power by dual water-filling"""

import logging
from numbers import Number
from typing import Tuple

import numpy as np

from d2dgame.network.instance import UEParams
from d2dgame.solver._solver import (
    LOG2E, DinkelbachConfig, DualConfig, DualResult, InterferenceView,
    SolverReport, WaterLevelError, _Solver
)

logger = logging.getLogger(__name__)


class EnergyEfficientSolver(_Solver):
    def __init__(
            self, view: InterferenceView, params: UEParams,
            gains: "np.ndarray", cfg: DinkelbachConfig = None
        ) -> None:
        """Maximizes one player's rate over consumed power. The water level
        is eta(1+alpha)log2(e)/(q+eta*beta)

        Parameters
        ----------
        view : InterferenceView
            Interference measured on each channel
        params : UEParams
            Limits and costs of the player's link
        gains : array (K,)
            Direct gain on each channel
        cfg : DinkelbachConfig, optional
            Outer loop settings, its ``inner`` field drives the dual ascent

        Examples
        --------
        >>> view = InterferenceView([0.0], noise=0.1, link="cellular")
        >>> params = UEParams(p_max=1.0, p_cir=0.1, eta=1.0)
        >>> report = EnergyEfficientSolver(view, params, [1.0]).solve()
        >>> round(report.q_star, 4)
        5.3074
        """
        self.cfg = cfg if cfg is not None else DinkelbachConfig()
        super().__init__(view, params, gains, self.cfg.inner)

    def _free_level(self, q: Number) -> float:
        if q <= 0:
            return np.inf
        return self.params.eta*LOG2E/q

    def water_level(self, alpha: Number, beta: Number, q: Number = 0.0) -> float:
        denom = q + self.params.eta*beta
        if denom <= 0:
            raise WaterLevelError("q + eta*beta is zero so the water level is infinite. Please bootstrap beta or q with a positive value")
        return self.params.eta*(1 + alpha)*LOG2E/denom

    def _multipliers_at(self, level: Number, regime: str, q: Number) -> Tuple[float, float]:
        eta = self.params.eta
        if regime == "budget":
            return 0.0, max(LOG2E/level - q/eta, 0.0)
        if regime == "qos":
            return max(level*q/(eta*LOG2E) - 1, 0.0), 0.0
        if regime == "infeasible":
            alpha = float(self.dual.alpha_cap)
            return alpha, max((1 + alpha)*LOG2E/level - q/eta, 0.0)
        return 0.0, 0.0

    def f_of_q(self, q: Number) -> float:
        """Return max over powers of rate - q * total power"""
        return self.objective(self.dual_ascent(q).powers, q)

    def solve(self) -> SolverReport:
        """Run the Dinkelbach iterations

        Returns
        -------
        SolverReport
            Powers and EE at exit, the q trace and iteration counters
        """
        q = float(self.cfg.q_init)
        trace = [q]
        inner_iters = 0
        fallbacks = 0
        outer = 0
        result = None
        residual = np.inf
        for outer in range(1, self.cfg.l_max + 1):
            result = self.dual_ascent(q)
            inner_iters += result.iters
            fallbacks += not result.converged
            rate = self.rate(result.powers)
            total = self.total_power(result.powers)
            residual = rate - q*total
            logger.debug("dinkelbach iteration %d: q=%.8g residual=%.3g", outer, q, residual)
            if residual <= self.cfg.delta:
                break
            q = rate/total
            trace.append(q)
        else:
            logger.warning("dinkelbach stopped at l_max=%d with residual %.3g", self.cfg.l_max, residual)

        q_star = self.rate(result.powers)/self.total_power(result.powers)
        if q_star > trace[-1]:
            trace.append(q_star)
        if not result.feasible:
            self._warn_infeasible()
        return SolverReport(
            powers=result.powers,
            q_star=float(q_star),
            subtractive_residual=float(residual),
            outer_iters=outer,
            inner_iters=inner_iters,
            feasible=result.feasible,
            q_trace=tuple(float(val) for val in trace),
            alpha=result.alpha,
            beta=result.beta,
            dual_fallbacks=fallbacks
        )


def transformed_objective(
        view: InterferenceView, powers: "np.ndarray", q: Number,
        params: UEParams, gains: "np.ndarray"
    ) -> float:
    """Return rate(powers) - q * total_power(powers) under ``view``

    Examples
    --------
    >>> view = InterferenceView([0.0], noise=0.1)
    >>> transformed_objective(view, [0.0], 1.0, UEParams(p_cir=0.01), [1.0])
    -0.02
    """
    return EnergyEfficientSolver(view, params, gains).objective(powers, q)


def waterfill_ee_d2d(
        view: InterferenceView, q: Number, alpha: Number, beta: Number,
        params: UEParams, gains: "np.ndarray"
    ) -> "np.ndarray":
    """Return the per-channel powers [eta(1+alpha)log2(e)/(q+eta*beta) - floor]+

    Raises
    ------
    WaterLevelError
        If q + eta*beta is zero
    """
    if q < 0 or alpha < 0 or beta < 0:
        raise ValueError("Negative q and/or multipliers were passed. Please only pass non-negative values")
    solver = EnergyEfficientSolver(view, params, gains)
    return solver.allocate(solver.water_level(alpha, beta, q))


def waterfill_ee_cellular(
        view: InterferenceView, q: Number, delta_m: Number, theta: Number,
        params: UEParams, g_c: Number
    ) -> float:
    """Return the single-channel power [eta(1+delta)log2(e)/(q+eta*theta) - floor]+"""
    return float(waterfill_ee_d2d(view, q, delta_m, theta, params, [g_c])[0])


def dual_ascent(
        view: InterferenceView, q: Number, params: UEParams,
        gains: "np.ndarray", cfg: DualConfig = None
    ) -> DualResult:
    """Return the dual ascent solution of the subtractive problem at ``q``"""
    if q < 0:
        raise ValueError("A negative q was passed. Please only pass non-negative values")
    cfg = cfg if cfg is not None else DualConfig()
    return EnergyEfficientSolver(view, params, gains, DinkelbachConfig(inner=cfg)).dual_ascent(q)


def dinkelbach_solve(
        view: InterferenceView, params: UEParams, gains: "np.ndarray",
        cfg: DinkelbachConfig = None
    ) -> SolverReport:
    """Return the EE-maximizing powers of one player against ``view``"""
    return EnergyEfficientSolver(view, params, gains, cfg).solve()


def f_of_q(
        view: InterferenceView, params: UEParams, gains: "np.ndarray",
        q: Number, cfg: DualConfig = None
    ) -> float:
    """Return F(q), the optimal subtractive objective at ``q``. It decreases
    in q and its unique root is the optimal EE."""
    cfg = cfg if cfg is not None else DualConfig()
    return EnergyEfficientSolver(view, params, gains, DinkelbachConfig(inner=cfg)).f_of_q(q)
