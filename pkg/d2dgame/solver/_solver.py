"""Abstract base class for a single player's power allocation: the frozen
interference it measures, water-filling at a given level, the projected
gradient dual ascent on the rate and power-budget multipliers, and the
exact active-set water levels the ascent converges to. Child classes define
the objective-specific water level and the outer solve
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from numbers import Number
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy import optimize

from d2dgame.network.instance import UEParams
from d2dgame.network.performance import log2_1p, safe_ratio

try:
    import pandas as pd
except ImportError:
    pd = None

logger = logging.getLogger(__name__)

LOG2E = float(np.log2(np.e))
LINKS = ("d2d", "cellular")
REGIMES = ("free", "budget", "qos", "infeasible")


class WaterLevelError(ZeroDivisionError):
    """Raised when the multipliers leave the water level unbounded"""


@dataclass(frozen=True)
class InterferenceView:
    """Aggregate interference a player measures on each of its channels.

    A D2D pair sees one entry per channel, a cellular UE a single entry for
    its own channel. ``circuit_ends`` defaults to 2 for a D2D pair
    (transmitter and receiver) and 1 for a cellular UE.
    """
    i_agg: "np.ndarray"
    noise: Number
    link: str = "d2d"
    circuit_ends: Optional[int] = None

    def __post_init__(self) -> None:
        # pylint: disable=line-too-long
        i_agg = np.atleast_1d(np.array(self.i_agg, dtype=float))
        if i_agg.ndim != 1 or i_agg.size == 0:
            raise ValueError("i_agg must be a non-empty 1-dimensional array of interference powers.")
        if (i_agg < 0).any() or self.noise < 0:
            raise ValueError("Negative interference or noise was passed. Please only pass non-negative values")
        if self.link not in LINKS:
            raise ValueError(f"Unknown link kind {self.link!r}. Please pass one of {', '.join(LINKS)}")
        if self.link == "cellular" and i_agg.size != 1:
            raise ValueError("A cellular UE transmits on a single channel so its view holds one entry.")
        if ((i_agg + self.noise) <= 0).any():
            raise ValueError("A channel without noise or interference has an unbounded rate. Please pass a positive noise power")
        i_agg.setflags(write=False)
        object.__setattr__(self, "i_agg", i_agg)
        if self.circuit_ends is None:
            object.__setattr__(self, "circuit_ends", 2 if self.link == "d2d" else 1)
        if self.circuit_ends < 0:
            raise ValueError("circuit_ends counts devices and cannot be negative.")

    @property
    def n_channels(self) -> int:
        """Number of channels the player can transmit on"""
        return self.i_agg.size


@dataclass(frozen=True)
class DualConfig:
    """Step sizes and stopping rules of the projected-gradient dual ascent.

    The step at iteration tau is ``mu0/sqrt(tau)``. The ascent starts at
    alpha=0, beta=``beta_bootstrap`` unless ``warm_start`` seeds the
    multipliers from the exact active-set solution. ``alpha_cap`` bounds the
    rate multiplier when the QoS floor is out of reach.
    """
    mu0_alpha: Number = 0.1
    mu0_beta: Number = 0.1
    tau_max: int = 500
    eps_dual: Number = 1e-6
    warm_start: bool = False
    beta_bootstrap: Number = 1e-3
    alpha_cap: Number = 1e6

    def __post_init__(self) -> None:
        # pylint: disable=line-too-long
        if min(self.mu0_alpha, self.mu0_beta, self.eps_dual, self.beta_bootstrap, self.alpha_cap) <= 0:
            raise ValueError("Non-positive dual ascent parameters were passed. Please only pass positive values")
        if self.tau_max < 1:
            raise ValueError("tau_max must allow at least one dual iteration.")


@dataclass(frozen=True)
class DinkelbachConfig:
    """Outer loop settings: start value ``q_init``, at most ``l_max``
    iterations, stop once the subtractive residual is at most ``delta``"""
    q_init: Number = 0.0
    l_max: int = 10
    delta: Number = 1e-3
    inner: DualConfig = field(default_factory=DualConfig)

    def __post_init__(self) -> None:
        if self.l_max < 1:
            raise ValueError("l_max must allow at least one outer iteration.")
        if self.delta <= 0 or self.q_init < 0:
            raise ValueError("delta must be positive and q_init non-negative.")


class DualResult(NamedTuple):
    """Outcome of one dual ascent at a fixed q"""
    powers: "np.ndarray"
    alpha: float
    beta: float
    iters: int
    feasible: bool
    converged: bool = True


@dataclass(frozen=True)
class SolverReport:
    """Result of one player's solve.

    ``q_star`` is the achieved EE for the energy-efficient solver and the
    achieved SE for the spectral-efficient one.
    """
    # pylint: disable=too-many-instance-attributes
    powers: "np.ndarray"
    q_star: float
    subtractive_residual: float
    outer_iters: int
    inner_iters: int
    feasible: bool
    q_trace: Tuple[float, ...]
    alpha: float = 0.0
    beta: float = 0.0
    dual_fallbacks: int = 0

    @property
    def df(self) -> "pd.DataFrame":
        """Return the q trace as a DataFrame with columns iteration and q"""
        if pd is None:
            raise ImportError("pandas is required for the df property. Please install pandas")
        return pd.DataFrame({"iteration": np.arange(len(self.q_trace)), "q": list(self.q_trace)})


class _Solver(ABC):
    def __init__(
            self, view: InterferenceView, params: UEParams,
            gains: "np.ndarray", dual: DualConfig = None
        ) -> None:
        """Single-player allocation problem under frozen interference

        Parameters
        ----------
        view : InterferenceView
            Interference measured on each channel
        params : UEParams
            Power budget, rate floor, circuit power and PA efficiency
        gains : array (K,)
            Direct gain on each channel
        dual : DualConfig, optional
            Dual ascent settings
        """
        # pylint: disable=line-too-long
        self.view = view
        self.params = params
        self.gains = np.atleast_1d(np.array(gains, dtype=float))
        self.dual = dual if dual is not None else DualConfig()
        if self.gains.shape != view.i_agg.shape:
            raise ValueError(f"{self.gains.size} gains were passed for {view.n_channels} channels.")
        if (self.gains <= 0).any():
            raise ValueError("Non-positive direct gains were passed. Please only pass positive values")
        self.floors = (view.i_agg + view.noise)/self.gains
        self.sum_level = self._sum_level()
        self.rate_level = self._rate_level()

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(link={self.view.link!r}, channels={self.view.n_channels}, p_max={self.params.p_max}, r_min={self.params.r_min})"

    @property
    def feasible(self) -> bool:
        """True when the rate floor is reachable within the power budget"""
        return self.rate_level <= self.sum_level*(1 + 1e-12)

    def allocate(self, level: Number) -> "np.ndarray":
        """Return the water-filling powers [level - floor]+ per channel"""
        return np.maximum(level - self.floors, 0.0)

    def rate(self, powers: "np.ndarray") -> float:
        """Return the rate achieved by ``powers`` under the frozen interference"""
        sinr = safe_ratio(np.asarray(powers, dtype=float)*self.gains, self.view.i_agg + self.view.noise)
        return float(log2_1p(sinr).sum())

    def total_power(self, powers: "np.ndarray") -> float:
        """Return amplifier input plus circuit power"""
        return float(np.sum(powers)/self.params.eta + self.view.circuit_ends*self.params.p_cir)

    def objective(self, powers: "np.ndarray", q: Number) -> float:
        """Return the subtractive objective rate - q * total power"""
        return self.rate(powers) - q*self.total_power(powers)

    def _rate_at_level(self, level: Number) -> float:
        return float(np.log2(np.maximum(level/self.floors, 1.0)).sum())

    def _sum_level(self) -> float:
        """Water level that spends exactly the power budget"""
        floors = np.sort(self.floors)
        counts = np.arange(1, floors.size + 1)
        levels = (self.params.p_max + np.cumsum(floors))/counts
        active = np.nonzero(levels > floors)[0]
        return float(levels[active[-1]])

    def _rate_level(self) -> float:
        """Lowest water level meeting the rate floor"""
        low = float(self.floors.min())
        r_min = float(self.params.r_min)
        if r_min <= 0:
            return low
        # the weakest floor alone reaches r_min at low*2**r_min
        high = low*2**(r_min + 1)
        return optimize.brentq(
            lambda level: self._rate_at_level(level) - r_min,
            low, high, xtol=1e-15*low, rtol=1e-14
        )

    def _active_level(self, q: Number) -> Tuple[float, str]:
        """Return the optimal water level at ``q`` and the regime that sets it"""
        if not self.feasible:
            return self.sum_level, "infeasible"
        free = self._free_level(q)
        if free >= self.sum_level:
            return self.sum_level, "budget"
        if free <= self.rate_level and self.params.r_min > 0:
            return self.rate_level, "qos"
        return free, "free"

    @abstractmethod
    def _free_level(self, q: Number) -> float:
        """Return the water level with both multipliers at zero"""

    @abstractmethod
    def water_level(self, alpha: Number, beta: Number, q: Number = 0.0) -> float:
        """Return the water level set by the multipliers"""

    @abstractmethod
    def _multipliers_at(self, level: Number, regime: str, q: Number) -> Tuple[float, float]:
        """Return the multipliers (alpha, beta) that produce ``level``"""

    def _recover_level(self, alpha: float, beta: float, q: Number) -> float:
        """Water level of the multipliers projected between the rate floor
        and the power budget"""
        if not self.feasible:
            return self.sum_level
        try:
            level = self.water_level(alpha, beta, q)
        except WaterLevelError:
            return self.sum_level
        return min(max(level, self.rate_level), self.sum_level)

    def dual_ascent(self, q: Number = 0.0) -> DualResult:
        """Run the projected-gradient multiplier updates at a fixed ``q``.

        alpha follows the rate-floor gradient r - r_min, beta the budget
        gradient p_max - sum(p), both with step mu0/sqrt(tau), until the
        multipliers move less than ``eps_dual``. The powers water-fill at the
        level of the final multipliers, projected so that the budget and the
        rate floor hold. When ``tau_max`` is reached first
        the exact active-set solution is returned with ``converged=False``.

        Parameters
        ----------
        q : Number
            Current EE estimate, 0 for a pure rate maximization

        Returns
        -------
        DualResult
            Powers, multipliers, iteration count, QoS feasibility and
            whether the ascent met its own stopping rule
        """
        # pylint: disable=line-too-long
        cfg = self.dual
        if cfg.warm_start:
            alpha, beta = self._multipliers_at(*self._active_level(q), q)
        else:
            alpha, beta = 0.0, float(cfg.beta_bootstrap)
        r_min, p_max = float(self.params.r_min), float(self.params.p_max)

        converged = False
        tau = 0
        for tau in range(1, cfg.tau_max + 1):
            try:
                level = self.water_level(alpha, beta, q)
            except WaterLevelError:
                beta = float(cfg.beta_bootstrap)
                level = self.water_level(alpha, beta, q)
            step = 1/np.sqrt(tau)
            rate = self._rate_at_level(level)
            spent = float(np.maximum(level - self.floors, 0.0).sum())
            new_alpha = min(max(alpha - cfg.mu0_alpha*step*(rate - r_min), 0.0), cfg.alpha_cap)
            new_beta = max(beta - cfg.mu0_beta*step*(p_max - spent), 0.0)
            change = max(abs(new_alpha - alpha), abs(new_beta - beta))
            alpha, beta = float(new_alpha), float(new_beta)
            if change < cfg.eps_dual:
                converged = True
                break

        if converged:
            level = self._recover_level(alpha, beta, q)
            logger.debug("dual ascent at q=%.6g converged after %d iterations (alpha=%.4g, beta=%.4g)", q, tau, alpha, beta)
        else:
            level, regime = self._active_level(q)
            alpha, beta = self._multipliers_at(level, regime, q)
            logger.debug("dual ascent at q=%.6g reached tau_max=%d, using the exact %s water level", q, cfg.tau_max, regime)
        return DualResult(self.allocate(level), alpha, beta, tau, self.feasible, converged)

    @abstractmethod
    def solve(self) -> SolverReport:
        """Return the player's best response"""

    def _warn_infeasible(self) -> None:
        logger.warning(
            "%s rate floor %.4g is out of reach within p_max=%.4g, falling back to the full-budget allocation",
            self.view.link, self.params.r_min, self.params.p_max
        )
