"""Sequential best-response game over all D2D pairs and cellular UEs. Each
player only measures the aggregate interference on its channels, answers
with its policy's best response and the round moves on with the freshest
profile until no power changes by more than eps_eq
"""

import logging
from dataclasses import dataclass, field
from numbers import Number
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from d2dgame.network.instance import NetworkInstance, PowerProfile
from d2dgame.network.performance import (
    cellular_interference, cellular_sinr_vector, d2d_interference,
    d2d_sinr_matrix, log2_1p, safe_ratio
)
from d2dgame.solver import (
    DinkelbachConfig, DualConfig, InterferenceView, SolverReport,
    dinkelbach_solve, solve_se
)

try:
    import pandas as pd
except ImportError:
    pd = None

logger = logging.getLogger(__name__)

POLICIES = ("energy-efficient", "spectral-efficient", "random")
PLAYER_KINDS = ("d2d", "cellular")


class Player(NamedTuple):
    """A D2D pair (kind "d2d") or a cellular UE (kind "cellular")"""
    kind: str
    index: int


def default_order(inst: NetworkInstance) -> Tuple[Player, ...]:
    """Return D2D pairs in index order followed by cellular UEs"""
    return tuple(
        [Player("d2d", i) for i in range(inst.n_d2d)]
        + [Player("cellular", k) for k in range(inst.n_cell)]
    )


@dataclass(frozen=True)
class GameConfig:
    """Settings of one game.

    Parameters
    ----------
    policy : str
        One of energy-efficient, spectral-efficient or random
    max_rounds : int
        Maximum number of rounds
    eps_eq : Number
        Largest power change in watts that still counts as converged
    update_order : Sequence[Tuple[str, int]], optional
        Permutation of all players, D2D pairs then cellular UEs by default
    rng_seed : int, optional
        Seed of the random policy
    dinkelbach : DinkelbachConfig
        Settings of the energy-efficient best response
    dual : DualConfig
        Settings of the spectral-efficient best response
    """
    policy: str = "energy-efficient"
    max_rounds: int = 20
    eps_eq: Number = 1e-4
    update_order: Optional[Sequence[Tuple[str, int]]] = None
    rng_seed: Optional[int] = None
    dinkelbach: DinkelbachConfig = field(default_factory=DinkelbachConfig)
    dual: DualConfig = field(default_factory=DualConfig)

    def __post_init__(self) -> None:
        # pylint: disable=line-too-long
        if self.policy not in POLICIES:
            raise ValueError(f"Unknown policy {self.policy!r}. Please pass one of {', '.join(POLICIES)}")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must allow at least one round.")
        if self.eps_eq <= 0:
            raise ValueError("A non-positive eps_eq was passed. Please only pass positive values")
        if self.update_order is not None:
            object.__setattr__(self, "update_order", tuple(Player(*player) for player in self.update_order))

    def order(self, inst: NetworkInstance) -> Tuple[Player, ...]:
        """Return the update order resolved against ``inst``"""
        if self.update_order is None:
            return default_order(inst)
        if sorted(self.update_order) != sorted(default_order(inst)):
            raise ValueError("update_order must list every D2D pair and cellular UE exactly once.")
        return self.update_order


@dataclass(frozen=True)
class GameTrace:
    """Per-round record of a game. Row t of every utility array belongs to
    the profile after round t+1"""
    # pylint: disable=too-many-instance-attributes
    initial: PowerProfile
    profiles: Tuple[PowerProfile, ...]
    ee_d2d: "np.ndarray"
    ee_cell: "np.ndarray"
    se_d2d: "np.ndarray"
    se_cell: "np.ndarray"
    outer_iters: "np.ndarray"
    inner_iters: "np.ndarray"
    rounds_to_converge: Optional[int]
    converged: bool
    order: Tuple[Player, ...]
    policy: str

    @property
    def final(self) -> PowerProfile:
        """Profile after the last round played"""
        return self.profiles[-1]

    @property
    def rounds(self) -> int:
        """Number of rounds played"""
        return len(self.profiles)

    @property
    def df(self) -> "pd.DataFrame":
        """Return one row per round and player with columns round, kind,
        index, ee and se"""
        if pd is None:
            raise ImportError("pandas is required for the df property. Please install pandas")
        rows = []
        for t in range(self.rounds):
            for i in range(self.ee_d2d.shape[1]):
                rows.append((t + 1, "d2d", i, self.ee_d2d[t, i], self.se_d2d[t, i]))
            for k in range(self.ee_cell.shape[1]):
                rows.append((t + 1, "cellular", k, self.ee_cell[t, k], self.se_cell[t, k]))
        return pd.DataFrame(rows, columns=["round", "kind", "index", "ee", "se"])


def interference_view(
        inst: NetworkInstance, prof: PowerProfile, player: Tuple[str, int]
    ) -> InterferenceView:
    """Return the aggregate interference ``player`` measures, excluding
    its own transmission

    Examples
    --------
    >>> inst = NetworkInstance.uniform(2, 1, g=1.0, g_hat=0.01)
    >>> prof = PowerProfile([[0.1], [0.1]], [0.0])
    >>> float(interference_view(inst, prof, ("cellular", 0)).i_agg[0])
    0.002
    """
    kind, index = player
    if kind == "d2d":
        if not 0 <= index < inst.n_d2d:
            raise IndexError(f"D2D pair index {index} is out of range for {inst.n_d2d} pairs.")
        i_agg = d2d_interference(inst, prof.p_d2d, prof.p_cell)[index]
        return InterferenceView(i_agg, inst.noise, "d2d")
    if kind == "cellular":
        if not 0 <= index < inst.n_cell:
            raise IndexError(f"Cellular UE index {index} is out of range for {inst.n_cell} UEs.")
        i_agg = cellular_interference(inst, prof.p_d2d)[index]
        return InterferenceView([i_agg], inst.noise, "cellular")
    raise ValueError(f"Unknown player kind {kind!r}. Please pass one of {', '.join(PLAYER_KINDS)}")


def _player_gains(inst: NetworkInstance, player: Player) -> "np.ndarray":
    if player.kind == "d2d":
        return inst.g_d2d[player.index]
    return inst.g_cell[player.index:player.index + 1]


def _player_params(inst: NetworkInstance, player: Player):
    return inst.ue_d2d[player.index] if player.kind == "d2d" else inst.ue_cell[player.index]


def random_allocation(
        inst: NetworkInstance, player: Tuple[str, int], rng: "np.random.Generator"
    ) -> "np.ndarray":
    """Return a random feasible strategy for ``player``.

    A D2D pair spreads a uniform share s of its budget over its channels in
    proportion to uniform weights; a cellular UE draws its power uniformly
    from [0, p_max].
    """
    player = Player(*player)
    params = _player_params(inst, player)
    if player.kind == "d2d":
        weights = rng.uniform(size=inst.n_cell)
        scale = rng.uniform()
        total = weights.sum()
        if total <= 0:
            return np.zeros(inst.n_cell)
        return scale*params.p_max*weights/total
    return np.array([rng.uniform(0.0, params.p_max)])


def best_response(
        inst: NetworkInstance, prof: PowerProfile, player: Tuple[str, int],
        cfg: GameConfig, rng: "np.random.Generator" = None
    ) -> Tuple["np.ndarray", Optional[SolverReport]]:
    """Return the powers ``player`` answers ``prof`` with under
    ``cfg.policy`` and the solver report when a solver was run"""
    player = Player(*player)
    if cfg.policy == "random":
        rng = rng if rng is not None else np.random.default_rng(cfg.rng_seed)
        return random_allocation(inst, player, rng), None
    view = interference_view(inst, prof, player)
    params = _player_params(inst, player)
    gains = _player_gains(inst, player)
    if cfg.policy == "energy-efficient":
        report = dinkelbach_solve(view, params, gains, cfg.dinkelbach)
    else:
        report = solve_se(view, params, gains, cfg.dual)
    return report.powers, report


def _play_round(
        inst: NetworkInstance, prof: PowerProfile, cfg: GameConfig,
        order: Sequence[Player], rng: "np.random.Generator"
    ) -> Tuple[PowerProfile, List[SolverReport]]:
    reports = []
    for player in order:
        powers, report = best_response(inst, prof, player, cfg, rng)
        if player.kind == "d2d":
            prof = prof.with_d2d(player.index, powers)
        else:
            prof = prof.with_cellular(player.index, float(powers[0]))
        if report is not None:
            reports.append(report)
            if not report.feasible:
                logger.debug("%s %d cannot meet its rate floor", player.kind, player.index)
    return prof, reports


def play_round(
        inst: NetworkInstance, prof: PowerProfile, cfg: GameConfig,
        rng: "np.random.Generator" = None
    ) -> PowerProfile:
    """Replace every player, in update order, by its best response to the
    profile as updated so far in this round

    Parameters
    ----------
    inst : NetworkInstance
        Channel realization
    prof : PowerProfile
        Profile at the start of the round
    cfg : GameConfig
        Policy and update order
    rng : np.random.Generator, optional
        Source of the random policy's draws, seeded from ``cfg.rng_seed``
        when omitted

    Returns
    -------
    PowerProfile
        Profile at the end of the round
    """
    rng = rng if rng is not None else np.random.default_rng(cfg.rng_seed)
    new_prof, _ = _play_round(inst, prof, cfg, cfg.order(inst), rng)
    return new_prof


def profile_utilities(
        inst: NetworkInstance, prof: PowerProfile
    ) -> Tuple["np.ndarray", "np.ndarray", "np.ndarray", "np.ndarray"]:
    """Return the EE and SE of every link as (ee_d2d, ee_cell, se_d2d, se_cell).
    A link drawing no power at all gets NaN EE"""
    se_d2d = log2_1p(d2d_sinr_matrix(inst, prof)).sum(axis=1)
    se_cell = log2_1p(cellular_sinr_vector(inst, prof))
    total_d2d = np.array([
        prof.p_d2d[i].sum()/ue.eta + 2*ue.p_cir for i, ue in enumerate(inst.ue_d2d)
    ]).reshape(-1)
    total_cell = np.array([
        prof.p_cell[k]/ue.eta + ue.p_cir for k, ue in enumerate(inst.ue_cell)
    ]).reshape(-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ee_d2d = np.where(total_d2d > 0, se_d2d/np.where(total_d2d > 0, total_d2d, 1.0), np.nan)
        ee_cell = np.where(total_cell > 0, se_cell/np.where(total_cell > 0, total_cell, 1.0), np.nan)
    return ee_d2d, ee_cell, se_d2d, se_cell


def run_to_equilibrium(
        inst: NetworkInstance, cfg: GameConfig, initial: PowerProfile = None
    ) -> GameTrace:
    """Play rounds from ``initial`` (all powers zero by default) until the
    largest power change drops below ``cfg.eps_eq`` or ``cfg.max_rounds``
    rounds have been played. The random policy always plays every round
    and never converges.

    Examples
    --------
    >>> inst = NetworkInstance.uniform(2, 2, g=1.0, g_hat=0.0)
    >>> trace = run_to_equilibrium(inst, GameConfig())
    >>> trace.converged, trace.rounds_to_converge
    (True, 2)
    """
    order = cfg.order(inst)
    rng = np.random.default_rng(cfg.rng_seed)
    prof = initial if initial is not None else PowerProfile.zeros(inst)
    profiles, utilities, outer, inner = [], [], [], []
    converged, rounds_to_converge = False, None
    for t in range(1, cfg.max_rounds + 1):
        new_prof, reports = _play_round(inst, prof, cfg, order, rng)
        profiles.append(new_prof)
        utilities.append(profile_utilities(inst, new_prof))
        outer.append(sum(report.outer_iters for report in reports))
        inner.append(sum(report.inner_iters for report in reports))
        change = new_prof.max_change(prof)
        prof = new_prof
        logger.debug("%s round %d: max power change %.3g", cfg.policy, t, change)
        if cfg.policy != "random" and change < cfg.eps_eq:
            converged, rounds_to_converge = True, t
            break
    if cfg.policy != "random" and not converged:
        logger.warning("%s game did not converge within %d rounds", cfg.policy, cfg.max_rounds)

    ee_d2d, ee_cell, se_d2d, se_cell = (np.array(series) for series in zip(*utilities))
    return GameTrace(
        initial=initial if initial is not None else PowerProfile.zeros(inst),
        profiles=tuple(profiles),
        ee_d2d=ee_d2d,
        ee_cell=ee_cell,
        se_d2d=se_d2d,
        se_cell=se_cell,
        outer_iters=np.array(outer),
        inner_iters=np.array(inner),
        rounds_to_converge=rounds_to_converge,
        converged=converged,
        order=order,
        policy=cfg.policy
    )


def simplex_lattice(units: int, n: int) -> "np.ndarray":
    """Return every vector of ``n`` non-negative integers summing to at most
    ``units``, one per row

    Examples
    --------
    >>> simplex_lattice(1, 2)
    array([[0, 0],
           [0, 1],
           [1, 0]])
    """
    points = np.arange(units + 1).reshape(-1, 1)
    for _ in range(n - 1):
        counts = units - points.sum(axis=1) + 1
        starts = np.cumsum(counts) - counts
        points = np.repeat(points, counts, axis=0)
        column = np.arange(counts.sum()) - np.repeat(starts, counts)
        points = np.column_stack([points, column])
    return points


def _deviation_utilities(
        view: InterferenceView, candidates: "np.ndarray", gains: "np.ndarray",
        params, policy: str, qos: bool = True
    ) -> "np.ndarray":
    sinr = safe_ratio(candidates*gains, view.i_agg + view.noise)
    rates = log2_1p(sinr).sum(axis=1)
    utility = rates
    if policy == "energy-efficient":
        total = candidates.sum(axis=1)/params.eta + view.circuit_ends*params.p_cir
        with np.errstate(divide="ignore", invalid="ignore"):
            utility = np.where(total > 0, rates/np.where(total > 0, total, 1.0), 0.0)
    if not qos:
        return utility
    return np.where(rates >= params.r_min - 1e-12, utility, -np.inf)


def verify_equilibrium(
        inst: NetworkInstance, prof: PowerProfile, policy: str,
        grid_step: Number, relative: bool = True
    ) -> float:
    """Return the largest utility gain any single player obtains by
    deviating to a grid strategy of resolution ``grid_step`` that respects
    its power budget and rate floor. A value at or near 0 certifies the
    profile as an equilibrium at grid resolution

    Parameters
    ----------
    inst : NetworkInstance
        Channel realization
    prof : PowerProfile
        Profile to certify
    policy : str
        energy-efficient (EE utilities) or spectral-efficient (SE utilities)
    grid_step : Number
        Power resolution of the deviation grid in watts
    relative : bool
        Report gains relative to the player's current utility

    Raises
    ------
    ValueError
        If ``grid_step`` is not positive or ``policy`` has no utility
    """
    # pylint: disable=line-too-long
    if grid_step <= 0:
        raise ValueError("A non-positive grid_step was passed. Please only pass positive values")
    if policy not in POLICIES[:2]:
        raise ValueError(f"Equilibria can only be certified for {' and '.join(POLICIES[:2])} utilities.")
    best_gain = 0.0
    for player in default_order(inst):
        view = interference_view(inst, prof, player)
        params = _player_params(inst, player)
        gains = _player_gains(inst, player)
        units = int(np.floor(params.p_max/grid_step + 1e-9))
        candidates = simplex_lattice(units, gains.size)*grid_step
        own = prof.p_d2d[player.index] if player.kind == "d2d" else prof.p_cell[player.index:player.index + 1]
        # the held point is scored as played, its rate floor may have drifted
        current = float(_deviation_utilities(view, own.reshape(1, -1), gains, params, policy, qos=False)[0])
        deviation = _deviation_utilities(view, candidates, gains, params, policy).max()
        gain = deviation - current
        if relative and current > 0:
            gain /= current
        if gain > best_gain:
            logger.debug("%s %d gains %.3g by deviating", player.kind, player.index, gain)
        best_gain = max(best_gain, float(gain))
    return best_gain
