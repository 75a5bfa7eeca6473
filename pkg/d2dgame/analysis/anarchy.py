"""Price of anarchy: the best network EE a centralized controller finds on a
power grid divided by the network EE the game settles at"""

import logging
from numbers import Number
from typing import Tuple

import numpy as np

from d2dgame.game import GameConfig, run_to_equilibrium
from d2dgame.network.instance import NetworkInstance, PowerProfile
from d2dgame.network.performance import network_ee, network_ee_batch

logger = logging.getLogger(__name__)

CHUNK = 200_000


class GridTooLargeError(ValueError):
    """Raised when a grid search over every power dimension is out of reach"""


def _grid_axes(inst: NetworkInstance, resolution: int) -> Tuple["np.ndarray", ...]:
    axes = [np.linspace(0.0, ue.p_max, resolution) for ue in inst.ue_d2d for _ in range(inst.n_cell)]
    axes += [np.linspace(0.0, ue.p_max, resolution) for ue in inst.ue_cell]
    return tuple(axes)


def _profile_feasibility(
        inst: NetworkInstance, p_d2d: "np.ndarray", p_cell: "np.ndarray",
        rate_d: "np.ndarray", rate_c: "np.ndarray"
    ) -> Tuple["np.ndarray", "np.ndarray"]:
    d2d_max = np.array([ue.p_max for ue in inst.ue_d2d])
    d2d_min = np.array([ue.r_min for ue in inst.ue_d2d])
    cell_min = np.array([ue.r_min for ue in inst.ue_cell])
    budget = (p_d2d.sum(axis=-1) <= d2d_max*(1 + 1e-12)).all(axis=-1)
    qos = (rate_d >= d2d_min - 1e-12).all(axis=-1) & (rate_c >= cell_min - 1e-12).all(axis=-1)
    return budget, qos


def grid_optimum(
        inst: NetworkInstance, resolution: int = 50, max_dimensions: int = 4
    ) -> Tuple[float, PowerProfile]:
    """Return the best network EE over a grid of ``resolution`` powers per
    dimension and the profile achieving it. Points must respect every power
    budget and rate floor; when none meets the rate floors the floors are
    dropped with a warning

    Raises
    ------
    GridTooLargeError
        If the instance has more than ``max_dimensions`` power dimensions
    """
    # pylint: disable=line-too-long
    n, k = inst.n_d2d, inst.n_cell
    dims = n*k + k
    if dims > max_dimensions:
        raise GridTooLargeError(f"The instance has {dims} power dimensions but grid search is limited to {max_dimensions}. Please use fewer D2D pairs or channels, or raise max_dimensions")
    if resolution < 2:
        raise ValueError("The grid needs at least two points per dimension.")
    axes = _grid_axes(inst, resolution)
    total = resolution**dims
    best = {"qos": (-np.inf, None), "budget": (-np.inf, None)}
    for start in range(0, total, CHUNK):
        flat = np.arange(start, min(start + CHUNK, total))
        idx = np.unravel_index(flat, (resolution,)*dims)
        values = np.column_stack([axis[i] for axis, i in zip(axes, idx)])
        p_d2d = values[:, :n*k].reshape(-1, n, k)
        p_cell = values[:, n*k:]
        ee, rate_d, rate_c = network_ee_batch(inst, p_d2d, p_cell)
        budget, qos = _profile_feasibility(inst, p_d2d, p_cell, rate_d, rate_c)
        for key, mask in (("qos", budget & qos), ("budget", budget)):
            if mask.any():
                pos = int(np.argmax(np.where(mask, ee, -np.inf)))
                if ee[pos] > best[key][0]:
                    best[key] = (float(ee[pos]), PowerProfile(p_d2d[pos], p_cell[pos]))
    if best["qos"][1] is None:
        logger.warning("no grid point meets every rate floor, maximizing over the power budgets only")
        return best["budget"]
    return best["qos"]


def price_of_anarchy(
        inst: NetworkInstance, cfg: GameConfig = None, grid_resolution: int = 50,
        max_dimensions: int = 4, grid_slack: Number = 1e-2,
        equilibrium: PowerProfile = None
    ) -> float:
    """Return the price of anarchy of ``inst`` under ``cfg``

    Parameters
    ----------
    inst : NetworkInstance
        Small channel realization
    cfg : GameConfig, optional
        Game whose equilibrium is priced, energy-efficient by default
    grid_resolution : int
        Powers per dimension of the centralized grid search
    max_dimensions : int
        Largest number of power dimensions the grid search accepts
    grid_slack : Number
        The ratio is clipped below at 1 - grid_slack
    equilibrium : PowerProfile, optional
        Equilibrium to price, played from scratch when omitted

    Returns
    -------
    float
        Centralized network EE over equilibrium network EE

    Raises
    ------
    GridTooLargeError
        If the instance has too many power dimensions for grid search

    Examples
    --------
    >>> inst = NetworkInstance.uniform(1, 1, g=1e-3, g_hat=0.0)
    >>> round(price_of_anarchy(inst, grid_resolution=20), 3)
    1.0
    """
    cfg = cfg if cfg is not None else GameConfig()
    best, _ = grid_optimum(inst, grid_resolution, max_dimensions)
    if equilibrium is None:
        equilibrium = run_to_equilibrium(inst, cfg).final
    eq_ee = network_ee(inst, equilibrium)
    if eq_ee <= 0:
        raise ValueError("The equilibrium has zero network energy efficiency so its price of anarchy is unbounded.")
    _, rate_d, rate_c = network_ee_batch(inst, equilibrium.p_d2d[None], equilibrium.p_cell[None])
    _, qos = _profile_feasibility(inst, equilibrium.p_d2d[None], equilibrium.p_cell[None], rate_d, rate_c)
    if qos[0]:
        best = max(best, eq_ee)
    ratio = best/eq_ee
    logger.debug("centralized EE %.6g, equilibrium EE %.6g, ratio %.6g", best, eq_ee, ratio)
    return float(max(ratio, 1 - grid_slack))
