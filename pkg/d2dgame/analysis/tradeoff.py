"""EE-SE tradeoff curve of a cellular UE in the symmetric model: sweep a
target SE, invert the rate to the power that achieves it and evaluate the
EE at that power while the D2D pairs keep transmitting at a fixed power
"""

from numbers import Number
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from d2dgame.analysis.gaps import SymmetricModel
from d2dgame.network.performance import ee_utility_cellular, log2_1p

try:
    import pandas as pd
except ImportError:
    pd = None


class TradeoffPoint(NamedTuple):
    """One sweep point: target SE, the EE it costs, the power it needs and
    whether that power fits in p_max"""
    se: float
    ee: float
    power: float
    feasible: bool


class TradeoffSummary(NamedTuple):
    """Headline numbers of a feasible sweep"""
    peak_ee: float
    se_at_peak: float
    max_se: float
    ee_at_max_se: float


def se_sweep(stop: Number = 7.0, step: Number = 0.2) -> "np.ndarray":
    """Return the SE grid 0, step, ..., stop

    Examples
    --------
    >>> se_sweep(1.0, 0.5)
    array([0. , 0.5, 1. ])
    """
    if step <= 0 or stop < 0:
        raise ValueError("The SE sweep needs a positive step and a non-negative stop.")
    return np.round(np.arange(0, stop + step/2, step), 10)


def max_feasible_se(model: SymmetricModel, interferer_power: Number = None) -> float:
    """Return the SE a cellular UE reaches at p_max, the ceiling of the sweep"""
    if interferer_power is None:
        interferer_power = model.d2d.p_max
    interference = model.cellular_interference(interferer_power)
    return float(log2_1p(model.cellular.p_max*model.g/(interference + model.noise)))


def tradeoff_curve(
        model: SymmetricModel, se_grid: Sequence[Number],
        interferer_power: Number = None
    ) -> List[TradeoffPoint]:
    """Return one TradeoffPoint per target SE of ``se_grid``

    Parameters
    ----------
    model : SymmetricModel
        Symmetric network, its cellular circuit ends set the EE denominator
    se_grid : Sequence[Number]
        Target SE values in bits/s/Hz
    interferer_power : Number, optional
        Power of every D2D pair on the cellular channel, p_max by default

    Raises
    ------
    ValueError
        If ``se_grid`` is empty or holds a negative SE

    Examples
    --------
    >>> points = tradeoff_curve(SymmetricModel(), [0.0])
    >>> points[0].power, points[0].ee
    (0.0, 0.0)
    """
    se_grid = np.asarray(se_grid, dtype=float)
    if se_grid.size == 0:
        raise ValueError("An empty SE grid was passed. Please pass at least one target SE")
    if (se_grid < 0).any():
        raise ValueError("Negative target SE values were passed. Please only pass non-negative values")
    if interferer_power is None:
        interferer_power = model.d2d.p_max
    inst = model.to_instance()
    floor = (model.cellular_interference(interferer_power) + model.noise)/model.g
    p_max = model.cellular.p_max
    points = []
    for se in se_grid:
        power = float(np.expm1(se*np.log(2))*floor)
        prof = model.profile(interferer_power, power)
        ee = ee_utility_cellular(inst, prof, 0, model.cellular_circuit_ends)
        points.append(TradeoffPoint(float(se), ee, power, power <= p_max*(1 + 1e-12)))
    return points


def tradeoff_df(points: Sequence[TradeoffPoint]) -> "pd.DataFrame":
    """Return the sweep as a DataFrame with columns se, ee, power, feasible"""
    if pd is None:
        raise ImportError("pandas is required for tabular output. Please install pandas")
    return pd.DataFrame(list(points), columns=list(TradeoffPoint._fields))


def _feasible(points: Sequence[TradeoffPoint]) -> List[TradeoffPoint]:
    feasible = [point for point in points if point.feasible]
    if not feasible:
        raise ValueError("No sweep point fits in the power budget.")
    return feasible


def tradeoff_summary(points: Sequence[TradeoffPoint]) -> TradeoffSummary:
    """Return the peak EE, the SE where it occurs, the largest feasible SE
    and its EE"""
    feasible = _feasible(points)
    peak = max(feasible, key=lambda point: point.ee)
    top = max(feasible, key=lambda point: point.se)
    return TradeoffSummary(peak.ee, peak.se, top.se, top.ee)


def se_dominance_count(points: Sequence[TradeoffPoint]) -> Tuple[int, int]:
    """Return how many feasible points have a strictly higher EE than the
    largest feasible SE point, and how many feasible points there are"""
    feasible = _feasible(points)
    top = max(feasible, key=lambda point: point.se)
    return sum(point.ee > top.ee for point in feasible), len(feasible)
