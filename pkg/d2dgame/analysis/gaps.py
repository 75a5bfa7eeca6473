"""EE and SE gaps between the energy-efficient and spectral-efficient
allocations, both on arbitrary instances and in closed form for the
symmetric model where every signal channel has gain g and every
interference channel gain I*g
"""

from dataclasses import dataclass, field, replace
from numbers import Number
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from d2dgame.analysis._search import golden_section_maximize
from d2dgame.network.instance import NetworkInstance, PowerProfile, UEParams
from d2dgame.network.performance import (
    ee_utility_cellular, ee_utility_d2d, log2_1p, se_utility_cellular,
    se_utility_d2d
)


def ee_gap_d2d(inst: NetworkInstance, prof_ee: PowerProfile, prof_se: PowerProfile, i: int) -> float:
    """Return EE(prof_ee) - EE(prof_se) of D2D pair ``i``"""
    return ee_utility_d2d(inst, prof_ee, i) - ee_utility_d2d(inst, prof_se, i)


def se_gap_d2d(inst: NetworkInstance, prof_ee: PowerProfile, prof_se: PowerProfile, i: int) -> float:
    """Return SE(prof_se) - SE(prof_ee) of D2D pair ``i``"""
    return se_utility_d2d(inst, prof_se, i) - se_utility_d2d(inst, prof_ee, i)


def ee_gap_cellular(
        inst: NetworkInstance, prof_ee: PowerProfile, prof_se: PowerProfile,
        k: int, circuit_ends: int = 1
    ) -> float:
    """Return EE(prof_ee) - EE(prof_se) of cellular UE ``k``"""
    return (
        ee_utility_cellular(inst, prof_ee, k, circuit_ends)
        - ee_utility_cellular(inst, prof_se, k, circuit_ends)
    )


def se_gap_cellular(inst: NetworkInstance, prof_ee: PowerProfile, prof_se: PowerProfile, k: int) -> float:
    """Return SE(prof_se) - SE(prof_ee) of cellular UE ``k``"""
    return se_utility_cellular(inst, prof_se, k) - se_utility_cellular(inst, prof_ee, k)


@dataclass(frozen=True)
class SymmetricModel:
    """Network of ``n`` D2D pairs and ``k`` cellular UEs where every signal
    channel has gain ``g`` and every interference channel gain
    ``i_level*g``.

    ``cellular_circuit_ends`` counts the devices charged circuit power on a
    cellular link; 2 charges the base station receiver as well.

    Examples
    --------
    >>> model = SymmetricModel.from_db(-20)
    >>> round(model.g_hat, 6)
    0.01
    """
    # pylint: disable=too-many-instance-attributes
    g: Number = 1.0
    i_level: Number = 0.01
    n: int = 1
    k: int = 1
    noise: Number = 1e-7
    d2d: UEParams = field(default_factory=UEParams)
    cellular: UEParams = field(default_factory=UEParams)
    cellular_circuit_ends: int = 2

    def __post_init__(self) -> None:
        # pylint: disable=line-too-long
        if self.g <= 0:
            raise ValueError("A non-positive signal gain was passed. Please only pass a positive g")
        if self.i_level < 0:
            raise ValueError("A negative interference level was passed. Please only pass non-negative values")
        if self.n < 1 or self.k < 1:
            raise ValueError("The symmetric model needs at least one D2D pair and one cellular UE.")

    @classmethod
    def from_db(cls, i_db: Number, **kwargs) -> "SymmetricModel":
        """Return the model at interference level ``i_db`` in dB"""
        return cls(i_level=10**(i_db/10), **kwargs)

    @property
    def g_hat(self) -> float:
        """Common interference gain"""
        return self.i_level*self.g

    @property
    def i_db(self) -> float:
        """Interference level in dB"""
        return float(10*np.log10(self.i_level)) if self.i_level > 0 else -np.inf

    def at_db(self, i_db: Number) -> "SymmetricModel":
        """Return the same model at another interference level"""
        return replace(self, i_level=10**(i_db/10))

    def to_instance(self) -> NetworkInstance:
        """Return the model as a dense NetworkInstance"""
        return NetworkInstance.uniform(
            self.n, self.k, g=self.g, g_hat=self.g_hat, noise=self.noise,
            d2d=self.d2d, cellular=self.cellular
        )

    def profile(self, p_d2d: Number, p_cell: Number) -> PowerProfile:
        """Return the profile where every D2D pair uses ``p_d2d`` on every
        channel and every cellular UE ``p_cell``"""
        return PowerProfile(np.full((self.n, self.k), p_d2d), np.full(self.k, p_cell))

    def cellular_interference(self, interferer_power: Number) -> float:
        """Return the interference at the base station when every D2D pair
        transmits ``interferer_power`` on the channel"""
        return self.n*interferer_power*self.g_hat

    def cellular_ee(self, p_cell: Number, interferer_power: Number) -> float:
        """Return the EE of a cellular UE transmitting ``p_cell``"""
        rate = log2_1p(p_cell*self.g/(self.cellular_interference(interferer_power) + self.noise))
        return float(rate/(p_cell/self.cellular.eta + self.cellular_circuit_ends*self.cellular.p_cir))


class GapPoint(NamedTuple):
    """Cellular gaps at one interference level"""
    i_db: float
    ee_gap: float
    se_gap: float


def symmetric_gaps(
        model: SymmetricModel, p_ee_d: Number, p_ee_c: Number,
        p_se_d: Number, p_se_c: Number, printed_counts: bool = False
    ) -> Tuple[float, float, float, float]:
    """Return (G_EE^d, G_SE^d, G_EE^c, G_SE^c) of the symmetric model in
    closed form

    Parameters
    ----------
    model : SymmetricModel
        Symmetric network
    p_ee_d, p_ee_c : Number
        Per-channel D2D power and cellular power of the energy-efficient solution
    p_se_d, p_se_c : Number
        Per-channel D2D power and cellular power of the spectral-efficient solution
    printed_counts : bool
        Count N rather than N-1 D2D interferers in the second term of each
        D2D gap, as the closed forms are usually printed. The default counts
        N-1 in both terms, which agrees with direct evaluation

    Returns
    -------
    Tuple[float, float, float, float]
        D2D EE gap, D2D SE gap, cellular EE gap and cellular SE gap
    """
    n, k, i_lvl = model.n, model.k, model.i_level
    floor = model.noise/model.g
    others = n if printed_counts else n - 1

    def d2d_rate(p_d, p_c, count):
        return k*log2_1p(p_d/(p_c*i_lvl + count*p_d*i_lvl + floor))

    def d2d_power(p_d):
        return k*p_d/model.d2d.eta + 2*model.d2d.p_cir

    def cell_rate(p_c, p_d):
        return log2_1p(p_c/(n*p_d*i_lvl + floor))

    def cell_power(p_c):
        return p_c/model.cellular.eta + model.cellular_circuit_ends*model.cellular.p_cir

    g_ee_d = d2d_rate(p_ee_d, p_ee_c, n - 1)/d2d_power(p_ee_d) - d2d_rate(p_se_d, p_se_c, others)/d2d_power(p_se_d)
    g_se_d = d2d_rate(p_se_d, p_se_c, n - 1) - d2d_rate(p_ee_d, p_ee_c, others)
    g_ee_c = cell_rate(p_ee_c, p_ee_d)/cell_power(p_ee_c) - cell_rate(p_se_c, p_se_d)/cell_power(p_se_c)
    g_se_c = cell_rate(p_se_c, p_se_d) - cell_rate(p_ee_c, p_ee_d)
    return float(g_ee_d), float(g_se_d), float(g_ee_c), float(g_se_c)


def symmetric_optimal_powers(
        model: SymmetricModel, interferer_power: Number = None, tol: Number = 1e-9
    ) -> Tuple[float, float]:
    """Return the EE-optimal and SE-optimal cellular powers of the symmetric
    model while every D2D pair transmits ``interferer_power`` (its p_max by
    default). The EE optimum comes from a golden-section search and is
    raised to the rate floor when that binds

    Examples
    --------
    >>> model = SymmetricModel(g=1.0, i_level=0.0, noise=0.1,
    ...     cellular=UEParams(p_max=1.0, p_cir=0.1, eta=1.0), cellular_circuit_ends=1)
    >>> p_ee, p_se = symmetric_optimal_powers(model, 0.0)
    >>> round(p_ee, 5), p_se
    (0.17183, 1.0)
    """
    if interferer_power is None:
        interferer_power = model.d2d.p_max
    p_max = float(model.cellular.p_max)
    p_ee, _ = golden_section_maximize(
        lambda p: model.cellular_ee(p, interferer_power), 0.0, p_max, tol
    )
    floor = (model.cellular_interference(interferer_power) + model.noise)/model.g
    p_qos = float(np.expm1(model.cellular.r_min*np.log(2))*floor)
    if p_qos > p_max:
        return p_max, p_max
    return max(float(p_ee), p_qos), p_max


def gap_vs_interference(
        model: SymmetricModel, i_grid: Sequence[Number],
        interferer_power: Number = None
    ) -> List[GapPoint]:
    """Return the cellular EE and SE gaps at every interference level of
    ``i_grid`` (dB) with D2D pairs at ``interferer_power``

    Examples
    --------
    >>> points = gap_vs_interference(SymmetricModel(), [-30, -20])
    >>> points[0].ee_gap > points[1].ee_gap
    True
    """
    if interferer_power is None:
        interferer_power = model.d2d.p_max
    points = []
    for i_db in i_grid:
        level = model.at_db(i_db)
        p_ee, p_se = symmetric_optimal_powers(level, interferer_power)
        _, _, ee_gap, se_gap = symmetric_gaps(level, interferer_power, p_ee, interferer_power, p_se)
        points.append(GapPoint(float(i_db), ee_gap, se_gap))
    return points
