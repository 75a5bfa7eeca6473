"""Closed-form performance expressions of the network model: SINR, rate,
total consumed power, energy- and spectral-efficiency utilities, network EE
and the conversions that turn every QoS requirement into a rate floor
"""

from numbers import Number
from typing import Tuple

import numpy as np

from d2dgame.network.instance import NetworkInstance, PowerProfile, QosSpec, UEParams

__all__ = [
    "LN2", "UndefinedRatioError", "safe_ratio", "log2_1p", "d2d_interference",
    "cellular_interference", "d2d_sinr_matrix", "cellular_sinr_vector",
    "sinr_d2d", "sinr_cellular", "rate_d2d", "rate_cellular",
    "power_total_d2d", "power_total_cellular", "ee_utility_d2d",
    "ee_utility_cellular", "se_utility_d2d", "se_utility_cellular",
    "network_ee", "network_ee_batch", "qos_from_delay",
    "qos_from_interference_cap", "interference_from_rate"
]

LN2 = np.log(2)


class UndefinedRatioError(ZeroDivisionError):
    """Raised when an energy efficiency is requested for a link that
    consumes no power at all"""


def _check_d2d(inst: NetworkInstance, i: int) -> None:
    if not 0 <= i < inst.n_d2d:
        raise IndexError(f"D2D pair index {i} is out of range for {inst.n_d2d} pairs.")


def _check_channel(inst: NetworkInstance, k: int) -> None:
    if not 0 <= k < inst.n_cell:
        raise IndexError(f"Channel index {k} is out of range for {inst.n_cell} channels.")


def safe_ratio(signal, denom):
    """Elementwise signal/denom where a silent denominator yields inf for a
    transmitting link and 0 otherwise"""
    signal = np.asarray(signal, dtype=float)
    denom = np.asarray(denom, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(denom > 0, signal/np.where(denom > 0, denom, 1.0), np.where(signal > 0, np.inf, 0.0))
    return out


def log2_1p(x):
    """Return log2(1 + x) through the natural logarithm"""
    return np.log1p(x)/LN2


def d2d_interference(inst: NetworkInstance, p_d2d: "np.ndarray", p_cell: "np.ndarray") -> "np.ndarray":
    """Return the interference (N, K) seen at every D2D receiver, or
    (B, N, K) for a batch of profiles"""
    p_d2d = np.asarray(p_d2d, dtype=float)
    p_cell = np.asarray(p_cell, dtype=float)
    cross = np.einsum("...jk,jik->...ik", p_d2d, inst.g_cross)
    return cross + p_cell[..., None, :]*inst.g_c2d.T


def cellular_interference(inst: NetworkInstance, p_d2d: "np.ndarray") -> "np.ndarray":
    """Return the D2D interference (K,) received at the base station on every
    channel, or (B, K) for a batch"""
    return np.einsum("...ik,ik->...k", np.asarray(p_d2d, dtype=float), inst.g_d2b)


def d2d_sinr_matrix(inst: NetworkInstance, prof: PowerProfile) -> "np.ndarray":
    """Return the SINR of every D2D pair on every channel as an (N, K) array"""
    interference = d2d_interference(inst, prof.p_d2d, prof.p_cell)
    return safe_ratio(prof.p_d2d*inst.g_d2d, interference + inst.noise)


def cellular_sinr_vector(inst: NetworkInstance, prof: PowerProfile) -> "np.ndarray":
    """Return the SINR of every cellular UE at the base station"""
    interference = cellular_interference(inst, prof.p_d2d)
    return safe_ratio(prof.p_cell*inst.g_cell, interference + inst.noise)


def sinr_d2d(inst: NetworkInstance, prof: PowerProfile, i: int, k: int) -> float:
    """Return the SINR of D2D pair ``i`` on channel ``k``

    Parameters
    ----------
    inst : NetworkInstance
        Channel realization
    prof : PowerProfile
        Current powers of every player
    i : int
        D2D pair index
    k : int
        Channel index

    Returns
    -------
    float
        Signal over interference plus noise, 0 when the pair is silent

    Raises
    ------
    IndexError
        If ``i`` or ``k`` does not name an existing pair or channel
    """
    _check_d2d(inst, i)
    _check_channel(inst, k)
    own = prof.p_d2d[i, k]*inst.g_d2d[i, k]
    interference = prof.p_cell[k]*inst.g_c2d[k, i] + prof.p_d2d[:, k] @ inst.g_cross[:, i, k]
    return float(safe_ratio(own, interference + inst.noise))


def sinr_cellular(inst: NetworkInstance, prof: PowerProfile, k: int) -> float:
    """Return the SINR of cellular UE ``k`` at the base station"""
    _check_channel(inst, k)
    interference = prof.p_d2d[:, k] @ inst.g_d2b[:, k]
    return float(safe_ratio(prof.p_cell[k]*inst.g_cell[k], interference + inst.noise))


def rate_d2d(inst: NetworkInstance, prof: PowerProfile, i: int) -> float:
    """Return the achievable rate of D2D pair ``i`` summed over all channels"""
    _check_d2d(inst, i)
    sinrs = [sinr_d2d(inst, prof, i, k) for k in range(inst.n_cell)]
    return float(log2_1p(np.array(sinrs)).sum())


def rate_cellular(inst: NetworkInstance, prof: PowerProfile, k: int) -> float:
    """Return the achievable rate of cellular UE ``k``"""
    return float(log2_1p(sinr_cellular(inst, prof, k)))


def power_total_d2d(prof: PowerProfile, i: int, params: UEParams) -> float:
    """Return the power drawn by D2D pair ``i``: amplifier input plus the
    circuit power of both transmitter and receiver"""
    return float(prof.p_d2d[i].sum()/params.eta + 2*params.p_cir)


def power_total_cellular(
        prof: PowerProfile, k: int, params: UEParams, circuit_ends: int = 1
    ) -> float:
    """Return the power drawn by cellular UE ``k``.

    ``circuit_ends`` counts the devices charged circuit power; the base
    station is not charged by default.
    """
    return float(prof.p_cell[k]/params.eta + circuit_ends*params.p_cir)


def _efficiency(rate: float, total: float, who: str) -> float:
    if total <= 0:
        raise UndefinedRatioError(f"{who} consumes no power so its energy efficiency is undefined. Please pass a positive circuit power or transmit power")
    return rate/total


def ee_utility_d2d(inst: NetworkInstance, prof: PowerProfile, i: int) -> float:
    """Return the energy efficiency of D2D pair ``i`` in bits/Hz/J

    Raises
    ------
    UndefinedRatioError
        If the pair is silent and has no circuit power
    """
    rate = rate_d2d(inst, prof, i)
    return _efficiency(rate, power_total_d2d(prof, i, inst.ue_d2d[i]), f"D2D pair {i}")


def ee_utility_cellular(
        inst: NetworkInstance, prof: PowerProfile, k: int, circuit_ends: int = 1
    ) -> float:
    """Return the energy efficiency of cellular UE ``k`` in bits/Hz/J"""
    rate = rate_cellular(inst, prof, k)
    total = power_total_cellular(prof, k, inst.ue_cell[k], circuit_ends)
    return _efficiency(rate, total, f"Cellular UE {k}")


def se_utility_d2d(inst: NetworkInstance, prof: PowerProfile, i: int) -> float:
    """Return the spectral efficiency of D2D pair ``i`` (its rate)"""
    return rate_d2d(inst, prof, i)


def se_utility_cellular(inst: NetworkInstance, prof: PowerProfile, k: int) -> float:
    """Return the spectral efficiency of cellular UE ``k`` (its rate)"""
    return rate_cellular(inst, prof, k)


def network_ee(inst: NetworkInstance, prof: PowerProfile) -> float:
    """Return the network energy efficiency: the sum of every link's own
    EE ratio, not the ratio of sum rate to sum power

    Examples
    --------
    >>> inst = NetworkInstance.uniform(1, 1, g=1.0, g_hat=0.0)
    >>> network_ee(inst, PowerProfile.zeros(inst))
    0.0
    """
    total = sum(ee_utility_d2d(inst, prof, i) for i in range(inst.n_d2d))
    total += sum(ee_utility_cellular(inst, prof, k) for k in range(inst.n_cell))
    return float(total)


def _totals(inst: NetworkInstance) -> Tuple["np.ndarray", ...]:
    eta_d = np.array([ue.eta for ue in inst.ue_d2d])
    cir_d = np.array([2*ue.p_cir for ue in inst.ue_d2d])
    eta_c = np.array([ue.eta for ue in inst.ue_cell])
    cir_c = np.array([ue.p_cir for ue in inst.ue_cell])
    return eta_d, cir_d, eta_c, cir_c


def network_ee_batch(
        inst: NetworkInstance, p_d2d: "np.ndarray", p_cell: "np.ndarray"
    ) -> Tuple["np.ndarray", "np.ndarray", "np.ndarray"]:
    """Evaluate the network EE of a batch of profiles at once

    Parameters
    ----------
    inst : NetworkInstance
        Channel realization
    p_d2d : array (B, N, K)
        D2D powers of every candidate profile
    p_cell : array (B, K)
        Cellular powers of every candidate profile

    Returns
    -------
    Tuple[np.ndarray, np.ndarray, np.ndarray]
        Network EE (B,), D2D rates (B, N) and cellular rates (B, K)
    """
    p_d2d = np.asarray(p_d2d, dtype=float)
    p_cell = np.asarray(p_cell, dtype=float)
    sinr_d = safe_ratio(p_d2d*inst.g_d2d, d2d_interference(inst, p_d2d, p_cell) + inst.noise)
    sinr_c = safe_ratio(p_cell*inst.g_cell, cellular_interference(inst, p_d2d) + inst.noise)
    rate_d = log2_1p(sinr_d).sum(axis=-1)
    rate_c = log2_1p(sinr_c)
    eta_d, cir_d, eta_c, cir_c = _totals(inst)
    total_d = p_d2d.sum(axis=-1)/eta_d + cir_d
    total_c = p_cell/eta_c + cir_c
    if (total_d <= 0).any() or (total_c <= 0).any():
        raise UndefinedRatioError("A link consumes no power so the network energy efficiency is undefined. Please pass positive circuit powers")
    ee = (rate_d/total_d).sum(axis=-1) + (rate_c/total_c).sum(axis=-1)
    return ee, rate_d, rate_c


def qos_from_delay(spec: QosSpec) -> float:
    """Return the rate floor B/T of a delay requirement

    Examples
    --------
    >>> qos_from_delay(QosSpec("delay", bits_total=1, delay_tol=10))
    0.1
    """
    if spec.kind != "delay":
        raise ValueError(f"A delay QoS was expected but a {spec.kind!r} QoS was passed.")
    return spec.min_rate()


def qos_from_interference_cap(spec: QosSpec, p_c: Number, g_c: Number, n0: Number) -> float:
    """Return log2(1 + p_c g_c/(I_max + N_0)), the cellular rate floor that is
    met exactly when the D2D interference stays below ``spec.i_max``"""
    if spec.kind != "interference-cap":
        raise ValueError(f"An interference-cap QoS was expected but a {spec.kind!r} QoS was passed.")
    return spec.min_rate(p_c, g_c, n0)


def interference_from_rate(p_c: Number, g_c: Number, rate: Number, n0: Number) -> float:
    """Return the D2D interference at which a cellular UE transmitting
    ``p_c`` over gain ``g_c`` achieves exactly ``rate``. Negative values mean
    the rate is out of reach even without interference."""
    if rate <= 0:
        return float("inf")
    return float(p_c*g_c/np.expm1(rate*LN2) - n0)
