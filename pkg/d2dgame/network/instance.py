"""Physical-layer data model of a D2D underlay cellular network: per-link UE
parameters, the static channel realization of a whole network and the power
profile that holds every player's strategy
"""

from dataclasses import dataclass, field, replace
from numbers import Number
from typing import Optional, Sequence, Tuple

import numpy as np

QOS_KINDS = ("min-rate", "delay", "interference-cap")


def _frozen_array(values, ndim: int, name: str) -> "np.ndarray":
    """Return a read-only float copy of ``values`` with the expected rank"""
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be a {ndim}-dimensional array, got shape {arr.shape}.")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class UEParams:
    """Limits and costs of a single link.

    Parameters
    ----------
    p_max : Number
        Maximum transmission power in watts
    r_min : Number
        Minimum rate (QoS floor) in bits/s/Hz
    p_cir : Number
        Circuit power of one device in watts
    eta : Number
        Power amplifier efficiency, strictly between 0 and 1
    """
    p_max: Number = 0.2
    r_min: Number = 0.0
    p_cir: Number = 0.01
    eta: Number = 0.35

    def __post_init__(self) -> None:
        # pylint: disable=line-too-long
        if self.p_max <= 0:
            raise ValueError("A non-positive maximum power was passed. Please only pass positive values for p_max")
        if self.r_min < 0 or self.p_cir < 0:
            raise ValueError("Negative r_min and/or p_cir were passed. Please only pass non-negative values")
        if not 0 < self.eta <= 1:
            raise ValueError("The PA efficiency eta must lie in (0, 1]. Please pass a valid efficiency")


@dataclass(frozen=True)
class NetworkInstance:
    """Static channel realization of N D2D pairs reusing the K orthogonal
    uplink channels of K cellular UEs.

    Gains are stored dense. ``g_d2d_x[j][i][k]`` is the gain from D2D
    transmitter j to D2D receiver i on channel k; its diagonal is ignored.

    Parameters
    ----------
    g_d2d : array (N, K)
        Direct gain of every D2D pair on every channel
    g_cell : array (K,)
        Gain of cellular UE k to the base station
    g_c2d : array (K, N)
        Interference gain from cellular UE k to D2D receiver i
    g_d2d_x : array (N, N, K)
        Interference gain between D2D pairs
    g_d2b : array (N, K)
        Interference gain from D2D transmitter i to the base station
    noise : Number
        Noise power N_0 in watts
    ue_d2d : Sequence[UEParams]
        Parameters of every D2D pair
    ue_cell : Sequence[UEParams]
        Parameters of every cellular UE
    """
    # pylint: disable=too-many-instance-attributes
    g_d2d: "np.ndarray"
    g_cell: "np.ndarray"
    g_c2d: "np.ndarray"
    g_d2d_x: "np.ndarray"
    g_d2b: "np.ndarray"
    noise: Number
    ue_d2d: Tuple[UEParams, ...]
    ue_cell: Tuple[UEParams, ...]
    g_cross: "np.ndarray" = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        # pylint: disable=line-too-long
        g_d2d = _frozen_array(self.g_d2d, 2, "g_d2d")
        n_d2d, n_cell = g_d2d.shape
        arrays = {
            "g_d2d": g_d2d,
            "g_cell": _frozen_array(self.g_cell, 1, "g_cell"),
            "g_c2d": _frozen_array(self.g_c2d, 2, "g_c2d"),
            "g_d2d_x": _frozen_array(self.g_d2d_x, 3, "g_d2d_x"),
            "g_d2b": _frozen_array(self.g_d2b, 2, "g_d2b"),
        }
        expected = {
            "g_d2d": (n_d2d, n_cell),
            "g_cell": (n_cell,),
            "g_c2d": (n_cell, n_d2d),
            "g_d2d_x": (n_d2d, n_d2d, n_cell),
            "g_d2b": (n_d2d, n_cell),
        }
        for name, arr in arrays.items():
            if arr.shape != expected[name]:
                raise ValueError(f"{name} has shape {arr.shape} but {expected[name]} is required for {n_d2d} D2D pairs and {n_cell} channels.")
            if (arr < 0).any() or not np.isfinite(arr).all():
                raise ValueError(f"Negative or non-finite gains were passed in {name}. Please only pass non-negative values")
            object.__setattr__(self, name, arr)
        if n_cell == 0:
            raise ValueError("At least one cellular UE (channel) is required.")
        if (arrays["g_d2d"] <= 0).any() or (arrays["g_cell"] <= 0).any():
            raise ValueError("Direct gains must be strictly positive. Please only pass positive values for g_d2d and g_cell")
        if self.noise < 0:
            raise ValueError("A negative noise power was passed. Please only pass a non-negative noise power")
        ue_d2d = tuple(self.ue_d2d)
        ue_cell = tuple(self.ue_cell)
        if len(ue_d2d) != n_d2d or len(ue_cell) != n_cell:
            raise ValueError(f"Expected {n_d2d} D2D and {n_cell} cellular UEParams, got {len(ue_d2d)} and {len(ue_cell)}.")
        object.__setattr__(self, "ue_d2d", ue_d2d)
        object.__setattr__(self, "ue_cell", ue_cell)
        object.__setattr__(self, "noise", float(self.noise))

        g_cross = arrays["g_d2d_x"].copy()
        idx = np.arange(n_d2d)
        g_cross[idx, idx, :] = 0.0
        g_cross.setflags(write=False)
        object.__setattr__(self, "g_cross", g_cross)

    @property
    def n_d2d(self) -> int:
        """Number N of D2D pairs"""
        return self.g_d2d.shape[0]

    @property
    def n_cell(self) -> int:
        """Number K of cellular UEs, equal to the number of channels"""
        return self.g_d2d.shape[1]

    @classmethod
    def uniform(
            cls, n_d2d: int, n_cell: int, g: Number = 1.0,
            g_hat: Number = 0.0, noise: Number = 1e-7,
            d2d: UEParams = None, cellular: UEParams = None
        ) -> "NetworkInstance":
        """Return an instance where every signal channel has gain ``g`` and
        every interference channel has gain ``g_hat``

        Parameters
        ----------
        n_d2d : int
            Number of D2D pairs
        n_cell : int
            Number of cellular UEs
        g : Number
            Common signal gain
        g_hat : Number
            Common interference gain, 0 gives a decoupled network
        noise : Number
            Noise power in watts
        d2d : UEParams, optional
            Parameters shared by every D2D pair
        cellular : UEParams, optional
            Parameters shared by every cellular UE

        Examples
        --------
        >>> inst = NetworkInstance.uniform(2, 1, g=1.0, g_hat=0.01)
        >>> inst.g_c2d
        array([[0.01, 0.01]])
        """
        d2d = d2d if d2d is not None else UEParams()
        cellular = cellular if cellular is not None else UEParams()
        return cls(
            g_d2d=np.full((n_d2d, n_cell), g),
            g_cell=np.full(n_cell, g),
            g_c2d=np.full((n_cell, n_d2d), g_hat),
            g_d2d_x=np.full((n_d2d, n_d2d, n_cell), g_hat),
            g_d2b=np.full((n_d2d, n_cell), g_hat),
            noise=noise,
            ue_d2d=(d2d,)*n_d2d,
            ue_cell=(cellular,)*n_cell
        )

    def with_params(
            self, ue_d2d: Sequence[UEParams] = None,
            ue_cell: Sequence[UEParams] = None
        ) -> "NetworkInstance":
        """Return the same channel realization with replaced UE parameters"""
        return replace(
            self,
            ue_d2d=self.ue_d2d if ue_d2d is None else tuple(ue_d2d),
            ue_cell=self.ue_cell if ue_cell is None else tuple(ue_cell)
        )

    def relabel(
            self, d2d_order: Sequence[int] = None,
            channel_order: Sequence[int] = None
        ) -> "NetworkInstance":
        """Return the instance with D2D pairs and channels renumbered.

        ``d2d_order[new] = old``; channels carry their cellular UE with them.
        """
        d = np.arange(self.n_d2d) if d2d_order is None else np.asarray(d2d_order)
        c = np.arange(self.n_cell) if channel_order is None else np.asarray(channel_order)
        if sorted(d.tolist()) != list(range(self.n_d2d)) or sorted(c.tolist()) != list(range(self.n_cell)):
            raise ValueError("Relabeling orders must be permutations of the existing indices.")
        return NetworkInstance(
            g_d2d=self.g_d2d[np.ix_(d, c)],
            g_cell=self.g_cell[c],
            g_c2d=self.g_c2d[np.ix_(c, d)],
            g_d2d_x=self.g_d2d_x[np.ix_(d, d, c)],
            g_d2b=self.g_d2b[np.ix_(d, c)],
            noise=self.noise,
            ue_d2d=tuple(self.ue_d2d[j] for j in d),
            ue_cell=tuple(self.ue_cell[k] for k in c)
        )


@dataclass(frozen=True)
class PowerProfile:
    """Strategy state of the whole game.

    Parameters
    ----------
    p_d2d : array (N, K)
        Power of D2D pair i on channel k in watts
    p_cell : array (K,)
        Power of cellular UE k in watts
    """
    p_d2d: "np.ndarray"
    p_cell: "np.ndarray"

    def __post_init__(self) -> None:
        # pylint: disable=line-too-long
        p_d2d = _frozen_array(self.p_d2d, 2, "p_d2d")
        p_cell = _frozen_array(self.p_cell, 1, "p_cell")
        if p_d2d.shape[1] != p_cell.shape[0]:
            raise ValueError(f"p_d2d covers {p_d2d.shape[1]} channels but p_cell has {p_cell.shape[0]} entries.")
        if (p_d2d < 0).any() or (p_cell < 0).any():
            raise ValueError("Negative transmission powers were passed. Please only pass non-negative values")
        object.__setattr__(self, "p_d2d", p_d2d)
        object.__setattr__(self, "p_cell", p_cell)

    @classmethod
    def zeros(cls, inst: NetworkInstance) -> "PowerProfile":
        """Return the all-silent profile for ``inst``"""
        return cls(np.zeros((inst.n_d2d, inst.n_cell)), np.zeros(inst.n_cell))

    def feasible(self, inst: NetworkInstance, rtol: Number = 1e-9) -> bool:
        """Return True when every D2D and cellular power budget is respected"""
        if self.p_d2d.shape != (inst.n_d2d, inst.n_cell):
            return False
        d2d_max = np.array([ue.p_max for ue in inst.ue_d2d])
        cell_max = np.array([ue.p_max for ue in inst.ue_cell])
        return bool(
            (self.p_d2d.sum(axis=1) <= d2d_max*(1 + rtol)).all()
            and (self.p_cell <= cell_max*(1 + rtol)).all()
        )

    def with_d2d(self, i: int, powers: Sequence[Number]) -> "PowerProfile":
        """Return a new profile where D2D pair ``i`` uses ``powers``"""
        p_d2d = self.p_d2d.copy()
        p_d2d[i] = powers
        return PowerProfile(p_d2d, self.p_cell)

    def with_cellular(self, k: int, power: Number) -> "PowerProfile":
        """Return a new profile where cellular UE ``k`` uses ``power``"""
        p_cell = self.p_cell.copy()
        p_cell[k] = power
        return PowerProfile(self.p_d2d, p_cell)

    def max_change(self, other: "PowerProfile") -> float:
        """Return the largest absolute entry-wise difference to ``other``"""
        return float(max(
            np.abs(self.p_d2d - other.p_d2d).max(initial=0.0),
            np.abs(self.p_cell - other.p_cell).max(initial=0.0)
        ))


@dataclass(frozen=True)
class QosSpec:
    """QoS requirement of one link expressed in one of three forms.

    ``kind`` is one of ``"min-rate"`` (``r_min``), ``"delay"`` (``bits_total``
    to deliver within ``delay_tol`` seconds) or ``"interference-cap"``
    (``i_max`` watts of tolerable interference at the base station).
    """
    kind: str
    r_min: Optional[Number] = None
    bits_total: Optional[Number] = None
    delay_tol: Optional[Number] = None
    i_max: Optional[Number] = None

    def __post_init__(self) -> None:
        # pylint: disable=line-too-long
        if self.kind not in QOS_KINDS:
            raise ValueError(f"Unknown QoS kind {self.kind!r}. Please pass one of {', '.join(QOS_KINDS)}")
        if self.kind == "min-rate" and (self.r_min is None or self.r_min < 0):
            raise ValueError("A min-rate QoS needs a non-negative r_min.")
        if self.kind == "delay":
            if self.bits_total is None or self.delay_tol is None:
                raise ValueError("A delay QoS needs both bits_total and delay_tol.")
            if self.bits_total < 0 or self.delay_tol <= 0:
                raise ValueError("Delay QoS quantities must be positive. Please pass bits_total >= 0 and delay_tol > 0")
        if self.kind == "interference-cap" and (self.i_max is None or self.i_max < 0):
            raise ValueError("An interference-cap QoS needs a non-negative i_max.")

    def min_rate(
            self, p_c: Number = None, g_c: Number = None, n0: Number = None
        ) -> float:
        """Return the rate floor in bits/s/Hz equivalent to this requirement.

        Delay requirements assume a normalized 1 Hz bandwidth so that
        B/T is directly comparable to a rate. Interference caps need the
        cellular power ``p_c``, gain ``g_c`` and noise ``n0`` they protect.

        Examples
        --------
        >>> QosSpec("delay", bits_total=50, delay_tol=100).min_rate()
        0.5
        """
        if self.kind == "min-rate":
            return float(self.r_min)
        if self.kind == "delay":
            return self.bits_total/self.delay_tol
        if p_c is None or g_c is None or n0 is None:
            raise ValueError("Converting an interference cap needs p_c, g_c and n0.")
        denom = self.i_max + n0
        if denom == 0:
            return float("inf") if p_c*g_c > 0 else 0.0
        return float(np.log1p(p_c*g_c/denom)/np.log(2))
