"""Scenario configuration of a simulation campaign. Powers are given in dBm
here and converted to watts on the way into the network model"""

import logging
from dataclasses import dataclass, fields, replace
from numbers import Number
from pathlib import Path
from typing import Union

from d2dgame.network.instance import UEParams

logger = logging.getLogger(__name__)


def dbm_to_watts(dbm: Number) -> float:
    """Convert a power in dBm to watts

    Examples
    --------
    >>> dbm_to_watts(30)
    1.0
    """
    return 10**((dbm - 30)/10)


@dataclass(frozen=True)
class ScenarioConfig:
    """Parameters of a random D2D underlay scenario and its Monte Carlo run

    Parameters
    ----------
    cell_radius : Number
        Radius of the cell around the base station in meters
    d2d_max_dist : Number
        Largest transmitter-receiver distance of a D2D pair in meters
    n_d2d : int
        Number of D2D pairs
    n_cell : int
        Number of cellular UEs and channels
    p_max_dbm : Number
        Maximum transmission power of every UE in dBm
    p_cir_dbm : Number
        Circuit power of every device in dBm
    noise_w : Number
        Noise power in watts
    eta : Number
        PA efficiency of every UE
    r_min_c : Number
        Rate floor of cellular UEs in bits/s/Hz
    r_min_d : Number
        Rate floor of D2D pairs in bits/s/Hz
    trials : int
        Number of Monte Carlo trials
    seed : int
        Master seed every trial stream is derived from
    max_rounds : int
        Rounds per game
    eps_eq : Number
        Convergence tolerance of a game in watts
    """
    # pylint: disable=too-many-instance-attributes
    cell_radius: float = 500.0
    d2d_max_dist: float = 25.0
    n_d2d: int = 5
    n_cell: int = 3
    p_max_dbm: float = 23.0
    p_cir_dbm: float = 10.0
    noise_w: float = 1e-7
    eta: float = 0.35
    r_min_c: float = 0.1
    r_min_d: float = 0.5
    trials: int = 1000
    seed: int = 0
    max_rounds: int = 20
    eps_eq: float = 1e-4

    def __post_init__(self) -> None:
        # pylint: disable=line-too-long
        positive = ("cell_radius", "d2d_max_dist", "n_d2d", "n_cell", "noise_w", "eta", "trials", "max_rounds", "eps_eq")
        bad = [name for name in positive if getattr(self, name) <= 0]
        if bad:
            raise ValueError(f"Non-positive values were passed for {', '.join(bad)}. Please only pass positive values")
        if self.d2d_max_dist >= self.cell_radius:
            raise ValueError("d2d_max_dist must be smaller than cell_radius.")
        if self.r_min_c < 0 or self.r_min_d < 0 or self.seed < 0:
            raise ValueError("Rate floors and the seed cannot be negative.")
        if self.eta > 1:
            raise ValueError("The PA efficiency eta cannot exceed 1.")

    @property
    def p_max_w(self) -> float:
        """Maximum transmission power in watts"""
        return dbm_to_watts(self.p_max_dbm)

    @property
    def p_cir_w(self) -> float:
        """Circuit power in watts"""
        return dbm_to_watts(self.p_cir_dbm)

    @property
    def ue_d2d(self) -> UEParams:
        """Parameters shared by every D2D pair"""
        return UEParams(p_max=self.p_max_w, r_min=self.r_min_d, p_cir=self.p_cir_w, eta=self.eta)

    @property
    def ue_cell(self) -> UEParams:
        """Parameters shared by every cellular UE"""
        return UEParams(p_max=self.p_max_w, r_min=self.r_min_c, p_cir=self.p_cir_w, eta=self.eta)

    def with_overrides(self, **kwargs) -> "ScenarioConfig":
        """Return a copy with every non-None keyword applied"""
        names = {f.name for f in fields(self)}
        unknown = sorted(set(kwargs) - names)
        if unknown:
            raise ValueError(f"Unknown scenario keys: {', '.join(unknown)}.")
        return replace(self, **{key: value for key, value in kwargs.items() if value is not None})

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ScenarioConfig":
        """Read a flat ``key = value`` file. Blank lines and ``#`` comments
        are skipped and every key must name a field

        Examples
        --------
        A file holding ``n_d2d = 2`` and ``trials = 10`` gives the defaults
        with those two fields replaced.
        """
        # pylint: disable=line-too-long
        types = {f.name: type(f.default) for f in fields(cls)}
        values = {}
        try:
            with open(path, "r", encoding="UTF-8") as fh:
                lines = fh.read().splitlines()
        except OSError as err:
            raise type(err)(f"Could not read scenario file {path}: {err}") from err
        for lineno, line in enumerate(lines, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value but found {line!r}.")
            key, raw = (part.strip() for part in line.split("=", 1))
            if key not in types:
                raise ValueError(f"{path}:{lineno}: unknown scenario key {key!r}.")
            try:
                values[key] = types[key](float(raw)) if types[key] is int else types[key](raw)
            except ValueError as err:
                raise ValueError(f"{path}:{lineno}: {key} expects a {types[key].__name__} but got {raw!r}.") from err
        logger.info("read %d scenario settings from %s", len(values), path)
        return cls(**values)
