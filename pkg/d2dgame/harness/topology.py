"""Random placement of the base station, cellular UEs and D2D pairs in a
single cell, and the path-loss plus Rayleigh fading gains between them"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from d2dgame.harness.config import ScenarioConfig
from d2dgame.network.instance import NetworkInstance

try:
    import pandas as pd
except ImportError:
    pd = None

MIN_DISTANCE = 1.0


@dataclass(frozen=True)
class Topology:
    """Positions in meters, the base station at the cell center"""
    bs: "np.ndarray"
    cell_tx: "np.ndarray"
    d2d_tx: "np.ndarray"
    d2d_rx: "np.ndarray"

    @property
    def df(self) -> "pd.DataFrame":
        """Return one row per node with columns role, index, x and y"""
        if pd is None:
            raise ImportError("pandas is required for the df property. Please install pandas")
        frames = []
        for role, points in (("bs", self.bs.reshape(1, 2)), ("cellular", self.cell_tx),
                             ("d2d_tx", self.d2d_tx), ("d2d_rx", self.d2d_rx)):
            frames.append(pd.DataFrame({
                "role": role,
                "index": np.arange(len(points)),
                "x": points[:, 0],
                "y": points[:, 1]
            }))
        return pd.concat(frames, ignore_index=True)


def uniform_disk(rng: "np.random.Generator", n: int, radius: float) -> "np.ndarray":
    """Return ``n`` points drawn uniformly from a disk centered at the origin"""
    r = radius*np.sqrt(rng.uniform(size=n))
    theta = rng.uniform(0, 2*np.pi, size=n)
    return np.column_stack([r*np.cos(theta), r*np.sin(theta)])


def place_users(cfg: ScenarioConfig, rng: "np.random.Generator") -> Topology:
    """Place cellular UEs and D2D transmitters uniformly in the cell and
    every D2D receiver uniformly within d2d_max_dist of its transmitter,
    redrawing receivers that fall outside the cell"""
    cell_tx = uniform_disk(rng, cfg.n_cell, cfg.cell_radius)
    d2d_tx = uniform_disk(rng, cfg.n_d2d, cfg.cell_radius)
    d2d_rx = np.empty_like(d2d_tx)
    for i, tx in enumerate(d2d_tx):
        while True:
            rx = tx + uniform_disk(rng, 1, cfg.d2d_max_dist)[0]
            if np.hypot(*rx) <= cfg.cell_radius:
                break
        d2d_rx[i] = rx
    return Topology(np.zeros(2), cell_tx, d2d_tx, d2d_rx)


def rayleigh_power(rng: "np.random.Generator", size) -> "np.ndarray":
    """Return |h|^2 for unit-variance complex Gaussian h"""
    h = (rng.standard_normal(size) + 1j*rng.standard_normal(size))/np.sqrt(2)
    return np.abs(h)**2


def _distances(a: "np.ndarray", b: "np.ndarray") -> "np.ndarray":
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
    return np.maximum(d, MIN_DISTANCE)


def channel_gains(
        topo: Topology, n_cell: int, rng: "np.random.Generator"
    ) -> Tuple["np.ndarray", ...]:
    """Return (g_d2d, g_cell, g_c2d, g_d2d_x, g_d2b) as d^-2 |h|^2 with
    independent fading on every link and channel"""
    bs = topo.bs.reshape(1, 2)
    n_d2d = len(topo.d2d_tx)
    pair = np.maximum(np.linalg.norm(topo.d2d_tx - topo.d2d_rx, axis=1), MIN_DISTANCE)
    g_d2d = pair[:, None]**-2.0*rayleigh_power(rng, (n_d2d, n_cell))
    g_cell = _distances(topo.cell_tx, bs)[:, 0]**-2.0*rayleigh_power(rng, n_cell)
    g_c2d = _distances(topo.cell_tx, topo.d2d_rx)**-2.0*rayleigh_power(rng, (n_cell, n_d2d))
    g_d2d_x = _distances(topo.d2d_tx, topo.d2d_rx)[:, :, None]**-2.0*rayleigh_power(rng, (n_d2d, n_d2d, n_cell))
    g_d2b = _distances(topo.d2d_tx, bs)**-2.0*rayleigh_power(rng, (n_d2d, n_cell))
    return g_d2d, g_cell, g_c2d, g_d2d_x, g_d2b


def generate_scenario(
        cfg: ScenarioConfig, rng: "np.random.Generator"
    ) -> Tuple[Topology, NetworkInstance]:
    """Return a random topology and the network instance it induces"""
    topo = place_users(cfg, rng)
    g_d2d, g_cell, g_c2d, g_d2d_x, g_d2b = channel_gains(topo, cfg.n_cell, rng)
    inst = NetworkInstance(
        g_d2d=g_d2d,
        g_cell=g_cell,
        g_c2d=g_c2d,
        g_d2d_x=g_d2d_x,
        g_d2b=g_d2b,
        noise=cfg.noise_w,
        ue_d2d=(cfg.ue_d2d,)*cfg.n_d2d,
        ue_cell=(cfg.ue_cell,)*cfg.n_cell
    )
    return topo, inst


def generate_topology(cfg: ScenarioConfig, rng: "np.random.Generator") -> NetworkInstance:
    """Return the network instance of a random topology

    Examples
    --------
    >>> inst = generate_topology(ScenarioConfig(), np.random.default_rng(0))
    >>> inst.g_d2d.shape
    (5, 3)
    """
    return generate_scenario(cfg, rng)[1]
