"""Monte Carlo campaigns: independent trials on seeded random topologies,
an ordered reduction into per-round means and deterministic CSV/JSON output
"""

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from d2dgame.analysis.anarchy import price_of_anarchy
from d2dgame.game import POLICIES, GameConfig, run_to_equilibrium
from d2dgame.harness.config import ScenarioConfig
from d2dgame.harness.topology import generate_topology

logger = logging.getLogger(__name__)

METRICS = ("ee_d2d", "ee_cellular", "se_d2d", "se_cellular")
COLUMNS = ["policy", "round", "metric", "mean", "normalized_mean", "trials"]
FORMATS = ("csv", "json")
OUTPUT_DIR_ENV = "D2DGAME_OUTPUT_DIR"


def trial_rng(seed: int, trial: int) -> "np.random.Generator":
    """Return the random stream of ``trial``, keyed by the master seed and
    the trial index only"""
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def _pad(series: "np.ndarray", length: int) -> "np.ndarray":
    """Repeat the last value of a converged series up to ``length`` rounds"""
    if len(series) >= length:
        return series[:length]
    return np.concatenate([series, np.full(length - len(series), series[-1])])


@dataclass(frozen=True)
class TrialResult:
    """Per-round mean link utilities of every policy on one topology.

    ``series[policy][metric]`` holds ``max_rounds`` values, converged games
    padded with their final value.
    """
    trial: int
    seed: int
    series: Dict[str, Dict[str, "np.ndarray"]]
    rounds: Dict[str, Optional[int]]
    converged: Dict[str, bool]


def run_trial(
        cfg: ScenarioConfig, trial: int, policies: Sequence[str] = POLICIES
    ) -> TrialResult:
    """Draw one topology and play one game per policy on it"""
    rng = trial_rng(cfg.seed, trial)
    inst = generate_topology(cfg, rng)
    random_seed = int(rng.integers(2**63))
    series, rounds, converged = {}, {}, {}
    for policy in policies:
        game = GameConfig(
            policy=policy, max_rounds=cfg.max_rounds, eps_eq=cfg.eps_eq,
            rng_seed=random_seed
        )
        trace = run_to_equilibrium(inst, game)
        means = {
            "ee_d2d": trace.ee_d2d.mean(axis=1),
            "ee_cellular": trace.ee_cell.mean(axis=1),
            "se_d2d": trace.se_d2d.mean(axis=1),
            "se_cellular": trace.se_cell.mean(axis=1)
        }
        series[policy] = {metric: _pad(values, cfg.max_rounds) for metric, values in means.items()}
        rounds[policy] = trace.rounds_to_converge
        converged[policy] = trace.converged
    return TrialResult(trial, cfg.seed, series, rounds, converged)


@dataclass(frozen=True)
class CampaignResult:
    """Aggregated table plus the raw trials it was reduced from"""
    table: "pd.DataFrame"
    trials: List[TrialResult]

    @property
    def convergence(self) -> "pd.DataFrame":
        """Return one row per trial and policy with columns trial, policy,
        converged and rounds"""
        rows = [
            (result.trial, policy, result.converged[policy], result.rounds[policy])
            for result in self.trials for policy in result.series
        ]
        return pd.DataFrame(rows, columns=["trial", "policy", "converged", "rounds"])


def aggregate(results: Sequence[TrialResult], policies: Sequence[str], max_rounds: int) -> "pd.DataFrame":
    """Reduce trials in index order into per-policy, per-round means,
    normalized per metric by the largest mean over all policies and rounds"""
    if not results:
        return pd.DataFrame(columns=COLUMNS)
    rows = []
    for metric in METRICS:
        means = {
            policy: np.mean([result.series[policy][metric] for result in results], axis=0)
            for policy in policies
        }
        peak = max(float(np.nanmax(values)) for values in means.values())
        for policy in policies:
            for t, value in enumerate(means[policy][:max_rounds], start=1):
                normalized = value/peak if peak > 0 else 0.0
                rows.append((policy, t, metric, float(value), float(normalized), len(results)))
    return pd.DataFrame(rows, columns=COLUMNS)


def run_campaign(
        cfg: ScenarioConfig, policies: Sequence[str] = POLICIES, workers: int = 1
    ) -> CampaignResult:
    """Run ``cfg.trials`` trials and aggregate them

    Parameters
    ----------
    cfg : ScenarioConfig
        Scenario and Monte Carlo settings
    policies : Sequence[str]
        Policies played on every topology
    workers : int
        Worker processes, 1 runs the trials in this process

    Returns
    -------
    CampaignResult
        Table with columns policy, round, metric, mean, normalized_mean and
        trials, and the raw per-trial results
    """
    policies = tuple(policies)
    unknown = [policy for policy in policies if policy not in POLICIES]
    if unknown:
        raise ValueError(f"Unknown policies {', '.join(unknown)}. Please pass any of {', '.join(POLICIES)}")
    if workers < 1:
        raise ValueError("At least one worker is required.")
    logger.info("running %d trials of %s with %d worker(s)", cfg.trials, ", ".join(policies), workers)
    indices = range(cfg.trials)
    if workers == 1:
        results = [run_trial(cfg, trial, policies) for trial in indices]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_trial, [cfg]*cfg.trials, indices, [policies]*cfg.trials))
    for policy in policies:
        if policy != "random":
            share = np.mean([result.converged[policy] for result in results]) if results else 0.0
            logger.info("%s converged in %.1f%% of trials", policy, 100*share)
    return CampaignResult(aggregate(results, policies, cfg.max_rounds), results)


def poa_sweep(
        cfg: ScenarioConfig, r_min_grid: Sequence[float], ratio: float = 5.0,
        grid_resolution: int = 50
    ) -> "pd.DataFrame":
    """Return the mean and worst price of anarchy over ``cfg.trials``
    topologies for every D2D rate floor of ``r_min_grid``, the cellular
    floor being that value divided by ``ratio``. Every floor reuses the same
    topologies"""
    instances = [generate_topology(cfg, trial_rng(cfg.seed, trial)) for trial in range(cfg.trials)]
    game = GameConfig(max_rounds=cfg.max_rounds, eps_eq=cfg.eps_eq)
    rows = []
    for r_min_d in r_min_grid:
        local = cfg.with_overrides(r_min_d=float(r_min_d), r_min_c=float(r_min_d)/ratio)
        values = []
        for inst in instances:
            inst = inst.with_params((local.ue_d2d,)*inst.n_d2d, (local.ue_cell,)*inst.n_cell)
            values.append(price_of_anarchy(inst, game, grid_resolution))
        logger.info("rate floor %.2f: mean price of anarchy %.4f", r_min_d, np.mean(values))
        rows.append((float(r_min_d), float(r_min_d)/ratio, float(np.mean(values)), float(np.max(values)), len(values)))
    return pd.DataFrame(rows, columns=["r_min_d", "r_min_c", "poa", "poa_max", "trials"])


def resolve_output(path: Union[str, Path]) -> Path:
    """Return ``path``, placed under $D2DGAME_OUTPUT_DIR when relative and
    the variable is set"""
    path = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        return Path(base)/path
    return path


def _native(value):
    if isinstance(value, np.generic):
        return value.item()
    return value


def write_table(table: "pd.DataFrame", fmt: str, path: Union[str, Path]) -> Path:
    """Write ``table`` as UTF-8 CSV or JSON records with ``\\n`` newlines
    and return the path written"""
    if fmt not in FORMATS:
        raise ValueError(f"Unknown format {fmt!r}. Please pass one of {', '.join(FORMATS)}")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            table.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
        else:
            records = [
                {column: _native(value) for column, value in zip(table.columns, row)}
                for row in table.itertuples(index=False, name=None)
            ]
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(records) + "\n")
    except OSError as err:
        raise type(err)(f"Could not write results to {path}: {err}") from err
    logger.info("wrote %d rows to %s", len(table), path)
    return path


def emit_results(table: "pd.DataFrame", fmt: str, path: Union[str, Path]) -> Path:
    """Write a campaign table with its columns in canonical order"""
    table = table.reindex(columns=COLUMNS) if len(table.columns) else pd.DataFrame(columns=COLUMNS)
    return write_table(table, fmt, path)
