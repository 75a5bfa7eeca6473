"""Command line entry point: every experiment writes one CSV or JSON table

    d2dgame simulate --trials 100 --out results/simulate.csv
    d2dgame tradeoff --i-db -20 -15 -10 --format json
"""

import argparse
import logging
import sys
from typing import List, Optional

import numpy as np
import pandas as pd

from d2dgame.analysis.gaps import SymmetricModel, gap_vs_interference
from d2dgame.analysis.tradeoff import se_sweep, tradeoff_curve, tradeoff_df
from d2dgame.game import POLICIES
from d2dgame.harness.campaign import (
    FORMATS, emit_results, poa_sweep, resolve_output, run_campaign, trial_rng,
    write_table
)
from d2dgame.harness.config import ScenarioConfig
from d2dgame.harness.topology import generate_scenario

logger = logging.getLogger(__name__)

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value scenario file")
    parser.add_argument("--seed", type=int, help="master seed of every random stream")
    parser.add_argument("--out", help="output file, relative paths honor $D2DGAME_OUTPUT_DIR")
    parser.add_argument("--format", choices=FORMATS, default="csv", help="output format")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="log INFO with -v and DEBUG with -vv")


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser with one subcommand per experiment"""
    parser = argparse.ArgumentParser(
        prog="d2dgame",
        description="Energy-efficiency game simulator for D2D underlay cellular networks",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    commands = parser.add_subparsers(dest="command", required=True)
    formatter = argparse.ArgumentDefaultsHelpFormatter

    simulate = commands.add_parser("simulate", help="per-round utilities of every policy", formatter_class=formatter)
    _common(simulate)
    simulate.add_argument("--trials", type=int, help="number of Monte Carlo trials")
    simulate.add_argument("--policy", action="append", choices=POLICIES,
                          help="policy to play, repeat for several (all by default)")
    simulate.add_argument("--workers", type=int, default=1, help="worker processes for trials")

    tradeoff = commands.add_parser("tradeoff", help="EE versus SE sweep of a cellular UE", formatter_class=formatter)
    _common(tradeoff)
    tradeoff.add_argument("--i-db", type=float, nargs="+", default=[-20.0, -15.0, -10.0], help="interference levels in dB")
    tradeoff.add_argument("--stop", type=float, default=7.0, help="largest target SE")
    tradeoff.add_argument("--step", type=float, default=0.2, help="SE step")

    gaps = commands.add_parser("gaps", help="cellular EE and SE gaps versus interference", formatter_class=formatter)
    _common(gaps)
    gaps.add_argument("--i-min", type=float, default=-30.0, help="lowest interference level in dB")
    gaps.add_argument("--i-max", type=float, default=-5.0, help="highest interference level in dB")
    gaps.add_argument("--i-step", type=float, default=1.0, help="interference step in dB")

    poa = commands.add_parser("poa", help="price of anarchy versus the D2D rate floor", formatter_class=formatter)
    _common(poa)
    poa.add_argument("--trials", type=int, help="number of Monte Carlo trials")
    poa.add_argument("--r-max", type=float, default=1.0, help="largest D2D rate floor")
    poa.add_argument("--r-step", type=float, default=0.1, help="rate floor step")
    poa.add_argument("--ratio", type=float, default=5.0, help="D2D over cellular rate floor")
    poa.add_argument("--grid-resolution", type=int, default=50, help="powers per grid dimension")

    topology = commands.add_parser("topology", help="node positions of one random topology", formatter_class=formatter)
    _common(topology)
    return parser


def load_config(args: argparse.Namespace) -> ScenarioConfig:
    """Return the scenario file (or defaults) with command line overrides"""
    cfg = ScenarioConfig.from_file(args.config) if args.config else ScenarioConfig()
    return cfg.with_overrides(seed=args.seed, trials=getattr(args, "trials", None))


def symmetric_model(cfg: ScenarioConfig) -> SymmetricModel:
    """Return the single-pair symmetric model carrying the scenario's UE parameters"""
    return SymmetricModel(g=1.0, n=1, k=1, noise=cfg.noise_w, d2d=cfg.ue_d2d, cellular=cfg.ue_cell)


def _tradeoff(cfg: ScenarioConfig, args: argparse.Namespace) -> pd.DataFrame:
    model = symmetric_model(cfg)
    frames = []
    for i_db in args.i_db:
        points = tradeoff_curve(model.at_db(i_db), se_sweep(args.stop, args.step))
        frame = tradeoff_df(points)
        frame.insert(0, "i_db", i_db)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def _gaps(cfg: ScenarioConfig, args: argparse.Namespace) -> pd.DataFrame:
    grid = np.round(np.arange(args.i_min, args.i_max + args.i_step/2, args.i_step), 10)
    points = gap_vs_interference(symmetric_model(cfg), grid)
    return pd.DataFrame(points, columns=["i_db", "ee_gap", "se_gap"])


def _poa(cfg: ScenarioConfig, args: argparse.Namespace) -> pd.DataFrame:
    grid = np.round(np.arange(0, args.r_max + args.r_step/2, args.r_step), 10)
    cfg = cfg.with_overrides(n_d2d=1, n_cell=1)
    return poa_sweep(cfg, grid, args.ratio, args.grid_resolution)


def _topology(cfg: ScenarioConfig, args: argparse.Namespace) -> pd.DataFrame:
    topo, _ = generate_scenario(cfg, trial_rng(cfg.seed, 0))
    return topo.df


def main(argv: Optional[List[str]] = None) -> int:
    """Run the command line interface and return the exit status"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=LOG_LEVELS[min(args.verbose, len(LOG_LEVELS) - 1)],
        format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    cfg = load_config(args)
    out = resolve_output(args.out or f"{args.command}.{args.format}")
    if args.command == "simulate":
        result = run_campaign(cfg, args.policy or POLICIES, args.workers)
        emit_results(result.table, args.format, out)
    else:
        builders = {"tradeoff": _tradeoff, "gaps": _gaps, "poa": _poa, "topology": _topology}
        write_table(builders[args.command](cfg, args), args.format, out)
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
