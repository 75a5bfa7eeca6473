import json

import pytest
import numpy as np
import pandas as pd

from d2dgame.harness import (
    COLUMNS, OUTPUT_DIR_ENV, ScenarioConfig, aggregate, dbm_to_watts,
    emit_results, generate_scenario, place_users, rayleigh_power,
    poa_sweep, resolve_output, run_campaign, run_trial, trial_rng, uniform_disk,
    write_table
)
from d2dgame.harness.cli import build_parser, main

SMALL = ScenarioConfig(n_d2d=2, n_cell=2, trials=3, max_rounds=5)

@pytest.fixture(scope="module")
def campaign():
    """Return a small campaign over every policy"""
    return run_campaign(SMALL)

class TestConfig:
    @pytest.mark.parametrize("dbm, watts", [(30, 1.0), (23, 0.19953), (10, 0.01), (0, 0.001)])
    def test_dbm_to_watts(self, dbm, watts):
        assert dbm_to_watts(dbm) == pytest.approx(watts, rel=1e-4)

    def test_ue_params(self):
        cfg = ScenarioConfig()
        assert cfg.ue_d2d.p_max == pytest.approx(0.19953, rel=1e-4)
        assert cfg.ue_d2d.r_min == 0.5
        assert cfg.ue_cell.r_min == 0.1
        assert cfg.ue_cell.p_cir == pytest.approx(0.01)

    @pytest.mark.parametrize("kwargs", [{"n_d2d": 0}, {"trials": -1}, {"d2d_max_dist": 600}, {"eta": 1.5}])
    def test_invalid_config_exception(self, kwargs):
        with pytest.raises(ValueError):
            ScenarioConfig(**kwargs)

    def test_overrides_skip_none(self):
        cfg = ScenarioConfig().with_overrides(seed=7, trials=None)
        assert cfg.seed == 7
        assert cfg.trials == 1000

    def test_unknown_override_exception(self):
        with pytest.raises(ValueError, match="Unknown scenario keys"):
            ScenarioConfig().with_overrides(radius=10)

    def test_from_file(self, tmp_path):
        path = tmp_path/"scenario.cfg"
        path.write_text("# small run\nn_d2d = 2\n\nnoise_w = 1e-6  # louder\ntrials=10\n", encoding="utf-8")
        cfg = ScenarioConfig.from_file(path)
        assert cfg.n_d2d == 2 and isinstance(cfg.n_d2d, int)
        assert cfg.noise_w == 1e-6
        assert cfg.trials == 10
        assert cfg.n_cell == 3

    @pytest.mark.parametrize("text, message", [
        ("n_d2d = 2\nno separator\n", ":2: expected key = value"),
        ("radius = 3\n", ":1: unknown scenario key"),
        ("n_d2d = two\n", ":1: n_d2d expects a int")
    ])
    def test_from_file_errors(self, tmp_path, text, message):
        path = tmp_path/"scenario.cfg"
        path.write_text(text, encoding="utf-8")
        with pytest.raises(ValueError, match=message):
            ScenarioConfig.from_file(path)

    def test_missing_file_exception(self, tmp_path):
        with pytest.raises(OSError, match="Could not read scenario file"):
            ScenarioConfig.from_file(tmp_path/"missing.cfg")

class TestTopology:
    def test_deterministic(self):
        first, inst_a = generate_scenario(ScenarioConfig(), trial_rng(3, 4))
        second, inst_b = generate_scenario(ScenarioConfig(), trial_rng(3, 4))
        assert (first.d2d_rx == second.d2d_rx).all()
        assert (inst_a.g_d2d_x == inst_b.g_d2d_x).all()

    def test_trial_streams_differ(self):
        assert trial_rng(0, 1).uniform() == trial_rng(0, 1).uniform()
        assert trial_rng(0, 1).uniform() != trial_rng(0, 2).uniform()
        assert trial_rng(0, 1).uniform() != trial_rng(1, 1).uniform()

    @pytest.mark.parametrize("seed", range(5))
    def test_placement_bounds(self, seed):
        cfg = ScenarioConfig(n_d2d=20)
        topo = place_users(cfg, trial_rng(seed, 0))
        assert (np.hypot(*topo.cell_tx.T) <= cfg.cell_radius).all()
        assert (np.hypot(*topo.d2d_rx.T) <= cfg.cell_radius).all()
        assert (np.linalg.norm(topo.d2d_tx - topo.d2d_rx, axis=1) <= cfg.d2d_max_dist).all()

    def test_uniform_disk(self):
        points = uniform_disk(np.random.default_rng(0), 10000, 2.0)
        radii = np.hypot(*points.T)
        assert (radii <= 2.0).all()
        # a uniform disk puts a quarter of the points inside half the radius
        assert (radii <= 1.0).mean() == pytest.approx(0.25, abs=0.02)

    def test_unit_mean_fading(self):
        assert rayleigh_power(np.random.default_rng(0), 100000).mean() == pytest.approx(1.0, abs=0.02)

    def test_gains_and_parameters(self):
        cfg = ScenarioConfig()
        _, inst = generate_scenario(cfg, trial_rng(0, 0))
        assert inst.g_d2d_x.shape == (5, 5, 3)
        assert (inst.g_d2d > 0).all() and (inst.g_cell > 0).all()
        assert inst.noise == 1e-7
        assert inst.ue_d2d[0] == cfg.ue_d2d

    def test_dataframe(self):
        topo, _ = generate_scenario(ScenarioConfig(), trial_rng(0, 0))
        df = topo.df
        assert list(df.columns) == ["role", "index", "x", "y"]
        assert df["role"].value_counts().to_dict() == {"d2d_tx": 5, "d2d_rx": 5, "cellular": 3, "bs": 1}

class TestCampaign:
    def test_table_layout(self, campaign):
        table = campaign.table
        assert list(table.columns) == COLUMNS
        assert len(table) == 3*5*4
        assert (table["trials"] == 3).all()

    def test_normalization(self, campaign):
        peaks = campaign.table.groupby("metric")["normalized_mean"].max()
        assert peaks.tolist() == pytest.approx([1.0]*4)
        assert (campaign.table["normalized_mean"] <= 1 + 1e-12).all()

    def test_deterministic(self, campaign):
        pd.testing.assert_frame_equal(run_campaign(SMALL).table, campaign.table)

    def test_workers_match_serial(self, campaign):
        pd.testing.assert_frame_equal(run_campaign(SMALL, workers=2).table, campaign.table)

    def test_trial_independent_of_campaign(self, campaign):
        alone = run_trial(SMALL, 2)
        for policy, metrics in alone.series.items():
            for metric, values in metrics.items():
                assert values.tolist() == campaign.trials[2].series[policy][metric].tolist()

    def test_convergence_table(self, campaign):
        conv = campaign.convergence
        assert list(conv.columns) == ["trial", "policy", "converged", "rounds"]
        assert len(conv) == 9
        assert not conv.loc[conv["policy"] == "random", "converged"].any()

    def test_series_padded(self, campaign):
        for result in campaign.trials:
            for metrics in result.series.values():
                assert all(len(values) == 5 for values in metrics.values())

    def test_single_policy(self):
        result = run_campaign(SMALL.with_overrides(trials=1), ["spectral-efficient"])
        assert set(result.table["policy"]) == {"spectral-efficient"}

    def test_invalid_arguments_exception(self):
        with pytest.raises(ValueError, match="Unknown policies"):
            run_campaign(SMALL, ["greedy"])
        with pytest.raises(ValueError):
            run_campaign(SMALL, workers=0)

    def test_empty_aggregate(self):
        assert list(aggregate([], ["random"], 5).columns) == COLUMNS

class TestOutput:
    def test_csv_deterministic(self, campaign, tmp_path):
        first = write_table(campaign.table, "csv", tmp_path/"a.csv").read_bytes()
        second = emit_results(campaign.table, "csv", tmp_path/"b.csv").read_bytes()
        assert first == second
        assert first.endswith(b"\n") and b"\r" not in first
        assert first.decode("utf-8").splitlines()[0] == ",".join(COLUMNS)

    def test_csv_round_trip(self, campaign, tmp_path):
        path = write_table(campaign.table, "csv", tmp_path/"table.csv")
        back = pd.read_csv(path)
        assert back["mean"].tolist() == pytest.approx(campaign.table["mean"].tolist(), rel=1e-12)

    def test_json_records(self, campaign, tmp_path):
        path = write_table(campaign.table, "json", tmp_path/"table.json")
        text = path.read_text(encoding="utf-8")
        assert text.endswith("\n")
        records = json.loads(text)
        assert len(records) == len(campaign.table)
        assert list(records[0]) == COLUMNS
        assert records[0]["trials"] == 3

    def test_empty_table_header(self, tmp_path):
        path = emit_results(pd.DataFrame(), "csv", tmp_path/"empty.csv")
        assert path.read_text(encoding="utf-8") == ",".join(COLUMNS) + "\n"

    def test_creates_parent_directories(self, campaign, tmp_path):
        path = write_table(campaign.table, "csv", tmp_path/"deep"/"er"/"table.csv")
        assert path.exists()

    def test_unknown_format_exception(self, campaign, tmp_path):
        with pytest.raises(ValueError, match="Unknown format"):
            write_table(campaign.table, "xlsx", tmp_path/"table.xlsx")

    def test_unwritable_path_exception(self, campaign, tmp_path):
        blocker = tmp_path/"file"
        blocker.write_text("", encoding="utf-8")
        with pytest.raises(OSError, match="Could not write results"):
            write_table(campaign.table, "csv", blocker/"table.csv")

    def test_output_dir_variable(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
        assert resolve_output("out.csv") == tmp_path/"out.csv"
        assert resolve_output(tmp_path/"abs.csv") == tmp_path/"abs.csv"
        monkeypatch.delenv(OUTPUT_DIR_ENV)
        assert str(resolve_output("out.csv")) == "out.csv"

class TestCommandLine:
    @pytest.fixture()
    def scenario(self, tmp_path):
        """Return a small scenario file"""
        path = tmp_path/"small.cfg"
        path.write_text("n_d2d = 2\nn_cell = 1\nmax_rounds = 3\n", encoding="utf-8")
        return path

    def test_requires_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_simulate(self, scenario, tmp_path, capsys):
        out = tmp_path/"sim.csv"
        assert main(["simulate", "--config", str(scenario), "--trials", "2", "--out", str(out)]) == 0
        assert capsys.readouterr().out.strip() == str(out)
        table = pd.read_csv(out)
        assert len(table) == 3*3*4
        assert (table["trials"] == 2).all()

    def test_simulate_single_policy_json(self, scenario, tmp_path):
        out = tmp_path/"sim.json"
        main(["simulate", "--config", str(scenario), "--trials", "1", "--policy", "random", "--format", "json", "--out", str(out)])
        records = json.loads(out.read_text(encoding="utf-8"))
        assert {record["policy"] for record in records} == {"random"}

    def test_tradeoff(self, tmp_path):
        out = tmp_path/"tradeoff.csv"
        main(["tradeoff", "--out", str(out)])
        table = pd.read_csv(out)
        assert list(table.columns) == ["i_db", "se", "ee", "power", "feasible"]
        assert len(table) == 3*36

    def test_gaps(self, tmp_path):
        out = tmp_path/"gaps.csv"
        main(["gaps", "--out", str(out)])
        table = pd.read_csv(out)
        assert len(table) == 26
        assert table["ee_gap"].is_monotonic_decreasing

    def test_poa(self, tmp_path):
        out = tmp_path/"poa.csv"
        main(["poa", "--trials", "1", "--r-max", "0.2", "--grid-resolution", "10", "--out", str(out)])
        table = pd.read_csv(out)
        assert table["r_min_d"].tolist() == pytest.approx([0.0, 0.1, 0.2])
        assert (table["poa"] >= 0.99).all()

    @pytest.mark.parametrize("command", ["tradeoff", "gaps", "topology"])
    @pytest.mark.parametrize("flag", [["--workers", "2"], ["--trials", "3"], ["--policy", "random"]])
    def test_unused_flags_rejected(self, command, flag):
        with pytest.raises(SystemExit):
            build_parser().parse_args([command, *flag])

    def test_simulate_flags(self):
        args = build_parser().parse_args(["simulate", "--workers", "2", "--trials", "3", "--policy", "random"])
        assert (args.workers, args.trials, args.policy) == (2, 3, ["random"])

    def test_topology(self, tmp_path):
        out = tmp_path/"topology.csv"
        main(["topology", "--seed", "5", "--out", str(out)])
        assert len(pd.read_csv(out)) == 14

    def test_relative_out_honors_variable(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
        main(["topology"])
        assert (tmp_path/"topology.csv").exists()
        assert capsys.readouterr().out.strip() == str(tmp_path/"topology.csv")

def _last_round(table: pd.DataFrame, max_rounds: int) -> pd.Series:
    return table[table["round"] == max_rounds].set_index(["metric", "policy"])["mean"]

def test_default_size_ordering():
    cfg = ScenarioConfig(trials=20)
    last = _last_round(run_campaign(cfg).table, cfg.max_rounds)
    assert last["ee_d2d", "energy-efficient"] > last["ee_d2d", "random"] > last["ee_d2d", "spectral-efficient"]

def test_poa_sweep_trend():
    grid = np.round(np.arange(0, 1.05, 0.1), 10)
    table = poa_sweep(ScenarioConfig(n_d2d=1, n_cell=1, trials=3), grid)
    assert table["r_min_c"].tolist() == pytest.approx(grid/5)
    assert table["poa"].between(1 - 1e-2, 1.3).all()
    assert (table["poa_max"] >= table["poa"] - 1e-12).all()
    assert table["poa"].iloc[-1] >= table["poa"].iloc[0] - 1e-2

@pytest.mark.slow
def test_full_campaign_ordering():
    result = run_campaign(ScenarioConfig())
    last = _last_round(result.table, 20)
    assert last["ee_d2d", "energy-efficient"] > last["ee_d2d", "spectral-efficient"]
    assert last["ee_d2d", "energy-efficient"] > last["ee_d2d", "random"]
    assert last["ee_cellular", "energy-efficient"] > last["ee_cellular", "spectral-efficient"]
    assert last["se_d2d", "spectral-efficient"] > last["se_d2d", "energy-efficient"]
    ee, rnd, se = (last["ee_d2d", policy] for policy in ("energy-efficient", "random", "spectral-efficient"))
    assert ee >= 2*rnd
    assert rnd > se
    assert rnd >= 1.5*se
    conv = result.convergence
    for policy in ("energy-efficient", "spectral-efficient"):
        played = conv[conv["policy"] == policy]
        assert (played["converged"] & (played["rounds"] <= 6)).mean() >= 0.95
