import math

import pytest
import numpy as np
from hypothesis import given, settings, strategies as st

from d2dgame.network.instance import UEParams
from d2dgame.solver import (
    LOG2E, DinkelbachConfig, InterferenceView, SpectralEfficientSolver,
    WaterLevelError, dinkelbach_solve, solve_se, waterfill_se_cellular,
    waterfill_se_d2d
)

from ._links import _TestSolverGeneral
from ._oracles import grid_rate_max

class TestSpectralEfficientD2D(_TestSolverGeneral):
    solver_class = SpectralEfficientSolver
    link = "d2d"
    channels = 2

class TestSpectralEfficientCellular(_TestSolverGeneral):
    solver_class = SpectralEfficientSolver
    link = "cellular"
    channels = 1

def test_single_channel_uses_full_budget():
    view = InterferenceView([0.002], noise=1e-7, link="cellular")
    report = solve_se(view, UEParams(p_max=0.2), [1.0])
    assert report.powers[0] == 0.2
    assert report.inner_iters == 0
    assert report.q_star == pytest.approx(math.log2(1 + 0.2/0.0020001), rel=1e-12)
    assert report.q_star == pytest.approx(6.658, abs=1e-3)

def test_two_channels_share_budget():
    view = InterferenceView([0.0, 0.0], noise=0.1)
    report = solve_se(view, UEParams(p_max=1.0), [1.0, 0.5])
    # floors 0.1 and 0.2 share the level 0.65
    assert report.powers == pytest.approx([0.55, 0.45], rel=1e-9)
    assert report.powers.sum() == pytest.approx(1.0, rel=1e-12)

def test_weak_channel_stays_silent():
    view = InterferenceView([0.0, 0.0], noise=0.1)
    report = solve_se(view, UEParams(p_max=0.1), [1.0, 0.1])
    assert report.powers[1] == 0
    assert report.powers[0] == pytest.approx(0.1)

@pytest.mark.parametrize("seed", range(20))
def test_matches_grid_search(seed):
    rng = np.random.default_rng(seed)
    view = InterferenceView(rng.uniform(0, 0.05, 2), noise=rng.uniform(0.01, 0.1))
    params = UEParams(p_max=rng.uniform(0.1, 1))
    gains = rng.uniform(0.5, 2, 2)
    report = solve_se(view, params, gains)
    best, _ = grid_rate_max(view, params, gains, step=1e-3*params.p_max)
    assert report.q_star >= best - 1e-9
    assert report.q_star == pytest.approx(best, rel=1e-3)

@given(st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_se_versus_ee_ordering(seed):
    rng = np.random.default_rng(seed)
    channels = int(rng.integers(1, 3))
    view = InterferenceView(rng.uniform(0, 0.05, channels), noise=rng.uniform(0.01, 0.1))
    params = UEParams(p_max=rng.uniform(0.1, 1), p_cir=rng.uniform(0.01, 0.1), eta=rng.uniform(0.3, 1))
    gains = rng.uniform(0.5, 2, channels)
    se_solver = SpectralEfficientSolver(view, params, gains)
    se_report = se_solver.solve()
    ee_report = dinkelbach_solve(view, params, gains, DinkelbachConfig(delta=1e-10, l_max=50))
    assert se_report.q_star >= se_solver.rate(ee_report.powers) - 1e-9
    se_ee = se_solver.rate(se_report.powers)/se_solver.total_power(se_report.powers)
    assert ee_report.q_star >= se_ee - 1e-9

class TestWaterfill:
    def test_cellular_level(self):
        view = InterferenceView([0.0], noise=0.1, link="cellular")
        assert waterfill_se_cellular(view, 0.0, LOG2E, UEParams(), 1.0) == pytest.approx(0.9)

    def test_rate_multiplier_raises_level(self):
        view = InterferenceView([0.0, 0.0], noise=0.1)
        base = waterfill_se_d2d(view, 0.0, 1.0, UEParams(), [1.0, 1.0])
        assert (waterfill_se_d2d(view, 1.0, 1.0, UEParams(), [1.0, 1.0]) > base).all()

    def test_unbounded_level_exception(self):
        view = InterferenceView([0.0], noise=0.1)
        with pytest.raises(WaterLevelError):
            waterfill_se_d2d(view, 0.0, 0.0, UEParams(), [1.0])

    def test_negative_multipliers_exception(self):
        view = InterferenceView([0.0], noise=0.1)
        with pytest.raises(ValueError):
            waterfill_se_d2d(view, -1.0, 1.0, UEParams(), [1.0])
