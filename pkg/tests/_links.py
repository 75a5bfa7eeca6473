import pytest

import numpy as np
import pandas as pd

from d2dgame.network.instance import UEParams
from d2dgame.solver import DinkelbachConfig, DualConfig, InterferenceView

class _TestSolverGeneral:
    # Define these class attrs in subclasses
    solver_class = None
    link = None
    channels = None

    def make(self, view, params, gains, warm_start=False):
        """Return a solver with the given dual ascent start"""
        dual = DualConfig(warm_start=warm_start, tau_max=5000)
        if self.solver_class.__name__ == "EnergyEfficientSolver":
            return self.solver_class(view, params, gains, DinkelbachConfig(inner=dual))
        return self.solver_class(view, params, gains, dual)

    @pytest.fixture()
    def gains(self) -> "np.array":
        """Return direct gains with a strong and a weak channel"""
        return np.array([1.0, 0.5])[:self.channels]

    @pytest.fixture()
    def view(self):
        """Return a view with unequal interference"""
        return InterferenceView(np.array([0.02, 0.05])[:self.channels], noise=0.1, link=self.link)

    @pytest.fixture()
    def params(self):
        """Return loose limits"""
        return UEParams(p_max=0.5, r_min=0.0, p_cir=0.05, eta=0.5)

    @pytest.fixture()
    def instance(self, view, params, gains):
        """Return a solver instance"""
        return self.make(view, params, gains)

    @pytest.mark.parametrize("bad_gain", [0.0, -1.0])
    def test_invalid_gains_exception(self, view, params, bad_gain):
        gains = np.full(self.channels, bad_gain)
        with pytest.raises(ValueError, match="Non-positive direct gains were passed. Please only pass positive values"):
            self.make(view, params, gains)

    def test_gain_count_mismatch_exception(self, view, params):
        with pytest.raises(ValueError):
            self.make(view, params, np.ones(self.channels + 1))

    def test_dunder_repr_doesnt_break_on_repr_call(self, instance):
        repr_val = repr(instance)
        assert isinstance(repr_val, str)
        assert f"p_max={instance.params.p_max}" in repr_val

    def test_power_budget_respected(self, instance, params):
        report = instance.solve()
        assert report.powers.sum() <= params.p_max*(1 + 1e-6)
        assert (report.powers >= 0).all()

    def test_water_level_structure(self, instance):
        """Active channels share one water level, silent ones sit above it"""
        result = instance.dual_ascent(instance.solve().q_star if self.link == "d2d" else 1.0)
        powers = result.powers
        level = (powers + instance.floors)[powers > 0]
        assert np.allclose(level, level[0], rtol=0, atol=1e-9)
        assert (instance.floors[powers == 0] >= level[0] - 1e-9).all()

    def test_cold_start_matches_warm_start(self, view, params, gains):
        warm = self.make(view, params, gains, warm_start=True).solve()
        cold = self.make(view, params, gains, warm_start=False).solve()
        assert np.allclose(warm.powers, cold.powers, atol=1e-9)
        assert cold.inner_iters >= warm.inner_iters
        assert warm.inner_iters <= warm.outer_iters

    def test_cold_ascent_iterates(self, instance):
        result = instance.dual_ascent(1.0)
        assert result.iters > 1

    def test_warm_ascent_stops_at_once(self, view, params, gains):
        result = self.make(view, params, gains, warm_start=True).dual_ascent(1.0)
        assert result.iters == 1
        assert result.converged

    def test_complementary_slackness(self, instance, params):
        result = instance.dual_ascent(2.0)
        rate = instance.rate(result.powers)
        assert abs(result.alpha*(rate - params.r_min)) < 1e-4
        assert abs(result.beta*(result.powers.sum() - params.p_max)) < 1e-4

    def test_rate_floor_met_when_feasible(self, view, gains):
        params = UEParams(p_max=0.5, r_min=1.0, p_cir=0.05, eta=0.5)
        report = self.make(view, params, gains).solve()
        assert report.feasible
        assert self.make(view, params, gains).rate(report.powers) >= params.r_min - 1e-6

    def test_infeasible_rate_floor_flagged(self, view, gains, caplog):
        params = UEParams(p_max=0.01, r_min=5.0, p_cir=0.05, eta=0.5)
        report = self.make(view, params, gains).solve()
        assert not report.feasible
        assert report.powers.sum() == pytest.approx(params.p_max, rel=1e-9)
        assert "out of reach" in caplog.text

    def test_dataframe_property(self, instance) -> None:
        """Test that DataFrame property is working as expected"""
        report = instance.solve()
        assert isinstance(report.df, pd.DataFrame)
        assert list(report.df.columns) == ["iteration", "q"]
        assert report.df["q"].tolist() == list(report.q_trace)
