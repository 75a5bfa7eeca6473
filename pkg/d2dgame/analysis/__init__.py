"""Import the analysis tooling into the analysis namespace for easy importing"""

from d2dgame.analysis._search import golden_section_maximize
from d2dgame.analysis.gaps import (
    SymmetricModel, GapPoint, ee_gap_d2d, se_gap_d2d, ee_gap_cellular,
    se_gap_cellular, symmetric_gaps, symmetric_optimal_powers,
    gap_vs_interference
)
from d2dgame.analysis.tradeoff import (
    TradeoffPoint, TradeoffSummary, se_sweep, max_feasible_se, tradeoff_curve,
    tradeoff_df, tradeoff_summary, se_dominance_count
)
from d2dgame.analysis.anarchy import GridTooLargeError, grid_optimum, price_of_anarchy
