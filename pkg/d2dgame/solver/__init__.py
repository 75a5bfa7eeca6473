"""Import the per-player solvers into the solver namespace for easy importing"""

from d2dgame.solver._solver import (
    LOG2E, DinkelbachConfig, DualConfig, DualResult, InterferenceView,
    SolverReport, WaterLevelError
)
from d2dgame.solver.energy_efficient import (
    EnergyEfficientSolver, transformed_objective, waterfill_ee_d2d,
    waterfill_ee_cellular, dual_ascent, dinkelbach_solve, f_of_q
)
from d2dgame.solver.spectral_efficient import (
    SpectralEfficientSolver, waterfill_se_d2d, waterfill_se_cellular, solve_se
)
