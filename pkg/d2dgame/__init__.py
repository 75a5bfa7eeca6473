"""Import top-level API"""
from d2dgame.network import *
from d2dgame.solver import *
from d2dgame.game import (
    POLICIES, Player, GameConfig, GameTrace, interference_view, play_round,
    run_to_equilibrium, verify_equilibrium, random_allocation, best_response
)
from d2dgame.analysis import *
