"""Import the simulation harness into the harness namespace for easy importing"""

from d2dgame.harness.config import ScenarioConfig, dbm_to_watts
from d2dgame.harness.topology import (
    Topology, uniform_disk, place_users, rayleigh_power, channel_gains,
    generate_scenario, generate_topology
)
from d2dgame.harness.campaign import (
    METRICS, COLUMNS, OUTPUT_DIR_ENV, TrialResult, CampaignResult, trial_rng,
    run_trial, aggregate, run_campaign, poa_sweep, resolve_output,
    write_table, emit_results
)
