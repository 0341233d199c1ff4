"""Uplink URLLC resource allocation under time-correlated fading.

Library layout:

- ``channel_model``   -- Gauss-Markov fading process and the exact conditional
  law of the squared coefficient (pdf/CDF/quantiles, offline quantile table).
- ``link_budget``     -- SINR, Shannon decode condition, resource-unit
  requirement functions with and without channel knowledge.
- ``matching``        -- maximum-weight bipartite matching with a
  deterministic lexicographic tie-break.
- ``allocators``      -- the graph-based allocator and the greedy
  best-channel baseline, plus the schedule validator.
- ``pilot_scheduler`` -- round-robin, distance-threshold and dynamic
  best-improvement pilot selection.
- ``simulator``       -- the per-cycle loop, pipeline delay, metrics.
- ``cli``             -- config parsing, parameter sweeps, CSV emission.
"""

from .channel_model import (
    DirectQuantiles,
    FTable,
    GmParams,
    build_f_table,
    conditional_cdf,
    conditional_mean,
    conditional_pdf,
    draw_fading,
    evolve_fading,
    gm_params,
    inverse_conditional_cdf,
)
from .link_budget import (
    ChannelInterference,
    LinkParams,
    decode_success,
    path_gain,
    required_rus_no_csi,
    required_rus_with_csi,
    sinr,
)
from .matching import BipartiteGraph, Matching, max_weight_matching
from .allocators import (
    CycleSchedule,
    Device,
    PilotLayout,
    bca_allocate,
    compute_zeta,
    dump_schedule,
    edge_feasible,
    edge_weight,
    gba_allocate,
    validate_schedule,
)
from .pilot_scheduler import (
    CsiRecord,
    PilotPlan,
    distance_threshold_select,
    dynamic_select,
    make_policy,
    pilot_gain,
    round_robin_select,
)
from .simulator import (
    Metrics,
    RequirementModel,
    SimConfig,
    TopologyRun,
    draw_interference,
    draw_pru_mask,
    fairness_by_distance,
    generate_topology,
    run_simulation,
)

__version__ = "0.1.0"
