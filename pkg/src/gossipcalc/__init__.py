"""Gossip-based computation of separable functions over networks.

Simulates push-pull information spreading driven by a doubly stochastic
contact matrix, the exponential-variate minimum trick for estimating sums,
conductance analysis of topologies, and experiment aggregation.
"""

from .comp import (
    AccuracyReport,
    CompInputs,
    CompOutcome,
    accuracy_experiment,
    choose_r,
    estimate,
    oracle_min,
    run_comp,
    sample_variates,
)
from .conductance import (
    ConductanceResult,
    cheeger_bracket,
    conductance_complete_closed_form,
    conductance_exact,
    conductance_ring_closed_form,
    cut_ratio,
    grid_conductance_lower_bound,
    spectral_gap,
)
from .engine import (
    ActivationEvent,
    SimClock,
    async_absolute_time,
    clock_concentration_check,
    concentration_bound,
)
from .errors import (
    AllTrialsFailedError,
    DisconnectedGraphError,
    DuplicateEdgeError,
    EdgeListParseError,
    GossipCalcError,
    GraphGenerationError,
    InsufficientRecordsError,
    InvalidParameterError,
    InvalidStateError,
    NumericalError,
    SelfLoopError,
    SizeLimitError,
)
from .graphs import (
    Graph,
    TransitionMatrix,
    build_complete,
    build_grid,
    build_path,
    build_random_regular,
    build_ring,
    edge_list_text,
    load_edge_list,
    max_degree_matrix,
)
from .metrics import (
    MetricsRow,
    ScalingReport,
    TrialRecord,
    binomial_slack,
    empirical_computing_time,
    empirical_spreading_time,
    nearest_rank_quantile,
    scaling_fit,
    theory_prediction,
    write_metrics_csv,
)
from .seeding import UniformStream, mix64, substream_seed, trial_seed
from .spread import (
    MinVectorState,
    PartnerSampler,
    SpreadState,
    capacity_time_multiplier,
    merge_messages,
    merge_minima,
    min_exchange,
    run_spreading,
    spread_exchange,
    spreading_complete,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "ActivationEvent",
    "AllTrialsFailedError",
    "CompInputs",
    "CompOutcome",
    "ConductanceResult",
    "DisconnectedGraphError",
    "DuplicateEdgeError",
    "EdgeListParseError",
    "GossipCalcError",
    "Graph",
    "GraphGenerationError",
    "InsufficientRecordsError",
    "InvalidParameterError",
    "InvalidStateError",
    "MetricsRow",
    "MinVectorState",
    "NumericalError",
    "PartnerSampler",
    "ScalingReport",
    "SelfLoopError",
    "SimClock",
    "SizeLimitError",
    "SpreadState",
    "TransitionMatrix",
    "TrialRecord",
    "UniformStream",
    "accuracy_experiment",
    "async_absolute_time",
    "binomial_slack",
    "build_complete",
    "build_grid",
    "build_path",
    "build_random_regular",
    "build_ring",
    "capacity_time_multiplier",
    "cheeger_bracket",
    "choose_r",
    "clock_concentration_check",
    "concentration_bound",
    "conductance_complete_closed_form",
    "conductance_exact",
    "conductance_ring_closed_form",
    "cut_ratio",
    "edge_list_text",
    "empirical_computing_time",
    "empirical_spreading_time",
    "estimate",
    "grid_conductance_lower_bound",
    "load_edge_list",
    "max_degree_matrix",
    "merge_messages",
    "merge_minima",
    "min_exchange",
    "mix64",
    "nearest_rank_quantile",
    "oracle_min",
    "run_comp",
    "run_spreading",
    "sample_variates",
    "scaling_fit",
    "spectral_gap",
    "spread_exchange",
    "spreading_complete",
    "substream_seed",
    "theory_prediction",
    "trial_seed",
    "write_metrics_csv",
]
