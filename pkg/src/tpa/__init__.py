"""Topology-driven pilot assignment and rate evaluation for distributed massive MIMO.

Modules:
    netgen     network realizations, path loss, shadowing
    topo       sparsified topologies, conflict graphs, coloring, coded multicast
    lrmc       pilot dimension minimization by matrix completion + factorization
    smwim      sequential maximum weight induced matching (Benders decomposition)
    greedy     low-complexity greedy many-to-many matching
    baselines  semi-random and refinement baselines
    rates      training simulation, MMSE estimation, Monte-Carlo downlink rates
    cli        experiment orchestration and file interfaces
"""

from .netgen import NetworkRealization, SimConfig, generate_network, normalized_snrs, path_loss_db
from .topo import (
    ConflictGraph,
    EstimationPattern,
    PilotAssignment,
    Topology,
    build_conflict_graph,
    coded_multicast_assignment,
    color_assignment,
    default_estimation_pattern,
    sparsify_threshold,
    sparsify_top_fraction,
    verify_assignment,
)
from .lrmc import CompletionProblem, CompletionResult, FactorizationFailed, complete, factorize_binary
from .smwim import MwimInstance, RoundSolution, SequentialResult, benders_round, sequential_assign, solve_exact_milp
from .greedy import GreedyConfig, greedy_assign
from .baselines import cellfree_greedy_assign, lrmc_plus_semirandom, semi_random_assign
from .rates import ChannelRealization, RateResult, TrainingOutcome, downlink_rate, pilot_power, train

__version__ = "0.1.0"
