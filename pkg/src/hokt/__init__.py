"""Dynamic community detection with higher-order knowledge transfer."""

from .benchgen import EventSpec, SynfixSpec, gen_events, gen_synfix, great_change_subsample
from .engine import EvoConfig, Individual, decode, init_population, mutate, pick_solution, run_nsga2, uniform_crossover
from .errors import ConfigError, GenerationError, HoktError, InputError, MetricError
from .experiment import ExperimentConfig, ResultsTable, load_config, run_experiment
from .graph import DynamicNetwork, Partition, SnapshotGraph, build_snapshot, connected_components
from .io import emit_similarity, load_network, write_network
from .metrics import f1_score, honmi, modularity, nmi, rank_sum_test
from .transfer import HoktConfig, TimestepResult, TransferPlan, baseline_mode, overlap_ratio, plan_transfer, run_hokt

__all__ = [
    "ConfigError", "DynamicNetwork", "EventSpec", "EvoConfig", "ExperimentConfig", "GenerationError",
    "HoktConfig", "HoktError", "Individual", "InputError", "MetricError", "Partition", "ResultsTable",
    "SnapshotGraph", "SynfixSpec", "TimestepResult", "TransferPlan", "baseline_mode", "build_snapshot",
    "connected_components", "decode", "emit_similarity", "f1_score", "gen_events", "gen_synfix",
    "great_change_subsample", "honmi", "init_population", "load_config", "load_network", "modularity",
    "mutate", "nmi", "overlap_ratio", "pick_solution", "plan_transfer", "rank_sum_test", "run_experiment",
    "run_hokt", "run_nsga2", "uniform_crossover", "write_network",
]
