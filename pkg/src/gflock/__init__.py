"""
gflock: context-dependent flocking rules, simulated and optimized.

A swarm of point agents navigates a 2D scenario toward a target area. Each
agent's velocity update weighs repulsion, alignment, attraction, obstacle
avoidance and target seeking, with a separate weight set for each sensing
context. This library provides:
- A deterministic synchronous simulator with death and arrival detection
- Order metrics (centroid distance, heading spread, spacing uniformity) and
  a composite fitness
- A genetic optimizer over the 20 rule weights, with checkpoints
- CSV/JSON export and replay of runs
"""

__version__ = "0.1.0"
__author__ = "gflock Contributors"

from .audit import EvolutionAuditLogger, GenerationEntry, RunMetrics
from .config import FitnessConfig, FitnessVariant, GAConfig, SimFlags, ZoneConfig
from .exceptions import (
    CheckpointCompatibilityError,
    CheckpointError,
    CheckpointIntegrityError,
    ConfigError,
    ContractError,
    DegenerateInputError,
    GflockException,
    InsideObstacleError,
    ParseError,
    ReplayMismatchError,
)
from .formatting import TableStyle, format_comparison, format_table
from .genetic import (
    EvaluatedGenome,
    EvolutionResult,
    Genome,
    Population,
    checkpoint_load,
    checkpoint_save,
    crossover,
    decode,
    encode,
    evaluate,
    evolve,
    init_population,
    mutate,
    select,
)
from .geometry import Circle, Polygon, Vec2, nearest_obstacle_point
from .metrics import (
    anisotropy,
    average_time,
    centroid,
    death_rate,
    fitness,
    gamma_t,
    heading_deviation,
    metrics_report,
    stability_variance,
    uniformity_t,
)
from .presets import OptimizationBudget, SwarmScale, get_ga_config
from .reporting import ComparisonTable, MetricsReport, ReplayReport
from .rules import Context, RuleSet, RuleWeights, baseline_rules, load_rules
from .scenario import Scenario, TargetArea, build_scenario, load_scenario
from .swarm import (
    AgentState,
    AgentStatus,
    NeighborhoodPartition,
    classify_context,
    clamp_speed,
    partition_neighbors,
    velocity_update,
)
from .utils import batch_run_episodes, compare_models, stream_episodes
from .world import EpisodeLog, WorldState, check_arrival, check_death, run_episode, step

__all__ = [  # noqa: RUF022
    # Swarm core
    "AgentState",
    "AgentStatus",
    "Context",
    "NeighborhoodPartition",
    "RuleSet",
    "RuleWeights",
    "ZoneConfig",
    "baseline_rules",
    "classify_context",
    "clamp_speed",
    "load_rules",
    "partition_neighbors",
    "velocity_update",
    # World
    "Circle",
    "Polygon",
    "Vec2",
    "Scenario",
    "SimFlags",
    "TargetArea",
    "EpisodeLog",
    "WorldState",
    "build_scenario",
    "load_scenario",
    "nearest_obstacle_point",
    "check_arrival",
    "check_death",
    "run_episode",
    "step",
    # Metrics
    "FitnessConfig",
    "FitnessVariant",
    "MetricsReport",
    "anisotropy",
    "average_time",
    "centroid",
    "death_rate",
    "fitness",
    "gamma_t",
    "heading_deviation",
    "metrics_report",
    "stability_variance",
    "uniformity_t",
    # Optimization
    "GAConfig",
    "Genome",
    "EvaluatedGenome",
    "EvolutionResult",
    "Population",
    "checkpoint_load",
    "checkpoint_save",
    "crossover",
    "decode",
    "encode",
    "evaluate",
    "evolve",
    "init_population",
    "mutate",
    "select",
    # Presets and progress
    "OptimizationBudget",
    "SwarmScale",
    "get_ga_config",
    "EvolutionAuditLogger",
    "GenerationEntry",
    "RunMetrics",
    # Reporting and batches
    "ComparisonTable",
    "ReplayReport",
    "TableStyle",
    "format_comparison",
    "format_table",
    "batch_run_episodes",
    "compare_models",
    "stream_episodes",
    # Exceptions
    "GflockException",
    "ConfigError",
    "ParseError",
    "DegenerateInputError",
    "InsideObstacleError",
    "ContractError",
    "CheckpointError",
    "CheckpointIntegrityError",
    "CheckpointCompatibilityError",
    "ReplayMismatchError",
]
