"""Utility functions for running batches of episodes."""

from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .config import FitnessConfig
from .exceptions import GflockException
from .metrics import metrics_report
from .reporting import ComparisonTable, MetricsReport, average_reports
from .rules import RuleSet
from .scenario import Scenario
from .world import EpisodeLog, run_episode

EpisodeResult = Tuple[int, Optional[EpisodeLog], Optional[MetricsReport], Optional[Exception]]


def batch_run_episodes(
    scenario: Scenario,
    ruleset: RuleSet,
    seeds: Sequence[int],
    fitness_cfg: FitnessConfig = FitnessConfig(),
    *,
    on_error: str = "raise",
) -> List[EpisodeResult]:
    """
    Run one episode per seed and compute its report.

    Args:
        scenario: Scenario to simulate
        ruleset: Rule set driving every agent
        seeds: Episode seeds, run in order
        fitness_cfg: Fitness configuration of the reports
        on_error: 'raise' re-raises gflock errors, 'skip' records them

    Returns:
        ``(seed, log, report, error)`` tuples; log and report are None on error

    Example:
        >>> from gflock.scenario import open_field
        >>> from gflock.rules import baseline_rules
        >>> results = batch_run_episodes(open_field().with_overrides(n_agents=3), baseline_rules(), [0, 1])
        >>> [seed for seed, _, _, error in results if error is None]
        [0, 1]
    """
    results: List[EpisodeResult] = []
    for seed in seeds:
        try:
            log = run_episode(scenario, ruleset, seed)
            results.append((seed, log, metrics_report(log, fitness_cfg), None))
        except GflockException as e:
            if on_error == "raise":
                raise
            results.append((seed, None, None, e))
    return results


def stream_episodes(
    jobs: Iterable[Tuple[Scenario, RuleSet, int]],
    fitness_cfg: FitnessConfig = FitnessConfig(),
) -> Iterator[EpisodeResult]:
    """
    Run ``(scenario, ruleset, seed)`` jobs lazily, yielding one result each.

    Errors are yielded, never raised.
    """
    for scenario, ruleset, seed in jobs:
        try:
            log = run_episode(scenario, ruleset, seed)
            yield (seed, log, metrics_report(log, fitness_cfg), None)
        except GflockException as e:
            yield (seed, None, None, e)


def seed_averaged_report(
    scenario: Scenario,
    ruleset: RuleSet,
    seeds: Sequence[int],
    fitness_cfg: FitnessConfig = FitnessConfig(),
) -> MetricsReport:
    reports = [report for _, _, report, _ in batch_run_episodes(scenario, ruleset, seeds, fitness_cfg)]
    return average_reports([r for r in reports if r is not None])


def compare_models(
    models: Dict[str, RuleSet],
    scenario: Scenario,
    scales: Sequence[int],
    seeds: Sequence[int],
    fitness_cfg: FitnessConfig = FitnessConfig(),
) -> ComparisonTable:
    """
    Seed-averaged reports of every model at every swarm size.

    All models run on the same seeds.
    """
    table = ComparisonTable(list(models), list(scales), list(seeds))
    for scale in scales:
        scaled = scenario.with_overrides(n_agents=scale)
        for name, ruleset in models.items():
            table.add(name, scale, seed_averaged_report(scaled, ruleset, seeds, fitness_cfg))
    return table


__all__ = [
    "EpisodeResult",
    "batch_run_episodes",
    "compare_models",
    "seed_averaged_report",
    "stream_episodes",
]
