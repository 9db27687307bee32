"""Tests for episode batches and model comparison."""

import os
import statistics
from dataclasses import replace

import pytest

from gflock.exceptions import GflockException
from gflock.genetic import evolve
from gflock.metrics import metrics_report, uniformity_series
from gflock.presets import OptimizationBudget, get_ga_config
from gflock.reporting import average_reports
from gflock.rules import RuleSet, RuleWeights, baseline_rules
from gflock.scenario import gauntlet, open_field
from gflock.utils import batch_run_episodes, compare_models, seed_averaged_report, stream_episodes
from gflock.world import run_episode


@pytest.fixture
def small():
    return open_field().with_overrides(n_agents=3, max_steps=20)


class TestBatchRunEpisodes:
    def test_one_result_per_seed(self, small):
        results = batch_run_episodes(small, baseline_rules(), [4, 5, 6])
        assert [seed for seed, _, _, _ in results] == [4, 5, 6]
        for seed, log, report, error in results:
            assert error is None
            assert log.digest() == run_episode(small, baseline_rules(), seed).digest()
            assert report == metrics_report(log)

    def test_errors_raise_by_default(self, small):
        broken = replace(small, n_agents=0)
        with pytest.raises(GflockException):
            batch_run_episodes(broken, baseline_rules(), [0])

    def test_errors_skipped_on_request(self, small):
        broken = replace(small, n_agents=0)
        ((seed, log, report, error),) = batch_run_episodes(
            broken, baseline_rules(), [0], on_error="skip"
        )
        assert seed == 0
        assert log is None and report is None
        assert isinstance(error, GflockException)


def test_stream_episodes_is_lazy_and_ordered(small):
    jobs = ((small, baseline_rules(), seed) for seed in range(3))
    stream = stream_episodes(jobs)
    first = next(stream)
    assert first[0] == 0
    assert [seed for seed, _, _, _ in stream] == [1, 2]


def test_seed_averaged_report(small):
    seeds = [0, 1]
    expected = average_reports(
        [metrics_report(run_episode(small, baseline_rules(), s)) for s in seeds]
    )
    assert seed_averaged_report(small, baseline_rules(), seeds) == expected


class TestCompareModels:
    def test_identical_models_give_identical_columns(self, small):
        table = compare_models(
            {"baseline": baseline_rules(), "optimized": baseline_rules()}, small, [2, 3], [0, 1]
        )
        for scale in (2, 3):
            assert table.cells[("baseline", scale)] == table.cells[("optimized", scale)]
        assert table.seeds == [0, 1]

    def test_models_differ(self, small):
        other = RuleSet.uniform(RuleWeights(0.9, 0.1, 0.1, 0.9, 0.9))
        table = compare_models({"baseline": baseline_rules(), "optimized": other}, small, [3], [0])
        assert table.cells[("baseline", 3)] != table.cells[("optimized", 3)]


HELD_OUT = [101, 102, 103, 104, 105]


@pytest.fixture(scope="module")
def desk_run():
    """One desk-budget optimization on the gauntlet, trained on seed 0 only."""
    cfg = get_ga_config(
        OptimizationBudget.DESK,
        gauntlet(),
        episodes_per_eval=1,
        workers=min(4, os.cpu_count() or 1),
    )
    return evolve(cfg)


@pytest.mark.slow
class TestOptimizedAgainstBaseline:
    def test_best_fitness_never_worsens(self, desk_run):
        bests = [row.best for row in desk_run.history]
        assert len(bests) == 31
        assert all(later <= earlier for earlier, later in zip(bests, bests[1:]))

    def test_fewer_deaths_and_lower_fitness_on_held_out_seeds(self, desk_run):
        scenario = gauntlet()
        base = [r for _, _, r, _ in batch_run_episodes(scenario, baseline_rules(), HELD_OUT)]
        tuned = [r for _, _, r, _ in batch_run_episodes(scenario, desk_run.best, HELD_OUT)]

        def mean(reports, name):
            return statistics.fmean(getattr(r, name) for r in reports)

        assert mean(tuned, "fitness") < mean(base, "fitness")
        assert mean(tuned, "death_rate") <= mean(base, "death_rate")
        assert sum(r.death_rate == 0.0 for r in tuned) >= 3

    @pytest.mark.parametrize("n_agents", [20, 60, 100])
    def test_better_at_every_swarm_size(self, desk_run, n_agents):
        models = {"baseline": baseline_rules(), "optimized": desk_run.best}
        table = compare_models(models, gauntlet(), [n_agents], HELD_OUT)
        optimized, baseline = (table.cells[(m, n_agents)] for m in ("optimized", "baseline"))
        assert optimized.fitness < baseline.fitness

    def test_uniformity_stays_bounded_while_baseline_spikes(self, desk_run):
        scenario = gauntlet()
        tuned = [
            u
            for seed in HELD_OUT
            for _, u in uniformity_series(run_episode(scenario, desk_run.best, seed))
        ]
        assert sum(0.0 <= u <= 1.0 for u in tuned) >= 0.95 * len(tuned)

        spiked = []
        for seed in HELD_OUT:
            log = run_episode(scenario, baseline_rules(), seed)
            series = [u for _, u in uniformity_series(log)]
            spiked.append(max(series) >= 3 * statistics.median(series))
        assert any(spiked)
