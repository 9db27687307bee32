"""Tests for order metrics and the composite fitness."""

import math

import numpy as np
import pytest

from gflock.config import FitnessConfig, FitnessVariant
from gflock.exceptions import DegenerateInputError
from gflock.geometry import Vec2
from gflock.metrics import (
    anisotropy,
    anisotropy_series,
    anisotropy_variance,
    average_time,
    centroid,
    combine_factors,
    death_rate,
    fitness,
    fitness_factors,
    gamma_series,
    gamma_t,
    heading_deviation,
    members,
    metrics_report,
    stability_variance,
    uniformity_t,
)
from gflock.rules import baseline_rules
from gflock.scenario import gauntlet, open_field
from gflock.world import EpisodeLog, Event, EventKind, run_episode

ACTIVE, ARRIVED, DEAD = 0, 1, 2


def make_log(positions, velocities=None, statuses=None, events=(), dt=1.0, max_steps=10):
    pos = np.asarray(positions, dtype=np.float64)
    vel = np.zeros_like(pos) if velocities is None else np.asarray(velocities, dtype=np.float64)
    st = (
        np.zeros(pos.shape[:2], dtype=np.int8)
        if statuses is None
        else np.asarray(statuses, dtype=np.int8)
    )
    return EpisodeLog(pos, vel, st, tuple(events), dt, max_steps)


@pytest.fixture
def drifting():
    """Three agents translating right by one unit per step after a resting start."""
    base = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]])
    positions = [base, base + [1.0, 0.0], base + [2.0, 0.0]]
    velocities = [np.zeros((3, 2)), np.tile([1.0, 0.0], (3, 1)), np.tile([1.0, 0.0], (3, 1))]
    return make_log(positions, velocities)


class TestSnapshotMetrics:
    def test_centroid(self):
        assert centroid([(0.0, 0.0), (2.0, 0.0), (1.0, 3.0)]) == Vec2(1.0, 1.0)

    def test_centroid_of_nothing(self):
        with pytest.raises(DegenerateInputError):
            centroid([])

    def test_gamma(self):
        assert gamma_t([(0.0, 0.0), (2.0, 0.0)]) == 1.0
        assert gamma_t([(5.0, 5.0)]) == 0.0

    def test_gamma_matches_direct_sum(self):
        rng = np.random.default_rng(0)
        pts = rng.uniform(-10, 10, size=(15, 2))
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)
        expected = sum(math.hypot(p[0] - cx, p[1] - cy) for p in pts) / len(pts)
        assert gamma_t(pts) == pytest.approx(expected, rel=1e-12)

    def test_stability_variance(self):
        assert stability_variance([1.0, 2.0, 3.0]) == pytest.approx(2.0 / 3.0)
        assert stability_variance([4.0]) == 0.0
        with pytest.raises(DegenerateInputError):
            stability_variance([])

    def test_uniformity(self):
        assert uniformity_t([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]) == pytest.approx(0.0)
        assert uniformity_t([(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]) == pytest.approx(
            math.sqrt(2.0) / 4.0
        )
        assert uniformity_t([(1.0, 1.0)]) == 0.0
        assert uniformity_t([(1.0, 1.0), (1.0, 1.0)]) == 0.0


class TestHeadingDeviation:
    def test_symmetric_pair(self):
        delta, thetas = heading_deviation([(1.0, 0.0), (0.0, 1.0)])
        assert thetas == pytest.approx([-45.0, 45.0])
        assert delta == pytest.approx(0.0, abs=1e-12)

    def test_zero_velocity_gets_zero_angle(self):
        _, thetas = heading_deviation([(1.0, 0.0), (1.0, 0.0), (0.0, 0.0)])
        assert thetas == [0.0, 0.0, 0.0]

    def test_opposite_heading_maps_to_plus_180(self):
        _, thetas = heading_deviation([(1.0, 0.0)] * 3 + [(-1.0, 0.0)])
        assert thetas[-1] == 180.0

    def test_all_zero_is_degenerate(self):
        with pytest.raises(DegenerateInputError):
            heading_deviation([(0.0, 0.0), (0.0, 0.0)])

    def test_cancelling_velocities_are_degenerate(self):
        with pytest.raises(DegenerateInputError):
            heading_deviation([(1.0, 0.0), (-1.0, 0.0)])

    def test_matches_atan2_oracle(self):
        rng = np.random.default_rng(1)
        vel = rng.normal(size=(12, 2))
        mx, my = vel[:, 0].mean(), vel[:, 1].mean()
        expected = [
            math.degrees(math.atan2(mx * vy - my * vx, mx * vx + my * vy)) for vx, vy in vel
        ]
        delta, thetas = heading_deviation(vel)
        assert thetas == pytest.approx(expected, abs=1e-9)
        assert delta == pytest.approx(sum(expected) / len(expected), abs=1e-9)


class TestEpisodeMetrics:
    def test_translation_has_constant_gamma(self, drifting):
        values = [g for _, g in gamma_series(drifting)]
        assert len(values) == 3
        assert values == pytest.approx([values[0]] * 3)

    def test_resting_step_skipped_in_anisotropy(self, drifting):
        series = anisotropy_series(drifting)
        assert [t for t, _ in series] == [1, 2]
        assert anisotropy(drifting) == pytest.approx(0.0)

    def test_anisotropy_variance(self, drifting):
        log = make_log(
            [[[0.0, 0.0], [5.0, 0.0]]] * 3,
            velocities=[
                [[0.0, 0.0], [0.0, 0.0]],
                [[1.0, 0.0], [0.0, 1.0]],
                [[1.0, 0.0], [1.0, 0.0]],
            ],
        )
        assert [v for _, v in anisotropy_series(log)] == pytest.approx([45.0, 0.0])
        assert anisotropy_variance(log) == pytest.approx(506.25)
        assert anisotropy_variance(drifting) == pytest.approx(0.0)

    def test_anisotropy_needs_two_moving_agents(self):
        log = make_log(
            [[[0.0, 0.0], [5.0, 0.0]]] * 2,
            velocities=[[[0.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]],
        )
        with pytest.raises(DegenerateInputError):
            anisotropy(log)
        assert metrics_report(log).anisotropy == 0.0

    def test_members_fall_back_to_arrived(self):
        log = make_log(
            [[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]] * 2,
            statuses=[[ACTIVE, ACTIVE, DEAD], [ARRIVED, ARRIVED, DEAD]],
        )
        assert list(members(log, 0)) == [0, 1]
        assert list(members(log, 1)) == [0, 1]

    def test_all_dead_step_has_no_members(self):
        log = make_log([[[0.0, 0.0]]], statuses=[[DEAD]])
        assert len(members(log, 0)) == 0
        assert gamma_series(log) == []

    def test_average_time(self):
        events = [Event(2, 0, EventKind.ARRIVED), Event(4, 1, EventKind.ARRIVED)]
        log = make_log([[[0.0, 0.0], [1.0, 0.0]]] * 5, events=events, dt=0.5)
        result = average_time(log)
        assert result.seconds == 1.5
        assert not result.zero_arrivals

    def test_average_time_without_arrivals(self, drifting):
        result = average_time(drifting)
        assert result.seconds == 10.0
        assert result.zero_arrivals

    def test_death_rate(self):
        log = make_log(
            [[[0.0, 0.0]] * 4] * 2, events=[Event(1, 2, EventKind.DIED)]
        )
        assert death_rate(log) == 0.25


class TestFitness:
    def test_literal_is_zero_without_deaths(self, drifting):
        cfg = FitnessConfig(variant=FitnessVariant.LITERAL)
        assert fitness(drifting, cfg) == 0.0

    def test_robust_is_floored_by_epsilon(self, drifting):
        cfg = FitnessConfig(alpha=2.0, epsilon=1e-3)
        assert fitness(drifting, cfg) >= 2.0 * 1e-3**5
        assert fitness(drifting, cfg) > 0.0

    def test_robust_product(self, drifting):
        cfg = FitnessConfig(alpha=1.5, epsilon=0.01)
        f = fitness_factors(drifting)
        expected = (
            1.5
            * (0.01 + f.average_time)
            * (0.01 + f.death_rate)
            * (0.01 + f.centroid_distance)
            * (0.01 + f.gamma_variance)
            * (0.01 + f.heading_dispersion)
        )
        assert fitness(drifting, cfg) == pytest.approx(expected)
        assert combine_factors(f, cfg) == fitness(drifting, cfg)

    def test_factors_of_drifting_swarm(self, drifting):
        f = fitness_factors(drifting)
        assert f.average_time == 10.0
        assert f.death_rate == 0.0
        assert f.centroid_distance == pytest.approx(gamma_t(drifting.positions[0]))
        assert f.gamma_variance == pytest.approx(0.0, abs=1e-20)
        assert f.heading_dispersion == pytest.approx(0.0, abs=1e-20)

    def test_heading_dispersion_averages_over_every_snapshot(self):
        still = [[0.0, 0.0], [0.0, 0.0]]
        split = [[1.0, 0.0], [0.0, 1.0]]
        log = make_log([[[0.0, 0.0], [3.0, 0.0]]] * 3, velocities=[still, split, split])
        # +-45 degrees about the mean heading on two of three snapshots
        assert fitness_factors(log).heading_dispersion == pytest.approx(2 * 2 * 45.0**2 / 3)

    def test_literal_stability_factor_is_mean_deviation(self):
        log = make_log(
            [
                [[0.0, 0.0], [2.0, 0.0]],
                [[0.0, 0.0], [4.0, 0.0]],
            ],
            events=[Event(1, 1, EventKind.DIED)],
        )
        assert fitness_factors(log).gamma_mean_deviation == pytest.approx(0.0)


class TestMetricsReport:
    def test_simulated_report_is_valid(self):
        scenario = gauntlet().with_overrides(n_agents=8, max_steps=60)
        log = run_episode(scenario, baseline_rules(), 2)
        report = metrics_report(log)
        report.validate()
        assert set(report.to_dict()) == {
            "aggregation",
            "anisotropy",
            "average_time",
            "uniformity",
            "death_rate",
            "stability_variance",
            "fitness",
        }
        assert report.fitness == fitness(log)

    def test_report_is_deterministic(self):
        scenario = open_field().with_overrides(n_agents=5, max_steps=30)
        first = metrics_report(run_episode(scenario, baseline_rules(), 8))
        second = metrics_report(run_episode(scenario, baseline_rules(), 8))
        assert first == second
