"""
Order parameters of a swarm and the composite fitness.

All functions are pure and read only the EpisodeLog, so a log rebuilt from
the exported CSV gives the same numbers as the in-memory one.

Membership convention: at step ``t`` the members are the active agents; when
none is active, the agents that have not died. Steps without members are
skipped. Heading terms always use the active agents.
"""

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .config import FitnessConfig, FitnessVariant
from .exceptions import DegenerateInputError
from .geometry import Vec2
from .reporting import MetricsReport
from .swarm import AgentStatus
from .world import STATUS_CODES, EpisodeLog

PositionsLike = Union[Sequence[Vec2], Sequence[Tuple[float, float]], np.ndarray]

_ACTIVE = STATUS_CODES[AgentStatus.ACTIVE]
_DEAD = STATUS_CODES[AgentStatus.DEAD]


def _as_points(points: PositionsLike) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.size == 0:
        return arr.reshape(0, 2)
    return arr.reshape(-1, 2)


def centroid(positions: PositionsLike) -> Vec2:
    """Arithmetic mean of ``positions``."""
    arr = _as_points(positions)
    if len(arr) == 0:
        raise DegenerateInputError("centroid of an empty position list")
    c = arr.mean(axis=0)
    return Vec2(float(c[0]), float(c[1]))


def gamma_t(positions: PositionsLike) -> float:
    """Mean distance of the positions to their centroid."""
    arr = _as_points(positions)
    if len(arr) == 0:
        raise DegenerateInputError("gamma of an empty position list")
    c = arr.mean(axis=0)
    return float(np.hypot(arr[:, 0] - c[0], arr[:, 1] - c[1]).mean())


def stability_variance(gamma_series: Sequence[float]) -> float:
    """Population variance (divisor = series length)."""
    if len(gamma_series) == 0:
        raise DegenerateInputError("stability variance of an empty series")
    return float(np.var(np.asarray(gamma_series, dtype=np.float64)))


def heading_deviation(velocities: PositionsLike) -> Tuple[float, List[float]]:
    """
    Signed angle of each velocity from the group's mean velocity direction.

    Returns ``(delta, thetas)`` in degrees, each theta in ``(-180, 180]``.
    Zero velocities get theta 0.

    Raises:
        DegenerateInputError: If every velocity is zero, or they cancel so the
            mean direction is undefined
    """
    arr = _as_points(velocities)
    speeds = np.hypot(arr[:, 0], arr[:, 1]) if len(arr) else np.zeros(0)
    if not np.any(speeds > 0):
        raise DegenerateInputError("heading of an all-zero velocity set")
    mean = arr.mean(axis=0)
    if mean[0] == 0.0 and mean[1] == 0.0:
        raise DegenerateInputError("velocities cancel; mean heading undefined", context=str(mean))
    dots = arr[:, 0] * mean[0] + arr[:, 1] * mean[1]
    crosses = mean[0] * arr[:, 1] - mean[1] * arr[:, 0]
    thetas = np.degrees(np.arctan2(crosses, dots))
    thetas = np.where(thetas <= -180.0, 180.0, thetas)
    thetas = np.where(speeds > 0, thetas, 0.0)
    return float(thetas.mean()), [float(t) for t in thetas]


def uniformity_t(positions: PositionsLike) -> float:
    """
    Coefficient of variation of nearest-neighbour distances.

    Fewer than two positions, or a zero mean spacing, give 0.
    """
    arr = _as_points(positions)
    if len(arr) < 2:
        return 0.0
    dist = squareform(pdist(arr))
    np.fill_diagonal(dist, np.inf)
    nearest = dist.min(axis=1)
    mean = nearest.mean()
    if mean == 0.0:
        return 0.0
    return float(nearest.std() / mean)


def members(log: EpisodeLog, t: int) -> np.ndarray:
    """Indices of the member agents at snapshot ``t`` (possibly empty)."""
    row = log.statuses[t]
    active = np.flatnonzero(row == _ACTIVE)
    if len(active):
        return active
    return np.flatnonzero(row != _DEAD)


def gamma_series(log: EpisodeLog) -> List[Tuple[int, float]]:
    """``(step, gamma)`` for every step that has members."""
    out = []
    for t in range(log.n_snapshots):
        idx = members(log, t)
        if len(idx):
            out.append((t, gamma_t(log.positions[t, idx])))
    return out


def uniformity_series(log: EpisodeLog) -> List[Tuple[int, float]]:
    """``(step, uniformity)`` for every step that has members."""
    out = []
    for t in range(log.n_snapshots):
        idx = members(log, t)
        if len(idx):
            out.append((t, uniformity_t(log.positions[t, idx])))
    return out


class _HeadingStep(NamedTuple):
    step: int
    delta: float
    thetas: List[float]


def _heading_steps(log: EpisodeLog) -> List[_HeadingStep]:
    steps = []
    for t in range(log.n_snapshots):
        active = np.flatnonzero(log.statuses[t] == _ACTIVE)
        vel = log.velocities[t, active]
        moving = np.count_nonzero(np.hypot(vel[:, 0], vel[:, 1]) > 0) if len(active) else 0
        if moving < 2:
            continue
        try:
            delta, thetas = heading_deviation(vel)
        except DegenerateInputError:
            continue
        steps.append(_HeadingStep(t, delta, thetas))
    return steps


def anisotropy_series(log: EpisodeLog) -> List[Tuple[int, float]]:
    """Per-step population stddev (degrees) of the headings about their mean."""
    return [
        (h.step, math.sqrt(math.fsum((th - h.delta) ** 2 for th in h.thetas) / len(h.thetas)))
        for h in _heading_steps(log)
    ]


def anisotropy(log: EpisodeLog) -> float:
    """
    Time-mean of the per-step heading spread.

    Raises:
        DegenerateInputError: If no step has two or more moving active agents
    """
    series = anisotropy_series(log)
    if not series:
        raise DegenerateInputError("no step with a computable heading")
    return math.fsum(v for _, v in series) / len(series)


def anisotropy_variance(log: EpisodeLog) -> float:
    """Population variance of the per-step heading spread (0 without valid steps)."""
    series = anisotropy_series(log)
    if not series:
        return 0.0
    return float(np.var([v for _, v in series]))


class AverageTime(NamedTuple):
    seconds: float
    zero_arrivals: bool


def average_time(log: EpisodeLog) -> AverageTime:
    """
    Mean arrival time of the agents that arrived; every agent starts at 0.

    With no arrivals the worst case ``max_steps * dt`` is returned and
    ``zero_arrivals`` is set.
    """
    arrivals = log.arrive_steps()
    if not arrivals:
        return AverageTime(log.max_steps * log.dt, True)
    return AverageTime(math.fsum(s * log.dt for s in arrivals.values()) / len(arrivals), False)


def death_rate(log: EpisodeLog) -> float:
    if log.n_total < 1:
        raise DegenerateInputError("death rate of an empty swarm")
    return log.death_count() / log.n_total


@dataclass(frozen=True)
class FitnessFactors:
    """
    The five factors of the composite fitness.

    Attributes:
        average_time: Mean arrival time (seconds)
        death_rate: Dead over total
        centroid_distance: Mean member distance to the centroid over all
            member-steps
        gamma_mean_deviation: Mean signed deviation of the gamma series from
            its mean (literal form)
        gamma_variance: Variance of the gamma series (robust form)
        heading_dispersion: Sum of squared heading deviations, averaged
            over every snapshot; a snapshot with fewer than two moving
            active agents adds nothing but still counts
    """

    average_time: float
    death_rate: float
    centroid_distance: float
    gamma_mean_deviation: float
    gamma_variance: float
    heading_dispersion: float


def fitness_factors(log: EpisodeLog) -> FitnessFactors:
    if log.n_snapshots == 0:
        raise DegenerateInputError("fitness of a log without steps")

    distance_sum = 0.0
    member_count = 0
    gammas = []
    for t in range(log.n_snapshots):
        idx = members(log, t)
        if not len(idx):
            continue
        pts = log.positions[t, idx]
        c = pts.mean(axis=0)
        d = np.hypot(pts[:, 0] - c[0], pts[:, 1] - c[1])
        distance_sum += float(d.sum())
        member_count += len(idx)
        gammas.append(float(d.mean()))

    if gammas:
        g = np.asarray(gammas)
        deviation = float((g - g.mean()).sum() / len(g))
        variance = float(np.var(g))
    else:
        deviation = variance = 0.0

    headings = _heading_steps(log)
    dispersion = (
        math.fsum(math.fsum((th - h.delta) ** 2 for th in h.thetas) for h in headings)
        / log.n_snapshots
    )

    return FitnessFactors(
        average_time=average_time(log).seconds,
        death_rate=death_rate(log),
        centroid_distance=distance_sum / member_count if member_count else 0.0,
        gamma_mean_deviation=deviation,
        gamma_variance=variance,
        heading_dispersion=dispersion,
    )


def combine_factors(factors: FitnessFactors, cfg: FitnessConfig) -> float:
    """Apply the literal or robust product to precomputed factors."""
    if cfg.variant is FitnessVariant.LITERAL:
        return (
            cfg.alpha
            * factors.average_time
            * factors.death_rate
            * factors.centroid_distance
            * factors.gamma_mean_deviation
            * factors.heading_dispersion
        )
    eps = cfg.epsilon
    return (
        cfg.alpha
        * (eps + factors.average_time)
        * (eps + factors.death_rate)
        * (eps + factors.centroid_distance)
        * (eps + factors.gamma_variance)
        * (eps + factors.heading_dispersion)
    )


def fitness(log: EpisodeLog, cfg: FitnessConfig = FitnessConfig()) -> float:
    """
    Composite fitness of an episode; smaller is better.

    The literal form is the plain five-factor product and is exactly 0 for
    any episode without deaths. The robust form smooths every factor by
    ``epsilon`` and uses the gamma variance for stability, so it is strictly
    positive.
    """
    return combine_factors(fitness_factors(log), cfg)


def metrics_report(log: EpisodeLog, cfg: FitnessConfig = FitnessConfig()) -> MetricsReport:
    """Full metric vector of one episode."""
    gammas = [g for _, g in gamma_series(log)]
    uniform = [u for _, u in uniformity_series(log)]
    spread = [s for _, s in anisotropy_series(log)]
    avg = average_time(log)
    return MetricsReport(
        aggregation=math.fsum(gammas) / len(gammas) if gammas else 0.0,
        anisotropy=math.fsum(spread) / len(spread) if spread else 0.0,
        average_time=avg.seconds,
        uniformity=math.fsum(uniform) / len(uniform) if uniform else 0.0,
        death_rate=death_rate(log),
        stability_variance=stability_variance(gammas) if gammas else 0.0,
        fitness=fitness(log, cfg),
        zero_arrivals=avg.zero_arrivals,
    )


__all__ = [
    "AverageTime",
    "FitnessFactors",
    "anisotropy",
    "anisotropy_series",
    "anisotropy_variance",
    "average_time",
    "centroid",
    "combine_factors",
    "death_rate",
    "fitness",
    "fitness_factors",
    "gamma_series",
    "gamma_t",
    "heading_deviation",
    "members",
    "metrics_report",
    "stability_variance",
    "uniformity_series",
    "uniformity_t",
]
