"""
Synchronous time-stepping of a swarm through a scenario.

Every active agent's new velocity is computed from the previous snapshot,
then all agents move, then death and arrival are checked (death first).
Arrived and dead agents are frozen in place for the rest of the episode.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from .config import SimFlags
from .exceptions import ContractError, InsideObstacleError
from .geometry import Vec2, lower_bound_distance, nearest_obstacle_point
from .rules import RuleSet
from .scenario import Scenario, TargetArea
from .streams import NOISE, SPAWN, named_stream
from .swarm import (
    AgentState,
    AgentStatus,
    classify_context,
    clamp_speed,
    partition_neighbors,
    velocity_update,
)

logger = logging.getLogger(__name__)

STATUS_CODES: Dict[AgentStatus, int] = {
    AgentStatus.ACTIVE: 0,
    AgentStatus.ARRIVED: 1,
    AgentStatus.DEAD: 2,
}
CODE_STATUS: Dict[int, AgentStatus] = {code: status for status, code in STATUS_CODES.items()}


class EventKind(Enum):
    ARRIVED = "arrived"
    DIED = "died"


class Event(NamedTuple):
    step: int
    agent_id: int
    kind: EventKind


@dataclass(frozen=True)
class WorldState:
    """Agents (sorted by id) after ``step`` steps, plus the events of that step."""

    scenario: Scenario
    agents: Tuple[AgentState, ...]
    step: int = 0
    last_events: Tuple[Event, ...] = ()

    def count(self, status: AgentStatus) -> int:
        return sum(1 for a in self.agents if a.status is status)

    @property
    def any_active(self) -> bool:
        return any(a.is_active for a in self.agents)


@dataclass(frozen=True, eq=False)
class EpisodeLog:
    """
    Complete record of one episode.

    ``positions`` and ``velocities`` have shape ``(T+1, N, 2)`` and
    ``statuses`` shape ``(T+1, N)`` holding ``STATUS_CODES``. Agent ``j`` is
    column ``j``. Everything the metrics need is here; ``scenario`` and
    ``ruleset`` are kept for provenance and may be absent on logs rebuilt
    from CSV.
    """

    positions: np.ndarray
    velocities: np.ndarray
    statuses: np.ndarray
    events: Tuple[Event, ...]
    dt: float
    max_steps: int
    seed: Optional[int] = None
    scenario: Optional[Scenario] = field(default=None, compare=False)
    ruleset: Optional[RuleSet] = field(default=None, compare=False)

    @property
    def n_snapshots(self) -> int:
        return int(self.positions.shape[0])

    @property
    def n_total(self) -> int:
        return int(self.positions.shape[1])

    def status_counts(self, t: int) -> Dict[AgentStatus, int]:
        row = self.statuses[t]
        return {status: int(np.count_nonzero(row == code)) for status, code in STATUS_CODES.items()}

    def arrive_steps(self) -> Dict[int, int]:
        return {e.agent_id: e.step for e in self.events if e.kind is EventKind.ARRIVED}

    def death_count(self) -> int:
        return sum(1 for e in self.events if e.kind is EventKind.DIED)

    def digest(self) -> str:
        """sha256 over the arrays and the event list."""
        h = hashlib.sha256()
        for array in (self.positions, self.velocities, self.statuses):
            h.update(np.ascontiguousarray(array).tobytes())
        for e in self.events:
            h.update(f"{e.step},{e.agent_id},{e.kind.value};".encode("ascii"))
        return h.hexdigest()


def check_death(agent: AgentState, scenario: Scenario) -> bool:
    """
    True iff the agent left the bounds or is closer than ``collision_radius``
    to an obstacle. The bounds edge itself is alive.
    """
    if not agent.is_active:
        raise ContractError(f"agent {agent.id} is {agent.status.value}")
    if not scenario.bounds.contains(agent.pos):
        return True
    for obstacle in scenario.obstacles:
        if lower_bound_distance(agent.pos, obstacle) >= scenario.collision_radius:
            continue
        try:
            _, dist = nearest_obstacle_point(agent.pos, obstacle)
        except InsideObstacleError:
            return True
        if dist < scenario.collision_radius:
            return True
    return False


def check_arrival(agent: AgentState, target: TargetArea) -> bool:
    """True iff the agent is on the closed target disk."""
    if not agent.is_active:
        raise ContractError(f"agent {agent.id} is {agent.status.value}")
    return agent.pos.distance_to(target.center) <= target.radius


def _settle(agent: AgentState, scenario: Scenario, t: int, events: List[Event]) -> AgentState:
    if check_death(agent, scenario):
        events.append(Event(t, agent.id, EventKind.DIED))
        return agent.died()
    if check_arrival(agent, scenario.target):
        events.append(Event(t, agent.id, EventKind.ARRIVED))
        return agent.arrived(t)
    return agent


def spawn(scenario: Scenario, seed: int) -> WorldState:
    """
    Place ``n_agents`` uniformly in the spawn rectangle with zero velocity and
    resolve step-0 deaths and arrivals.
    """
    rng = named_stream(seed, SPAWN)
    lo = (scenario.spawn.min.x, scenario.spawn.min.y)
    hi = (scenario.spawn.max.x, scenario.spawn.max.y)
    coords = rng.uniform(lo, hi, size=(scenario.n_agents, 2))
    events: List[Event] = []
    agents = tuple(
        _settle(
            AgentState(i, Vec2(float(coords[i, 0]), float(coords[i, 1])), Vec2(0.0, 0.0)),
            scenario,
            0,
            events,
        )
        for i in range(scenario.n_agents)
    )
    return WorldState(scenario, agents, 0, tuple(events))


def step(
    state: WorldState, ruleset: RuleSet, noise: Optional[np.random.Generator] = None
) -> WorldState:
    """
    Advance one synchronous step.

    ``noise`` is consulted only when the scenario enables
    ``SimFlags.VELOCITY_NOISE``; draws happen in ascending agent id.

    Raises:
        ContractError: If the episode already reached ``max_steps``
    """
    scenario = state.scenario
    if state.step >= scenario.max_steps:
        raise ContractError(
            f"episode already at max_steps={scenario.max_steps}", context=str(state.step)
        )
    noisy = bool(scenario.flags & SimFlags.VELOCITY_NOISE) and scenario.velocity_noise > 0
    if noisy and noise is None:
        raise ContractError("velocity noise is enabled but no noise stream was given")

    t = state.step + 1
    moved: List[AgentState] = []
    for agent in state.agents:
        if not agent.is_active:
            moved.append(agent)
            continue
        try:
            partition = partition_neighbors(
                agent, state.agents, scenario.obstacles, scenario.zones
            ).moving_alignment()
        except InsideObstacleError:
            # check_death below turns this into a death
            moved.append(agent)
            continue
        context = classify_context(partition, agent, scenario.target, scenario.d_tar)
        v = velocity_update(
            agent, partition, ruleset.for_context(context), scenario.target.center, scenario.zones
        )
        if noisy:
            assert noise is not None
            dx, dy = noise.normal(0.0, scenario.velocity_noise, size=2)
            v = Vec2(v.x + float(dx), v.y + float(dy))
        v = clamp_speed(v, scenario.v_max)
        moved.append(AgentState(agent.id, agent.pos + v * scenario.dt, v, agent.status))

    events: List[Event] = []
    settled = tuple(a if not a.is_active else _settle(a, scenario, t, events) for a in moved)
    return WorldState(scenario, settled, t, tuple(events))


def _snapshot(state: WorldState) -> Tuple[List[Tuple[float, float]], List[Tuple[float, float]], List[int]]:
    return (
        [(a.pos.x, a.pos.y) for a in state.agents],
        [(a.vel.x, a.vel.y) for a in state.agents],
        [STATUS_CODES[a.status] for a in state.agents],
    )


def run_episode(scenario: Scenario, ruleset: RuleSet, seed: int) -> EpisodeLog:
    """
    Simulate one seeded episode until nobody is active or ``max_steps`` is hit.

    Identical ``(scenario, ruleset, seed)`` give bit-identical logs.
    """
    state = spawn(scenario, seed)
    noise = named_stream(seed, NOISE) if scenario.flags & SimFlags.VELOCITY_NOISE else None

    positions, velocities, statuses = [], [], []
    events: List[Event] = list(state.last_events)
    while True:
        p, v, s = _snapshot(state)
        positions.append(p)
        velocities.append(v)
        statuses.append(s)
        if not state.any_active or state.step >= scenario.max_steps:
            break
        state = step(state, ruleset, noise)
        events.extend(state.last_events)

    log = EpisodeLog(
        positions=np.asarray(positions, dtype=np.float64),
        velocities=np.asarray(velocities, dtype=np.float64),
        statuses=np.asarray(statuses, dtype=np.int8),
        events=tuple(events),
        dt=scenario.dt,
        max_steps=scenario.max_steps,
        seed=seed,
        scenario=scenario,
        ruleset=ruleset,
    )
    logger.debug(
        "episode seed=%d on %s: %d steps, %d arrived, %d died",
        seed,
        scenario.name,
        state.step,
        state.count(AgentStatus.ARRIVED),
        state.count(AgentStatus.DEAD),
    )
    return log


__all__ = [
    "CODE_STATUS",
    "STATUS_CODES",
    "EpisodeLog",
    "Event",
    "EventKind",
    "WorldState",
    "check_arrival",
    "check_death",
    "run_episode",
    "spawn",
    "step",
]
