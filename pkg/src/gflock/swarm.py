"""
Agent state, zone partition, and the generalized velocity update.

Every function here is pure. Neighbour sums are correctly rounded, so the
result does not depend on how agents are numbered.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, List, NamedTuple, Optional, Sequence, Tuple

from .config import ZoneConfig
from .exceptions import ContractError, DegenerateInputError
from .geometry import (
    ZERO,
    Obstacle,
    Vec2,
    lower_bound_distance,
    nearest_obstacle_point,
    vec_sum,
)
from .rules import Context, RuleWeights

if TYPE_CHECKING:
    from .scenario import TargetArea


class AgentStatus(Enum):
    """Lifecycle of an agent. ARRIVED and DEAD are absorbing."""

    ACTIVE = "active"
    ARRIVED = "arrived"
    DEAD = "dead"


@dataclass(frozen=True)
class AgentState:
    """Position, velocity and status of one agent."""

    id: int
    pos: Vec2
    vel: Vec2
    status: AgentStatus = AgentStatus.ACTIVE
    arrive_step: Optional[int] = None

    @property
    def is_active(self) -> bool:
        return self.status is AgentStatus.ACTIVE

    def arrived(self, step: int) -> "AgentState":
        if not self.is_active:
            raise ContractError(f"agent {self.id} is {self.status.value}, cannot arrive")
        return replace(self, status=AgentStatus.ARRIVED, arrive_step=step)

    def died(self) -> "AgentState":
        if not self.is_active:
            raise ContractError(f"agent {self.id} is {self.status.value}, cannot die")
        return replace(self, status=AgentStatus.DEAD)


class Neighbor(NamedTuple):
    """An agent seen from the focal agent."""

    agent_id: int
    pos: Vec2
    vel: Vec2
    dist: float


class ObstacleContact(NamedTuple):
    """Nearest point of one sensed obstacle."""

    point: Vec2
    dist: float


@dataclass(frozen=True)
class NeighborhoodPartition:
    """Zone membership of the focal agent's surroundings, each list sorted by id."""

    rep: Tuple[Neighbor, ...] = ()
    ali: Tuple[Neighbor, ...] = ()
    att: Tuple[Neighbor, ...] = ()
    obs: Tuple[ObstacleContact, ...] = ()

    @property
    def rep_ids(self) -> List[int]:
        return [n.agent_id for n in self.rep]

    @property
    def ali_ids(self) -> List[int]:
        return [n.agent_id for n in self.ali]

    @property
    def att_ids(self) -> List[int]:
        return [n.agent_id for n in self.att]

    def is_empty(self) -> bool:
        return not (self.rep or self.ali or self.att or self.obs)

    def moving_alignment(self) -> "NeighborhoodPartition":
        """Drop alignment neighbours that are standing still; they carry no heading."""
        moving = tuple(n for n in self.ali if n.vel.x != 0.0 or n.vel.y != 0.0)
        if len(moving) == len(self.ali):
            return self
        return replace(self, ali=moving)


def partition_neighbors(
    focal: AgentState,
    others: Sequence[AgentState],
    obstacles: Sequence[Obstacle],
    zones: ZoneConfig,
) -> NeighborhoodPartition:
    """
    Sort the focal agent's surroundings into repulsion, alignment, attraction
    and obstacle zones.

    Zones are half-open: ``[0,R0)``, ``[R0,R1)``, ``[R1,R2)``. Only active
    agents other than the focal one are considered. Obstacle contacts are
    listed in obstacle order.

    Raises:
        ConfigError: If ``zones`` is invalid
        ContractError: If the focal agent is not active
    """
    zones.validate()
    if not focal.is_active:
        raise ContractError(f"focal agent {focal.id} is {focal.status.value}")

    rep: List[Neighbor] = []
    ali: List[Neighbor] = []
    att: List[Neighbor] = []
    p = focal.pos
    for other in sorted(others, key=lambda a: a.id):
        if other.id == focal.id or not other.is_active:
            continue
        r = p.distance_to(other.pos)
        if r >= zones.R2:
            continue
        neighbor = Neighbor(other.id, other.pos, other.vel, r)
        if r < zones.R0:
            rep.append(neighbor)
        elif r < zones.R1:
            ali.append(neighbor)
        else:
            att.append(neighbor)

    obs: List[ObstacleContact] = []
    for obstacle in obstacles:
        if lower_bound_distance(p, obstacle) >= zones.R3:
            continue
        point, dist = nearest_obstacle_point(p, obstacle)
        if dist < zones.R3:
            obs.append(ObstacleContact(point, dist))

    return NeighborhoodPartition(tuple(rep), tuple(ali), tuple(att), tuple(obs))


def classify_context(
    partition: NeighborhoodPartition,
    focal: AgentState,
    target: "TargetArea",
    d_tar: float,
) -> Context:
    """Pick the rule context from obstacle sensing and target proximity."""
    obstacle_near = bool(partition.obs)
    target_near = focal.pos.distance_to(target.center) < d_tar
    if obstacle_near and target_near:
        return Context.OBSTACLE_AND_TARGET
    if obstacle_near:
        return Context.OBSTACLE_NEAR
    if target_near:
        return Context.TARGET_NEAR
    return Context.FREE_FLIGHT


def velocity_update(
    focal: AgentState,
    partition: NeighborhoodPartition,
    weights: RuleWeights,
    target: Vec2,
    zones: ZoneConfig,
) -> Vec2:
    """
    Candidate next velocity of the focal agent.

    Sum of weighted repulsion, alignment, attraction, obstacle-avoidance and
    target terms plus the current velocity. Coincident points (zero distance)
    contribute nothing to the term they belong to, and an empty alignment
    zone contributes the zero vector.

    Raises:
        DegenerateInputError: If an alignment neighbour has zero speed
    """
    p = focal.pos

    rep = vec_sum(
        (p - n.pos) * ((zones.R0 - n.dist) / n.dist) for n in partition.rep if n.dist > 0.0
    )

    ali = ZERO
    if partition.ali:
        headings: List[Vec2] = []
        for n in partition.ali:
            speed = n.vel.norm()
            if speed == 0.0:
                raise DegenerateInputError(
                    f"alignment neighbour {n.agent_id} has zero speed", context=str(n.vel)
                )
            headings.append(n.vel / speed)
        ali = vec_sum(headings) / len(headings)

    att = vec_sum(
        (n.pos - p) * ((zones.R2 - n.dist) / n.dist) for n in partition.att if n.dist > 0.0
    )

    obs = vec_sum(
        (p - c.point) * ((zones.R3 - c.dist) / c.dist) for c in partition.obs if c.dist > 0.0
    )

    to_target = target - p
    r_tar = to_target.norm()
    tar = to_target / r_tar if r_tar > 0.0 else ZERO

    return Vec2(
        weights.a * rep.x
        + weights.b * ali.x
        + weights.c * att.x
        + weights.d * obs.x
        + weights.e * tar.x
        + focal.vel.x,
        weights.a * rep.y
        + weights.b * ali.y
        + weights.c * att.y
        + weights.d * obs.y
        + weights.e * tar.y
        + focal.vel.y,
    )


def clamp_speed(v: Vec2, v_max: float) -> Vec2:
    """Rescale ``v`` to magnitude ``v_max`` if it is faster; direction is kept."""
    speed = v.norm()
    if speed <= v_max:
        return v
    scaled = v * (v_max / speed)
    # rounding can leave the rescaled norm a hair above v_max
    while scaled.norm() > v_max:
        scaled = scaled * (1.0 - 1e-15)
    return scaled if scaled.is_finite() else ZERO


__all__ = [
    "AgentState",
    "AgentStatus",
    "Neighbor",
    "NeighborhoodPartition",
    "ObstacleContact",
    "classify_context",
    "clamp_speed",
    "partition_neighbors",
    "velocity_update",
]
