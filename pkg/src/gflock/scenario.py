"""
Scenario construction: bounds, obstacles, target area, spawn layout, and
time-step parameters.

Scenarios come from JSON documents or from the builtin catalogue
(``gauntlet``, ``open_field``). Every constructor validates, so a Scenario
that exists is a Scenario that can be simulated.
"""

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

from .config import SimFlags, ZoneConfig
from .exceptions import ConfigError, ParseError
from .geometry import Circle, Obstacle, Polygon, Vec2, rectangle
from .validation import require_keys, require_number, require_object, require_point

# Bumped whenever a builtin layout changes, so stored results stay attributable.
BUILTIN_VERSION = 1


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, edges inclusive."""

    min: Vec2
    max: Vec2

    def validate(self, path: str) -> None:
        if not (self.min.x < self.max.x and self.min.y < self.max.y):
            raise ConfigError("rectangle min must be below and left of max", path)

    def contains(self, p: Vec2) -> bool:
        return self.min.x <= p.x <= self.max.x and self.min.y <= p.y <= self.max.y

    def contains_rect(self, other: "Rect") -> bool:
        return self.contains(other.min) and self.contains(other.max)

    @property
    def center(self) -> Vec2:
        return Vec2((self.min.x + self.max.x) / 2.0, (self.min.y + self.max.y) / 2.0)

    def as_polygon(self) -> Polygon:
        return rectangle(self.min.x, self.min.y, self.max.x, self.max.y)

    def to_dict(self) -> Dict[str, List[float]]:
        return {"min": list(self.min), "max": list(self.max)}


@dataclass(frozen=True)
class TargetArea:
    """Closed disk the swarm navigates to."""

    center: Vec2
    radius: float

    def validate(self) -> None:
        if not self.radius > 0:
            raise ConfigError("target radius must be > 0", "target.radius", repr(self.radius))

    def to_dict(self) -> Dict[str, Any]:
        return {"center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Scenario:
    """
    A complete, validated test scenery.

    ``groups`` labels each obstacle (same length as ``obstacles``); the
    builtin gauntlet uses ``tunnel``, ``non_convex`` and ``convex``.
    """

    name: str
    bounds: Rect
    obstacles: Tuple[Obstacle, ...]
    target: TargetArea
    spawn: Rect
    n_agents: int
    zones: ZoneConfig
    v_max: float = 0.9
    dt: float = 1.0
    max_steps: int = 200
    collision_radius: float = 1.0
    d_tar: float = 10.0
    groups: Tuple[str, ...] = ()
    velocity_noise: float = 0.0
    flags: SimFlags = SimFlags.NONE

    def validate(self) -> None:
        """
        Check every scenario invariant.

        Raises:
            ConfigError: Naming the violated invariant and field
        """
        self.bounds.validate("bounds")
        self.spawn.validate("spawn")
        self.zones.validate()
        self.target.validate()
        if self.groups and len(self.groups) != len(self.obstacles):
            raise ConfigError("one group label per obstacle", "obstacles")
        if not self.bounds.contains_rect(self.spawn):
            raise ConfigError("spawn rectangle must lie inside bounds", "spawn")
        if not self.bounds.contains(self.target.center):
            raise ConfigError("target must lie inside bounds", "target.center")
        for i, obstacle in enumerate(self.obstacles):
            if _rect_intersects(self.spawn, obstacle):
                raise ConfigError("spawn rectangle must not intersect any obstacle", f"obstacles[{i}]")
        if self.n_agents < 1:
            raise ConfigError("agent count must be >= 1", "spawn.agents", repr(self.n_agents))
        if not self.dt > 0:
            raise ConfigError("dt must be > 0", "dt", repr(self.dt))
        if self.max_steps < 1:
            raise ConfigError("max_steps must be >= 1", "max_steps", repr(self.max_steps))
        if not self.collision_radius > 0:
            raise ConfigError("collision_radius must be > 0", "collision_radius")
        if not self.v_max > 0:
            raise ConfigError("v_max must be > 0", "v_max", repr(self.v_max))
        if self.d_tar < 0:
            raise ConfigError("d_tar must be >= 0", "d_tar", repr(self.d_tar))
        if self.velocity_noise < 0:
            raise ConfigError("velocity_noise must be >= 0", "velocity_noise")

    def with_overrides(
        self, n_agents: Optional[int] = None, max_steps: Optional[int] = None
    ) -> "Scenario":
        """Copy with a different agent count and/or step limit, re-validated."""
        changed = self
        if n_agents is not None:
            changed = replace(changed, n_agents=n_agents)
        if max_steps is not None:
            changed = replace(changed, max_steps=max_steps)
        changed.validate()
        return changed

    def group_order(self) -> List[str]:
        """Distinct group labels in order of first appearance."""
        seen: List[str] = []
        for label in self.groups:
            if label not in seen:
                seen.append(label)
        return seen

    def to_dict(self) -> Dict[str, Any]:
        obstacles = []
        for i, obstacle in enumerate(self.obstacles):
            entry = obstacle.to_dict()
            if self.groups:
                entry["group"] = self.groups[i]
            obstacles.append(entry)
        return {
            "name": self.name,
            "bounds": self.bounds.to_dict(),
            "obstacles": obstacles,
            "target": self.target.to_dict(),
            "spawn": {**self.spawn.to_dict(), "agents": self.n_agents},
            "zones": self.zones.to_dict(),
            "v_max": self.v_max,
            "dt": self.dt,
            "max_steps": self.max_steps,
            "collision_radius": self.collision_radius,
            "d_tar": self.d_tar,
            "velocity_noise": self.velocity_noise,
            "noise": bool(self.flags & SimFlags.VELOCITY_NOISE),
        }


def _segments_cross(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool:
    def orient(p: Vec2, q: Vec2, r: Vec2) -> float:
        return (q - p).cross(r - p)

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if ((o1 > 0) != (o2 > 0)) and ((o3 > 0) != (o4 > 0)) and o1 and o2 and o3 and o4:
        return True

    def on_segment(p: Vec2, q: Vec2, r: Vec2) -> bool:
        return min(p.x, q.x) <= r.x <= max(p.x, q.x) and min(p.y, q.y) <= r.y <= max(p.y, q.y)

    return (
        (o1 == 0 and on_segment(a, b, c))
        or (o2 == 0 and on_segment(a, b, d))
        or (o3 == 0 and on_segment(c, d, a))
        or (o4 == 0 and on_segment(c, d, b))
    )


def _rect_intersects(rect: Rect, obstacle: Obstacle) -> bool:
    if isinstance(obstacle, Circle):
        nearest = Vec2(
            min(max(obstacle.center.x, rect.min.x), rect.max.x),
            min(max(obstacle.center.y, rect.min.y), rect.max.y),
        )
        return nearest.distance_to(obstacle.center) < obstacle.radius

    box = rect.as_polygon()
    if any(rect.contains(v) for v in obstacle.vertices):
        return True
    if any(obstacle.contains(v) for v in box.vertices):
        return True
    return any(
        _segments_cross(a, b, c, d) for a, b in box.edges() for c, d in obstacle.edges()
    )


def regular_polygon(center: Vec2, radius: float, sides: int, phase: float = math.pi / 2) -> Polygon:
    """Convex regular polygon, counter-clockwise from angle ``phase``."""
    step = 2.0 * math.pi / sides
    return Polygon(
        tuple(
            Vec2(center.x + radius * math.cos(phase + k * step), center.y + radius * math.sin(phase + k * step))
            for k in range(sides)
        )
    )


def gauntlet() -> Scenario:
    """
    Tunnel, then a U-shaped pocket opening toward the swarm, then a convex
    pentagon, laid out along the spawn-to-target axis of a 100 x 60 world.
    """
    tunnel_lower = rectangle(28.0, 23.0, 42.0, 27.0)
    tunnel_upper = rectangle(28.0, 33.0, 42.0, 37.0)
    pocket = Polygon(
        (
            Vec2(52.0, 28.0),
            Vec2(62.0, 28.0),
            Vec2(62.0, 42.0),
            Vec2(52.0, 42.0),
            Vec2(52.0, 40.0),
            Vec2(60.0, 40.0),
            Vec2(60.0, 30.0),
            Vec2(52.0, 30.0),
        )
    )
    pentagon = regular_polygon(Vec2(76.0, 27.0), 4.5, 5)
    scenario = Scenario(
        name="gauntlet",
        bounds=Rect(Vec2(0.0, 0.0), Vec2(100.0, 60.0)),
        obstacles=(tunnel_lower, tunnel_upper, pocket, pentagon),
        groups=("tunnel", "tunnel", "non_convex", "convex"),
        target=TargetArea(Vec2(92.0, 30.0), 4.0),
        spawn=Rect(Vec2(4.0, 25.0), Vec2(14.0, 35.0)),
        n_agents=20,
        zones=ZoneConfig(R0=1.5, R1=3.5, R2=6.0, R3=4.0),
    )
    scenario.validate()
    return scenario


def open_field() -> Scenario:
    """Obstacle-free 60 x 60 world with the target straight ahead of the spawn."""
    scenario = Scenario(
        name="open_field",
        bounds=Rect(Vec2(0.0, 0.0), Vec2(60.0, 60.0)),
        obstacles=(),
        target=TargetArea(Vec2(50.0, 30.0), 3.0),
        spawn=Rect(Vec2(5.0, 25.0), Vec2(15.0, 35.0)),
        n_agents=20,
        zones=ZoneConfig(R0=1.5, R1=3.5, R2=6.0, R3=4.0),
    )
    scenario.validate()
    return scenario


BUILTIN_SCENARIOS: Dict[str, Callable[[], Scenario]] = {
    "gauntlet": gauntlet,
    "open_field": open_field,
}

_SCALAR_FIELDS = ("v_max", "dt", "collision_radius", "d_tar", "velocity_noise")


def _parse_rect(raw: Any, path: str) -> Rect:
    obj = require_object(raw, path)
    require_keys(obj, ("min", "max"), path)
    return Rect(require_point(obj["min"], f"{path}.min"), require_point(obj["max"], f"{path}.max"))


def _parse_obstacle(raw: Any, path: str) -> Obstacle:
    obj = require_object(raw, path)
    require_keys(obj, ("type",), path)
    kind = obj["type"]
    try:
        if kind == "circle":
            require_keys(obj, ("center", "radius"), path)
            return Circle(
                require_point(obj["center"], f"{path}.center"),
                require_number(obj["radius"], f"{path}.radius"),
            )
        if kind == "polygon":
            require_keys(obj, ("vertices",), path)
            raw_vertices = obj["vertices"]
            if not isinstance(raw_vertices, list):
                raise ParseError("expected an array of points", f"{path}.vertices")
            return Polygon(
                tuple(
                    require_point(v, f"{path}.vertices[{k}]") for k, v in enumerate(raw_vertices)
                )
            )
    except ConfigError as e:
        if e.field_path:
            raise
        raise ConfigError(str(e), path) from e
    raise ParseError("obstacle type must be 'circle' or 'polygon'", f"{path}.type", repr(kind))


def _parse_int(raw: Any, path: str) -> int:
    value = require_number(raw, path)
    if value != int(value):
        raise ParseError("expected an integer", path, repr(raw))
    return int(value)


def build_scenario(document: Any) -> Scenario:
    """
    Build and validate a Scenario from a parsed JSON document.

    A document naming ``"builtin"`` starts from that catalogue entry; the
    keys ``agents`` and ``max_steps`` may then override it.

    Raises:
        ParseError: Malformed document, with the field path
        ConfigError: A constraint violation naming the invariant
    """
    doc = require_object(document, "scenario")

    if "builtin" in doc:
        name = doc["builtin"]
        if name not in BUILTIN_SCENARIOS:
            raise ParseError(
                f"unknown builtin scenario (known: {', '.join(sorted(BUILTIN_SCENARIOS))})",
                "builtin",
                repr(name),
            )
        scenario = BUILTIN_SCENARIOS[name]()
        agents = _parse_int(doc["agents"], "agents") if "agents" in doc else None
        max_steps = _parse_int(doc["max_steps"], "max_steps") if "max_steps" in doc else None
        return scenario.with_overrides(n_agents=agents, max_steps=max_steps)

    require_keys(doc, ("bounds", "target", "spawn", "zones"), "scenario")
    raw_obstacles = doc.get("obstacles", [])
    if not isinstance(raw_obstacles, list):
        raise ParseError("expected an array", "obstacles")
    obstacles = tuple(_parse_obstacle(o, f"obstacles[{i}]") for i, o in enumerate(raw_obstacles))
    groups: Tuple[str, ...] = ()
    if any(isinstance(o, dict) and "group" in o for o in raw_obstacles):
        groups = tuple(str(o.get("group", "")) for o in raw_obstacles)

    target_obj = require_object(doc["target"], "target")
    require_keys(target_obj, ("center", "radius"), "target")
    target = TargetArea(
        require_point(target_obj["center"], "target.center"),
        require_number(target_obj["radius"], "target.radius"),
    )

    spawn_obj = require_object(doc["spawn"], "spawn")
    require_keys(spawn_obj, ("agents",), "spawn")
    spawn = _parse_rect(spawn_obj, "spawn")
    n_agents = _parse_int(spawn_obj["agents"], "spawn.agents")

    zones_obj = require_object(doc["zones"], "zones")
    require_keys(zones_obj, ("R0", "R1", "R2", "R3"), "zones")
    zones = ZoneConfig(**{k: require_number(zones_obj[k], f"zones.{k}") for k in ("R0", "R1", "R2", "R3")})

    scalars = {k: require_number(doc[k], k) for k in _SCALAR_FIELDS if k in doc}
    if "max_steps" in doc:
        scalars["max_steps"] = _parse_int(doc["max_steps"], "max_steps")
    flags = SimFlags.VELOCITY_NOISE if doc.get("noise", False) is True else SimFlags.NONE

    scenario = Scenario(
        name=str(doc.get("name", "custom")),
        bounds=_parse_rect(doc["bounds"], "bounds"),
        obstacles=obstacles,
        groups=groups,
        target=target,
        spawn=spawn,
        n_agents=n_agents,
        zones=zones,
        flags=flags,
        **scalars,  # type: ignore[arg-type]
    )
    scenario.validate()
    return scenario


def load_scenario(source: Union[str, Path]) -> Scenario:
    """Load a scenario from a JSON file path or a builtin name."""
    if isinstance(source, str) and source in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[source]()
    path = Path(source)
    if not path.exists():
        raise ConfigError("scenario file not found", "scenario", str(path))
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}", "scenario", str(path)) from e
    return build_scenario(document)


def describe(scenario: Scenario) -> str:
    """One-line human summary."""
    groups: Sequence[str] = scenario.group_order() or ["no obstacles"]
    return (
        f"{scenario.name}: {scenario.n_agents} agents, {len(scenario.obstacles)} obstacles "
        f"({', '.join(groups)}), {scenario.max_steps} steps of {scenario.dt}s"
    )


__all__ = [
    "BUILTIN_SCENARIOS",
    "BUILTIN_VERSION",
    "Rect",
    "Scenario",
    "TargetArea",
    "build_scenario",
    "describe",
    "gauntlet",
    "load_scenario",
    "open_field",
    "regular_polygon",
]
