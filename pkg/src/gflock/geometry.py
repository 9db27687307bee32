"""Planar geometry for agents and obstacles."""

import math
from dataclasses import dataclass, field
from typing import Iterable, List, NamedTuple, Sequence, Tuple, Union

from .exceptions import ConfigError, InsideObstacleError


class Vec2(NamedTuple):
    """Immutable 2D vector in world units."""

    x: float
    y: float

    def __add__(self, other: "Vec2") -> "Vec2":  # type: ignore[override]
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Vec2":  # type: ignore[override]
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __truediv__(self, d: float) -> "Vec2":
        return Vec2(self.x / d, self.y / d)

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def distance_to(self, other: "Vec2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def rotated(self, angle: float) -> "Vec2":
        """Rotate counter-clockwise by ``angle`` radians."""
        c, s = math.cos(angle), math.sin(angle)
        return Vec2(c * self.x - s * self.y, s * self.x + c * self.y)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


ZERO = Vec2(0.0, 0.0)


def vec_sum(vectors: Iterable[Vec2]) -> Vec2:
    """Correctly rounded sum of ``vectors``; the result does not depend on their order."""
    xs: List[float] = []
    ys: List[float] = []
    for v in vectors:
        xs.append(v.x)
        ys.append(v.y)
    return Vec2(math.fsum(xs), math.fsum(ys))


def closest_point_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2:
    """Return the point of segment ``a``-``b`` closest to ``p``."""
    ab = b - a
    l2 = ab.dot(ab)
    if l2 == 0.0:
        return a
    t = (p - a).dot(ab) / l2
    if t <= 0.0:
        return a
    if t >= 1.0:
        return b
    return Vec2(a.x + ab.x * t, a.y + ab.y * t)


def point_in_polygon(p: Vec2, vertices: Sequence[Vec2]) -> bool:
    """Even-odd crossing test. Points on an edge give an unspecified answer."""
    inside = False
    n = len(vertices)
    j = n - 1
    for i in range(n):
        vi, vj = vertices[i], vertices[j]
        if (vi.y > p.y) != (vj.y > p.y) and p.x < (vj.x - vi.x) * (p.y - vi.y) / (
            vj.y - vi.y
        ) + vi.x:
            inside = not inside
        j = i
    return inside


def signed_area(vertices: Sequence[Vec2]) -> float:
    n = len(vertices)
    total = 0.0
    for i in range(n):
        total += vertices[i].cross(vertices[(i + 1) % n])
    return total / 2.0


@dataclass(frozen=True)
class Circle:
    """Circular obstacle."""

    center: Vec2
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ConfigError("Circle radius must be > 0", context=str(self.radius))

    @property
    def bounding_center(self) -> Vec2:
        return self.center

    @property
    def bounding_radius(self) -> float:
        return self.radius

    def contains(self, p: Vec2) -> bool:
        return p.distance_to(self.center) < self.radius

    def to_dict(self) -> dict:
        return {"type": "circle", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Polygon:
    """Closed polygonal obstacle; the last vertex connects back to the first."""

    vertices: Tuple[Vec2, ...]
    _bounds: Tuple[Vec2, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.vertices) < 3:
            raise ConfigError(
                "Polygon needs at least 3 vertices", context=f"{len(self.vertices)} given"
            )
        if abs(signed_area(self.vertices)) <= 1e-12:
            raise ConfigError("Polygon vertices are collinear")
        n = len(self.vertices)
        cx = sum(v.x for v in self.vertices) / n
        cy = sum(v.y for v in self.vertices) / n
        center = Vec2(cx, cy)
        radius = max(center.distance_to(v) for v in self.vertices)
        object.__setattr__(self, "_bounds", (center, radius))

    @property
    def bounding_center(self) -> Vec2:
        return self._bounds[0]

    @property
    def bounding_radius(self) -> float:
        return self._bounds[1]

    def edges(self) -> List[Tuple[Vec2, Vec2]]:
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def contains(self, p: Vec2) -> bool:
        return point_in_polygon(p, self.vertices)

    def to_dict(self) -> dict:
        return {"type": "polygon", "vertices": [list(v) for v in self.vertices]}


Obstacle = Union[Circle, Polygon]


def rectangle(x0: float, y0: float, x1: float, y1: float) -> Polygon:
    """Axis-aligned rectangle polygon, counter-clockwise."""
    return Polygon((Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)))


def nearest_obstacle_point(pos: Vec2, obstacle: Obstacle) -> Tuple[Vec2, float]:
    """
    Closest boundary point of ``obstacle`` to ``pos`` and its distance.

    For polygons every edge is tried in order and the first strict minimum
    wins, so ties resolve to the lowest edge index.

    Raises:
        InsideObstacleError: If ``pos`` lies strictly inside the obstacle
    """
    if isinstance(obstacle, Circle):
        offset = pos - obstacle.center
        d = offset.norm()
        if d < obstacle.radius:
            raise InsideObstacleError("Query point is inside a circular obstacle", context=str(pos))
        point = obstacle.center + offset * (obstacle.radius / d)
        return point, d - obstacle.radius

    best_point = obstacle.vertices[0]
    best_dist = math.inf
    for a, b in obstacle.edges():
        q = closest_point_on_segment(pos, a, b)
        d = pos.distance_to(q)
        if d < best_dist:
            best_point, best_dist = q, d
    if best_dist > 0.0 and obstacle.contains(pos):
        raise InsideObstacleError("Query point is inside a polygonal obstacle", context=str(pos))
    return best_point, best_dist


def lower_bound_distance(pos: Vec2, obstacle: Obstacle) -> float:
    """Cheap lower bound on the distance from ``pos`` to ``obstacle``."""
    return pos.distance_to(obstacle.bounding_center) - obstacle.bounding_radius


__all__ = [
    "ZERO",
    "Circle",
    "Obstacle",
    "Polygon",
    "Vec2",
    "closest_point_on_segment",
    "lower_bound_distance",
    "nearest_obstacle_point",
    "point_in_polygon",
    "rectangle",
    "signed_area",
    "vec_sum",
]
