"""Domain vocabulary: agents, parts, locations, paths and box regions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

POSITION_TOL = 1e-6


class ActionKind(str, Enum):
    PICK = "PICK"
    PLACE = "PLACE"
    MOVE = "MOVE"
    COOPERATE = "COOPERATE"


class AgentKind(str, Enum):
    HUMAN = "human"
    ROBOT = "robot"


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for v in (self.x, self.y, self.z):
            if not math.isfinite(v):
                raise ValueError(f"non-finite coordinate in {self!r}")

    @classmethod
    def of(cls, xyz: Sequence[float]) -> Point3:
        if len(xyz) != 3:
            raise ValueError(f"expected 3 coordinates, got {len(xyz)}")
        return cls(float(xyz[0]), float(xyz[1]), float(xyz[2]))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def distance(self, other: Point3) -> float:
        return math.dist(self.as_tuple(), other.as_tuple())


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box."""

    lo: Point3
    hi: Point3

    def __post_init__(self) -> None:
        if any(a > b for a, b in zip(self.lo.as_tuple(), self.hi.as_tuple())):
            raise ValueError(f"box min corner exceeds max corner: {self!r}")

    def contains(self, p: Point3) -> bool:
        return all(
            a <= v <= b
            for a, v, b in zip(self.lo.as_tuple(), p.as_tuple(), self.hi.as_tuple())
        )


@dataclass(frozen=True)
class Region:
    """Union of closed boxes. An empty box list is the empty region."""

    boxes: tuple[Box, ...] = ()

    @classmethod
    def from_boxes(cls, boxes: Iterable[Box]) -> Region:
        return cls(tuple(boxes))

    @property
    def is_empty(self) -> bool:
        return not self.boxes

    def union(self, other: Region) -> Region:
        return Region(self.boxes + other.boxes)

    def bounding_box(self) -> Box:
        if not self.boxes:
            raise ValueError("empty region has no bounding box")
        lo = [min(b.lo.as_tuple()[i] for b in self.boxes) for i in range(3)]
        hi = [max(b.hi.as_tuple()[i] for b in self.boxes) for i in range(3)]
        return Box(Point3.of(lo), Point3.of(hi))


@dataclass(frozen=True)
class Trajectory:
    """Polyline through at least two distinct consecutive waypoints."""

    waypoints: tuple[Point3, ...]

    def __post_init__(self) -> None:
        if len(self.waypoints) < 2:
            raise ValueError("trajectory needs at least 2 waypoints")
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            if a == b:
                raise ValueError(f"repeated consecutive waypoint {a!r}")

    def segments(self) -> Iterable[tuple[Point3, Point3]]:
        return zip(self.waypoints, self.waypoints[1:])

    def reversed(self) -> Trajectory:
        return Trajectory(tuple(reversed(self.waypoints)))

    def farthest_from(self, origin: Point3) -> Point3:
        # distance to a segment point is convex, so the maximum sits on a vertex
        return max(self.waypoints, key=origin.distance)


@dataclass(frozen=True)
class AgentSpec:
    id: str
    kind: AgentKind
    strength_limit_kg: float
    # None means unbounded: humans can move anywhere in the cell
    range: Region | None = None
    known_info: frozenset[str] = frozenset()
    coop_coeff: float | None = None
    base: Point3 = Point3(0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if not self.strength_limit_kg > 0:
            raise ValueError(f"agent {self.id}: strength limit must be positive")
        if self.coop_coeff is not None and self.coop_coeff < 0:
            raise ValueError(f"agent {self.id}: cooperation coefficient must be >= 0")
        if self.kind is AgentKind.HUMAN and self.range is not None:
            raise ValueError(f"agent {self.id}: humans have unbounded range")
        if self.kind is AgentKind.ROBOT and self.range is None:
            raise ValueError(f"agent {self.id}: robots need a declared range")

    @property
    def is_human(self) -> bool:
        return self.kind is AgentKind.HUMAN

    @property
    def is_robot(self) -> bool:
        return self.kind is AgentKind.ROBOT


@dataclass(frozen=True)
class PartSpec:
    id: str
    weight_kg: float
    initial_location: str | None = None

    def __post_init__(self) -> None:
        if not self.weight_kg > 0:
            raise ValueError(f"part {self.id}: weight must be positive")


@dataclass(frozen=True)
class LocationSpec:
    id: str
    position: Point3
    reach_index: dict[str, float] = field(default_factory=dict, hash=False)

    def __post_init__(self) -> None:
        for robot, d in self.reach_index.items():
            if not 0.0 <= d <= 100.0:
                raise ValueError(f"location {self.id}: reach index for {robot} outside [0, 100]")


@dataclass(frozen=True)
class PathSpec:
    id: str
    start: str
    end: str
    trajectory: Trajectory


@dataclass(frozen=True)
class GroundAction:
    kind: ActionKind
    agents: tuple[str, ...]
    at: str
    part: str | None = None
    duration_s: float = 1.0

    def __post_init__(self) -> None:
        if not self.agents:
            raise ValueError("action needs at least one agent")
        if self.kind is ActionKind.COOPERATE:
            if len(self.agents) < 2:
                raise ValueError("COOPERATE needs at least two agents")
        elif len(self.agents) != 1:
            raise ValueError(f"{self.kind.value} takes exactly one agent")
        if not self.duration_s > 0:
            raise ValueError("duration must be positive")

    @property
    def n_agents(self) -> int:
        return len(self.agents)


def region_contains(region: Region, p: Point3) -> bool:
    return any(box.contains(p) for box in region.boxes)


def _segment_hits_box(a: Point3, b: Point3, box: Box) -> bool:
    # Liang-Barsky clipping against the closed slabs; clipping always runs from
    # the lexicographically smaller endpoint so rounding cannot depend on direction
    if b.as_tuple() < a.as_tuple():
        a, b = b, a
    t0, t1 = 0.0, 1.0
    for lo, hi, p, q in zip(box.lo.as_tuple(), box.hi.as_tuple(), a.as_tuple(), b.as_tuple()):
        d = q - p
        if d == 0.0:
            if p < lo or p > hi:
                return False
            continue
        ta, tb = (lo - p) / d, (hi - p) / d
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
        if t0 > t1:
            return False
    return True


def trajectory_intersects(t: Trajectory, r: Region) -> bool:
    """True iff some segment of the polyline touches the closed region."""
    return any(_segment_hits_box(a, b, box) for a, b in t.segments() for box in r.boxes)
