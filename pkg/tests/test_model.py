import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from collabplan.model import (
    ActionKind,
    AgentKind,
    AgentSpec,
    Box,
    GroundAction,
    LocationSpec,
    PartSpec,
    Point3,
    Region,
    Trajectory,
    region_contains,
    trajectory_intersects,
)

UNIT = Region.from_boxes([Box(Point3(0, 0, 0), Point3(1, 1, 1))])
coord = st.floats(-3, 3, allow_nan=False)


def test_point_rejects_nan():
    with pytest.raises(ValueError):
        Point3(math.nan, 0, 0)


def test_box_needs_ordered_corners():
    with pytest.raises(ValueError):
        Box(Point3(1, 0, 0), Point3(0, 1, 1))


def test_closed_boundaries_count_as_inside():
    assert region_contains(UNIT, Point3(1, 1, 1))
    assert region_contains(UNIT, Point3(0, 0.5, 0))
    assert not region_contains(UNIT, Point3(1.01, 0.5, 0.5))


def test_empty_region_contains_nothing():
    assert not region_contains(Region(()), Point3(0, 0, 0))


def test_union_membership():
    other = Region.from_boxes([Box(Point3(2, 2, 2), Point3(3, 3, 3))])
    both = UNIT.union(other)
    assert region_contains(both, Point3(2.5, 2.5, 2.5))
    assert region_contains(both, Point3(0.5, 0.5, 0.5))
    assert not region_contains(both, Point3(1.5, 1.5, 1.5))


def test_trajectory_rejects_repeated_waypoints():
    with pytest.raises(ValueError):
        Trajectory((Point3(0, 0, 0), Point3(0, 0, 0)))
    with pytest.raises(ValueError):
        Trajectory((Point3(0, 0, 0),))


def test_segment_crossing_box_without_vertex_inside():
    t = Trajectory((Point3(-1, 0.5, 0.5), Point3(2, 0.5, 0.5)))
    assert trajectory_intersects(t, UNIT)


def test_segment_passing_beside_box():
    t = Trajectory((Point3(-1, 2, 0.5), Point3(2, 2, 0.5)))
    assert not trajectory_intersects(t, UNIT)


def test_segment_touching_a_corner():
    t = Trajectory((Point3(2, 0, 1), Point3(0, 2, 1)))
    assert trajectory_intersects(t, UNIT)


@given(coord, coord, coord, coord, coord, coord)
def test_intersection_is_symmetric_in_direction(ax, ay, az, bx, by, bz):
    a, b = Point3(ax, ay, az), Point3(bx, by, bz)
    if a == b:
        return
    t = Trajectory((a, b))
    assert trajectory_intersects(t, UNIT) == trajectory_intersects(t.reversed(), UNIT)


@given(coord, coord, coord, coord, coord, coord)
def test_endpoint_inside_implies_intersection(ax, ay, az, bx, by, bz):
    a, b = Point3(ax, ay, az), Point3(bx, by, bz)
    if a == b:
        return
    if region_contains(UNIT, a) or region_contains(UNIT, b):
        assert trajectory_intersects(Trajectory((a, b)), UNIT)


@given(st.lists(st.tuples(coord, coord, coord), min_size=2, max_size=6, unique=True))
def test_dense_sampling_never_finds_a_missed_hit(pts):
    t = Trajectory(tuple(Point3(*p) for p in pts))
    hit = trajectory_intersects(t, UNIT)
    for a, b in t.segments():
        for k in range(51):
            s = k / 50
            q = Point3((1 - s) * a.x + s * b.x, (1 - s) * a.y + s * b.y, (1 - s) * a.z + s * b.z)
            if region_contains(UNIT, q):
                assert hit


def test_farthest_waypoint():
    t = Trajectory((Point3(0, 0, 0), Point3(1, 0, 0), Point3(0.5, 0, 0)))
    assert t.farthest_from(Point3(0, 0, 0)) == Point3(1, 0, 0)


def test_agent_range_rules():
    box = Region.from_boxes([Box(Point3(0, 0, 0), Point3(1, 1, 1))])
    with pytest.raises(ValueError):
        AgentSpec("w", AgentKind.HUMAN, 10, range=box)
    with pytest.raises(ValueError):
        AgentSpec("r", AgentKind.ROBOT, 3)
    with pytest.raises(ValueError):
        AgentSpec("r", AgentKind.ROBOT, 0, range=box)


def test_part_weight_positive():
    with pytest.raises(ValueError):
        PartSpec("x", -1.0)


def test_location_reach_bounds():
    with pytest.raises(ValueError):
        LocationSpec("l", Point3(0, 0, 0), {"r": 101})


def test_ground_action_arity():
    with pytest.raises(ValueError):
        GroundAction(ActionKind.PICK, ("a", "b"), "l")
    with pytest.raises(ValueError):
        GroundAction(ActionKind.COOPERATE, ("a",), "l")
    assert GroundAction(ActionKind.COOPERATE, ("a", "b"), "l").n_agents == 2
