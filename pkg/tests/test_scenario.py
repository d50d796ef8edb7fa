import dataclasses
import math

import pytest
import yaml

from collabplan.model import ActionKind, AgentKind
from collabplan.pddl import Atom, emit_domain, emit_problem, ground, parse_domain, parse_problem
from collabplan.planner import brute_force_optimal, plan_cost, plan_search
from collabplan.scenario import (
    ScenarioError,
    benchmark_text,
    builtin_benchmark,
    compile_scenario,
    config_from_dict,
    load_scenario,
    parse_goal_atom,
    parse_quantity,
)

SMALL = """
name: small
agents:
  - {id: arm, kind: robot, strength: 2 kg, base: [0, 0, 0], range: [{lo: [-1, -1, 0], hi: [1, 1, 1]}], start: a}
  - {id: person, kind: human, strength: 10, base: [0, 2, 0], start: b}
parts:
  - {id: bolt, weight: 50 g, at: a}
locations:
  - {id: a, position: [0.2, 0, 0], reach: {arm: 80}}
  - {id: b, position: [0.8, 0, 0], reach: {arm: 40}}
paths:
  - {id: ab, from: a, to: b}
gains:
  risk:
    robot: {pick: 0.4, place: 0.4, move: 0.6}
    human: {pick: 0.1, place: 0.1, move: 0.4}
  k_c: 3
  c_h: 0.2
  c_r: 1
goal: ["at(bolt, b)"]
"""


def _doc():
    return yaml.safe_load(SMALL)


def test_small_scenario_loads_and_plans():
    cfg = load_scenario(SMALL)
    assert [a.id for a in cfg.robots] == ["arm"]
    assert cfg.part("bolt").weight_kg == pytest.approx(0.05)
    c = compile_scenario(cfg)
    plan = plan_search(c.grounded)
    assert plan is not None
    assert math.isclose(plan_cost(plan), brute_force_optimal(c.grounded))


@pytest.mark.parametrize("edit, where, fragment", [
    (lambda d: d["parts"][0].update(weight=-1), "parts[0].weight", "must be positive"),
    (lambda d: d["paths"][0].update(to="nowhere"), "paths[0].to", "unknown location"),
    (lambda d: d["agents"][0].update(kind="drone"), "agents[0].kind", "unknown"),
    (lambda d: d["agents"][1].update(range=[{"lo": [0, 0, 0], "hi": [1, 1, 1]}]), "agents[1].range", "unbounded"),
    (lambda d: d.update(goal=[]), "goal", "must not be empty"),
    (lambda d: d["locations"][0]["reach"].update(arm=120), "locations[0].reach.arm", "[0, 100]"),
    (lambda d: d["parts"][0].update(weight="3 furlongs"), "parts[0].weight", "unit"),
    (lambda d: d.update(cooperate=[{"agents": ["arm"], "at": "a"}]), "cooperate[0].agents", "two"),
    (lambda d: d.update(durations={"fly": 3}), "durations.fly", "unknown action"),
    (lambda d: d["agents"][0].update(start="c"), "agents[0].start", "unknown location"),
])
def test_errors_name_the_offending_field(edit, where, fragment):
    doc = _doc()
    edit(doc)
    with pytest.raises(ScenarioError) as e:
        config_from_dict(doc)
    assert e.value.path == where
    assert fragment in str(e.value)
    assert str(e.value).startswith(where + ":")


def test_missing_section_is_reported():
    doc = _doc()
    del doc["agents"]
    with pytest.raises(ScenarioError, match="agents: missing"):
        config_from_dict(doc)


def test_bad_yaml_reports_a_line():
    with pytest.raises(ScenarioError, match="line"):
        load_scenario("name: x\nagents: [\n")


def test_unreadable_file(tmp_path):
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario(tmp_path / "missing.yaml")


@pytest.mark.parametrize("value, dim, expected", [
    ("135 g", "mass", 0.135), ("3 kg", "mass", 3.0), (2, "mass", 2.0),
    ("5 cm", "length", 0.05), ("12mm", "length", 0.012), ("2 min", "time", 120.0),
])
def test_quantities(value, dim, expected):
    assert parse_quantity(value, dim, "x") == pytest.approx(expected)


def test_quantity_rejects_nonsense():
    with pytest.raises(ScenarioError):
        parse_quantity("fast", "time", "x")
    with pytest.raises(ScenarioError):
        parse_quantity(float("inf"), "mass", "x")


def test_goal_atom_forms():
    assert parse_goal_atom("at(bolt, b)") == Atom("at", ("bolt", "b"))
    assert parse_goal_atom("(at bolt b)") == Atom("at", ("bolt", "b"))
    with pytest.raises(ScenarioError):
        parse_goal_atom("at(bolt")


def test_benchmark_shape():
    cfg = builtin_benchmark()
    assert len(cfg.agents) == 3
    assert [a.kind for a in cfg.agents].count(AgentKind.ROBOT) == 2
    assert len(cfg.goal) == 2
    assert len(builtin_benchmark(1).goal) == 1
    with pytest.raises(ValueError):
        builtin_benchmark(3)
    assert benchmark_text().startswith("#")


def test_benchmark_solo_costs():
    cfg = builtin_benchmark()
    assert cfg.solo_cost("robot1", ActionKind.PICK, "storage_1", "base_1") == pytest.approx(1.0)
    assert cfg.solo_cost("robot2", ActionKind.PLACE, "workspace", "ring_1") == math.inf
    assert cfg.solo_cost("robot2", ActionKind.PLACE, "workspace", "ring_1", informed=True) == \
        pytest.approx(2.092, abs=5e-3)
    assert cfg.solo_cost("worker", ActionKind.PICK, "workspace", "finished_1") == pytest.approx(1.637, abs=5e-3)


def test_compiled_pddl_round_trips_and_grounds_the_same():
    c = compile_scenario(builtin_benchmark(1))
    d = parse_domain(emit_domain(c.domain))
    p = parse_problem(emit_problem(c.problem), d)
    assert d == c.domain and p == c.problem
    via_fluents = ground(d, p)
    assert {op.key: op.cost for op in via_fluents.actions} == {op.key: op.cost for op in c.grounded.actions}


def test_uninformed_robot_never_places_unassisted():
    c = compile_scenario(builtin_benchmark(1))
    t = c.grounded
    assert not t.has_prop("(knows robot2 workspace)") or t.prop("(knows robot2 workspace)") not in t.init
    solo = dataclasses.replace(t, actions=tuple(op for op in t.actions if op.name != "cooperate"))
    plan = plan_search(solo)
    # the worker can still do the job, but robot2 never places at the workspace
    assert not [op for op in plan if op.name == "place" and op.args[0] == "robot2" and op.args[2] == "workspace"]
    assert plan_cost(plan) > plan_cost(plan_search(t))


def test_no_robots_means_no_knowledge_facts():
    doc = _doc()
    doc["agents"] = [doc["agents"][1]]
    doc["locations"][0]["reach"] = {}
    doc["locations"][1]["reach"] = {}
    c = compile_scenario(config_from_dict(doc))
    assert all(a.predicate != "knows" for a in c.grounded.propositions)
    assert plan_search(c.grounded) is not None
