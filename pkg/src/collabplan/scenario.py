"""Scenario files, the cost-annotated PDDL compiler and the built-in assembly cell."""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import yaml

from .cost import (
    CostContext,
    CostGains,
    CostTable,
    InfoRequirements,
    agent_action_cost,
    build_cost_table,
    cooperative_cost,
)
from .model import (
    ActionKind,
    AgentKind,
    AgentSpec,
    Box,
    LocationSpec,
    PartSpec,
    PathSpec,
    Point3,
    Region,
    Trajectory,
    region_contains,
)
from .pddl.ast import ActionSchema, Atom, DomainAst, FluentTerm, FunctionDecl, Predicate, ProblemAst
from .pddl.grounding import GroundedTask, ground, instantiate

DEFAULT_DURATIONS = {"pick": 2.0, "place": 2.0, "move": 10.0, "cooperate": 15.0, "assemble": 1.0}

_ID_RE = re.compile(r"[a-z][a-z0-9_\-]*\Z")
_UNITS = {
    "mass": {"kg": 1.0, "g": 1e-3},
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3},
    "time": {"s": 1.0, "min": 60.0},
}
_QUANTITY_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([a-z]*)\s*$")
_GOAL_RE = re.compile(r"^\s*([a-z][a-z0-9_\-]*)\s*\(\s*([^()]*)\)\s*$")


class ScenarioError(ValueError):
    """Invalid scenario; ``path`` points into the document (``parts[1].weight``)."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class Cooperation:
    """A declared joint action: ``agents`` act together at location ``at``."""

    agents: tuple[str, ...]
    at: str


@dataclass(frozen=True)
class AssembleRule:
    inputs: tuple[str, str]
    output: str
    at: str


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    agents: tuple[AgentSpec, ...]
    parts: tuple[PartSpec, ...]
    locations: tuple[LocationSpec, ...]
    paths: tuple[PathSpec, ...]
    gains: CostGains
    starts: Mapping[str, str] = field(default_factory=dict, hash=False)
    info_reqs: InfoRequirements = InfoRequirements()
    cooperations: tuple[Cooperation, ...] = ()
    # keys are "agent/place" or bare "place"; values are activity indices in [0, 100]
    safety_d: Mapping[str, float] = field(default_factory=dict, hash=False)
    durations: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_DURATIONS), hash=False)
    goal: tuple[Atom, ...] = ()
    assemble_rules: tuple[AssembleRule, ...] = ()
    # per-path reach indices for MOVE, overriding the location lookup: {path: {robot: D}}
    path_reach: Mapping[str, Mapping[str, float]] = field(default_factory=dict, hash=False)
    double_count_ci: bool = False

    # ---- lookups
    def agent(self, agent_id: str) -> AgentSpec:
        return _by_id(self.agents, agent_id, "agent")

    def part(self, part_id: str) -> PartSpec:
        return _by_id(self.parts, part_id, "part")

    def location(self, loc_id: str) -> LocationSpec:
        return _by_id(self.locations, loc_id, "location")

    def path(self, path_id: str) -> PathSpec:
        return _by_id(self.paths, path_id, "path")

    @property
    def robots(self) -> tuple[AgentSpec, ...]:
        return tuple(a for a in self.agents if a.is_robot)

    @property
    def humans(self) -> tuple[AgentSpec, ...]:
        return tuple(a for a in self.agents if a.is_human)

    def duration(self, action: str) -> float:
        return float(self.durations.get(action, DEFAULT_DURATIONS[action]))

    # ---- validation
    def check_references(self) -> None:
        for section, items in (("agents", self.agents), ("parts", self.parts),
                               ("locations", self.locations), ("paths", self.paths)):
            seen: set[str] = set()
            for i, item in enumerate(items):
                if not _ID_RE.match(item.id):
                    raise ScenarioError(f"{section}[{i}].id", f"invalid identifier {item.id!r}")
                if item.id in seen:
                    raise ScenarioError(f"{section}[{i}].id", f"duplicate id {item.id!r}")
                seen.add(item.id)
        all_ids = [x.id for x in (*self.agents, *self.parts, *self.locations, *self.paths)]
        dup = next((x for x in all_ids if all_ids.count(x) > 1), None)
        if dup is not None:
            raise ScenarioError("", f"id {dup!r} is used for two different objects")
        locs = {loc.id for loc in self.locations}
        agents = {a.id for a in self.agents}
        parts = {p.id for p in self.parts}
        for i, a in enumerate(self.agents):
            start = self.starts.get(a.id)
            if start is None:
                raise ScenarioError(f"agents[{i}].start", "missing")
            if start not in locs:
                raise ScenarioError(f"agents[{i}].start", f"unknown location {start!r}")
        for i, p in enumerate(self.parts):
            if p.initial_location is not None and p.initial_location not in locs:
                raise ScenarioError(f"parts[{i}].at", f"unknown location {p.initial_location!r}")
        for i, loc in enumerate(self.locations):
            for robot in loc.reach_index:
                if robot not in agents:
                    raise ScenarioError(f"locations[{i}].reach", f"unknown agent {robot!r}")
        for i, p in enumerate(self.paths):
            for end, name in ((p.start, "from"), (p.end, "to")):
                if end not in locs:
                    raise ScenarioError(f"paths[{i}].{name}", f"unknown location {end!r}")
        for i, c in enumerate(self.cooperations):
            if len(c.agents) < 2:
                raise ScenarioError(f"cooperate[{i}].agents", "needs at least two agents")
            for a in c.agents:
                if a not in agents:
                    raise ScenarioError(f"cooperate[{i}].agents", f"unknown agent {a!r}")
            kinds = sorted(self.agent(a).kind.value for a in c.agents)
            if kinds != ["human", "robot"]:
                raise ScenarioError(f"cooperate[{i}].agents", "a cooperation pairs one human with one robot")
            if c.at not in locs:
                raise ScenarioError(f"cooperate[{i}].at", f"unknown location {c.at!r}")
        for i, r in enumerate(self.assemble_rules):
            for p in (*r.inputs, r.output):
                if p not in parts:
                    raise ScenarioError(f"assemble[{i}]", f"unknown part {p!r}")
            if r.at not in locs:
                raise ScenarioError(f"assemble[{i}].at", f"unknown location {r.at!r}")
        for (agent, _, at) in self.info_reqs.table:
            if agent not in agents:
                raise ScenarioError("info", f"unknown agent {agent!r}")
            if at not in locs and at not in {p.id for p in self.paths}:
                raise ScenarioError("info", f"unknown place {at!r}")
        places = locs | {p.id for p in self.paths}
        for key, d in self.safety_d.items():
            agent, _, place = key.rpartition("/")
            if agent and agent not in agents:
                raise ScenarioError(f"safety_d.{key}", f"unknown agent {agent!r}")
            if place not in places:
                raise ScenarioError(f"safety_d.{key}", f"unknown place {place!r}")
            if not 0.0 <= d <= 100.0:
                raise ScenarioError(f"safety_d.{key}", "must lie in [0, 100]")
        for i, g in enumerate(self.goal):
            _check_goal_atom(g, parts, locs, agents, f"goal[{i}]")

    # ---- cost inputs
    def _target(self, agent: AgentSpec, kind: ActionKind, place: str) -> tuple[Point3, Trajectory | None]:
        if kind is ActionKind.MOVE:
            traj = self.path(place).trajectory
            return traj.farthest_from(agent.base), traj
        return self.location(place).position, None

    def reach_d(self, robot: AgentSpec, kind: ActionKind, place: str) -> float | None:
        if kind is ActionKind.MOVE:
            override = self.path_reach.get(place, {})
            if robot.id in override:
                return float(override[robot.id])
            target, _ = self._target(robot, kind, place)
            for loc in self.locations:
                if loc.position.distance(target) <= 1e-6 and robot.id in loc.reach_index:
                    return float(loc.reach_index[robot.id])
            return None
        return self.location(place).reach_index.get(robot.id)

    def activity_d(self, agent: AgentSpec, kind: ActionKind, place: str) -> float:
        """Activity index used by the safety term.

        Explicit ``safety_d`` entries win. Otherwise a robot uses its own reach
        index at the target, and a human the largest reach index among the
        robots whose range covers the target (zero when none does).
        """
        for key in (f"{agent.id}/{place}", place):
            if key in self.safety_d:
                return float(self.safety_d[key])
        target, _ = self._target(agent, kind, place)
        if agent.is_robot:
            if not region_contains(agent.range, target):
                return 0.0
            return self.reach_d(agent, kind, place) or 0.0
        best = 0.0
        for r in self.robots:
            if region_contains(r.range, target):
                best = max(best, self.reach_d(r, kind, place) or 0.0)
        return best

    def cost_context(self, agent: AgentSpec, kind: ActionKind, place: str, part: PartSpec | None,
                     known_info: frozenset[str] | None = None) -> CostContext:
        target, traj = self._target(agent, kind, place)
        reach = None
        if agent.is_robot and region_contains(agent.range, target):
            reach = self.reach_d(agent, kind, place)
            if reach is None:
                raise ScenarioError("locations", f"no reach index for {agent.id} at {place}")
        return CostContext(
            gains=self.gains,
            target=target,
            part=part,
            reach_d=reach,
            safety_d=self.activity_d(agent, kind, place),
            worker_trajectory=traj,
            robot_ranges=tuple(r.range for r in self.robots),
            required_info=self.info_reqs.required(agent.id, kind, place),
            known_info=known_info,
            double_count_ci=self.double_count_ci,
        )

    def solo_cost(self, agent_id: str, kind: ActionKind, place: str, part_id: str | None = None,
                  *, informed: bool = False) -> float:
        """Total cost of one agent acting alone; ``informed`` assumes the
        action's information requirements have been met."""
        agent = self.agent(agent_id)
        part = self.part(part_id) if part_id else None
        known = None
        if informed:
            known = agent.known_info | self.info_reqs.required(agent.id, kind, place)
        return agent_action_cost(agent, kind, self.cost_context(agent, kind, place, part, known)).total

    def cooperative_total(self, coop: Cooperation, part: PartSpec | None) -> float:
        agents = [self.agent(a) for a in coop.agents]
        contexts = [self.cost_context(a, ActionKind.PLACE, coop.at, part) for a in agents]
        return cooperative_cost(agents, ActionKind.PLACE, contexts, self.gains)


def _by_id(items, item_id: str, what: str):
    for x in items:
        if x.id == item_id:
            return x
    raise KeyError(f"unknown {what} {item_id!r}")


def _check_goal_atom(g: Atom, parts, locs, agents, where: str) -> None:
    signatures = {"at": (parts, locs), "agent-at": (agents, locs)}
    if g.predicate not in signatures:
        raise ScenarioError(where, f"unsupported goal predicate {g.predicate!r}")
    expected = signatures[g.predicate]
    if len(g.args) != len(expected):
        raise ScenarioError(where, f"{g.predicate} takes {len(expected)} arguments")
    for arg, allowed in zip(g.args, expected):
        if arg not in allowed:
            raise ScenarioError(where, f"unknown object {arg!r}")


# --------------------------------------------------------------------------- loading


def parse_quantity(value: Any, dimension: str, path: str) -> float:
    """Number, or string with a unit suffix of the given dimension; returns SI units."""
    if isinstance(value, bool):
        raise ScenarioError(path, "expected a number")
    if isinstance(value, (int, float)):
        v = float(value)
    elif isinstance(value, str):
        m = _QUANTITY_RE.match(value)
        if m is None:
            raise ScenarioError(path, f"malformed quantity {value!r}")
        unit = m.group(2)
        v = float(m.group(1))
        if unit:
            scale = _UNITS[dimension].get(unit)
            if scale is None:
                raise ScenarioError(path, f"unit {unit!r} is not a {dimension} unit")
            v *= scale
    else:
        raise ScenarioError(path, "expected a number")
    if not math.isfinite(v):
        raise ScenarioError(path, "must be finite")
    return v


def parse_goal_atom(text: str, path: str = "goal") -> Atom:
    """``at(finished_1, storage_3)`` or ``(at finished_1 storage_3)``."""
    if not isinstance(text, str):
        raise ScenarioError(path, "expected an atom string")
    t = text.strip().lower()
    if t.startswith("(") and t.endswith(")"):
        tokens = t[1:-1].split()
        if not tokens:
            raise ScenarioError(path, "empty atom")
        return Atom(tokens[0], tuple(tokens[1:]))
    m = _GOAL_RE.match(t)
    if m is None:
        raise ScenarioError(path, f"malformed atom {text!r}")
    args = tuple(a.strip() for a in m.group(2).split(",")) if m.group(2).strip() else ()
    return Atom(m.group(1), args)


class _Reader:
    """Typed accessors that report the document path on failure."""

    def __init__(self, data: Any, path: str):
        self.data = data
        self.path = path

    def _child(self, key) -> str:
        if isinstance(key, int):
            return f"{self.path}[{key}]"
        return f"{self.path}.{key}" if self.path else str(key)

    def mapping(self) -> dict:
        if not isinstance(self.data, dict):
            raise ScenarioError(self.path, "expected a mapping")
        return self.data

    def get(self, key: str, default: Any = ...) -> _Reader:
        m = self.mapping()
        if key not in m:
            if default is ...:
                raise ScenarioError(self._child(key), "missing")
            return _Reader(default, self._child(key))
        return _Reader(m[key], self._child(key))

    def items(self) -> list[_Reader]:
        if self.data is None:
            return []
        if not isinstance(self.data, list):
            raise ScenarioError(self.path, "expected a list")
        return [_Reader(x, self._child(i)) for i, x in enumerate(self.data)]

    def ident(self) -> str:
        if not isinstance(self.data, str) or not _ID_RE.match(self.data.lower()):
            raise ScenarioError(self.path, f"invalid identifier {self.data!r}")
        return self.data.lower()

    def idents(self) -> tuple[str, ...]:
        return tuple(r.ident() for r in self.items())

    def quantity(self, dimension: str) -> float:
        return parse_quantity(self.data, dimension, self.path)

    def point(self) -> Point3:
        items = self.items()
        if len(items) != 3:
            raise ScenarioError(self.path, "expected three coordinates")
        return Point3(*(r.quantity("length") for r in items))


def _plain_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(path, "expected a number")
    v = float(value)
    if not math.isfinite(v):
        raise ScenarioError(path, "must be finite")
    return v


def _kind(r: _Reader, enum, what: str):
    text = str(r.data)
    for candidate in (text.lower(), text.upper()):
        try:
            return enum(candidate)
        except ValueError:
            pass
    raise ScenarioError(r.path, f"unknown {what} {r.data!r}")


def config_from_dict(doc: Any) -> ScenarioConfig:
    root = _Reader(doc, "")
    root.mapping()
    name = root.get("name", "scenario").ident()

    agents, starts = [], {}
    for r in root.get("agents").items():
        aid = r.get("id").ident()
        kind = _kind(r.get("kind"), AgentKind, "agent kind")
        strength = r.get("strength").quantity("mass")
        if strength <= 0:
            raise ScenarioError(r.get("strength").path, "must be positive")
        rng = None
        boxes = r.get("range", None).items()
        if kind is AgentKind.ROBOT:
            if not boxes:
                raise ScenarioError(r._child("range"), "robots need at least one box")
            built = []
            for b in boxes:
                lo, hi = b.get("lo").point(), b.get("hi").point()
                try:
                    built.append(Box(lo, hi))
                except ValueError as e:
                    raise ScenarioError(b.path, str(e)) from None
            rng = Region.from_boxes(built)
        elif boxes:
            raise ScenarioError(r._child("range"), "humans have unbounded range")
        coop = r.get("coop", None).data
        if coop is not None:
            coop = _plain_number(coop, r._child("coop"))
            if coop < 0:
                raise ScenarioError(r._child("coop"), "must be non-negative")
        base = r.get("base", [0, 0, 0]).point()
        known = frozenset(r.get("known", []).idents())
        agents.append(AgentSpec(aid, kind, strength, rng, known, coop, base))
        starts[aid] = r.get("start").ident()

    parts = []
    for r in root.get("parts").items():
        w = r.get("weight").quantity("mass")
        if w <= 0:
            raise ScenarioError(r.get("weight").path, "must be positive")
        at = r.get("at", None)
        parts.append(PartSpec(r.get("id").ident(), w, at.ident() if at.data is not None else None))

    locations = []
    for r in root.get("locations").items():
        reach = {}
        for robot, d in r.get("reach", {}).mapping().items():
            v = _plain_number(d, f"{r.path}.reach.{robot}")
            if not 0.0 <= v <= 100.0:
                raise ScenarioError(f"{r.path}.reach.{robot}", "must lie in [0, 100]")
            reach[str(robot).lower()] = v
        locations.append(LocationSpec(r.get("id").ident(), r.get("position").point(), reach))
    positions = {loc.id: loc.position for loc in locations}

    paths, path_reach = [], {}
    for r in root.get("paths", []).items():
        pid = r.get("id").ident()
        start, end = r.get("from").ident(), r.get("to").ident()
        for end_id, key in ((start, "from"), (end, "to")):
            if end_id not in positions:
                raise ScenarioError(r._child(key), f"unknown location {end_id!r}")
        via = [v.point() for v in r.get("via", []).items()]
        try:
            traj = Trajectory((positions[start], *via, positions[end]))
        except ValueError as e:
            raise ScenarioError(r.path, str(e)) from None
        paths.append(PathSpec(pid, start, end, traj))
        override = r.get("reach", None).data
        if override is not None:
            path_reach[pid] = {str(k).lower(): _plain_number(v, f"{r.path}.reach.{k}")
                               for k, v in r.get("reach").mapping().items()}

    g = root.get("gains", {})
    c_k = {}
    for agent_kind, table in g.get("risk", {}).mapping().items():
        ak = _kind(_Reader(agent_kind, f"gains.risk.{agent_kind}"), AgentKind, "agent kind")
        for action, v in _Reader(table, f"gains.risk.{agent_kind}").mapping().items():
            kind = _kind(_Reader(action, f"gains.risk.{agent_kind}.{action}"), ActionKind, "action")
            val = _plain_number(v, f"gains.risk.{agent_kind}.{action}")
            if val < 0:
                raise ScenarioError(f"gains.risk.{agent_kind}.{action}", "must be non-negative")
            c_k[(ak, kind)] = val
    scalars = {}
    for key in ("k_c", "c_h", "c_r"):
        v = _plain_number(g.get(key, 0.0).data, f"gains.{key}")
        if v < 0:
            raise ScenarioError(f"gains.{key}", "must be non-negative")
        scalars[key] = v
    gains = CostGains(c_k, **scalars)

    info = {}
    for r in root.get("info", []).items():
        kind = _kind(r.get("action"), ActionKind, "action")
        key = (r.get("agent").ident(), kind, r.get("at").ident())
        info[key] = frozenset(r.get("needs").idents())

    coops = tuple(Cooperation(r.get("agents").idents(), r.get("at").ident())
                  for r in root.get("cooperate", []).items())

    safety = {}
    for key, v in root.get("safety_d", {}).mapping().items():
        safety[str(key).lower()] = _plain_number(v, f"safety_d.{key}")

    durations = dict(DEFAULT_DURATIONS)
    for key, v in root.get("durations", {}).mapping().items():
        k = str(key).lower()
        if k not in DEFAULT_DURATIONS:
            raise ScenarioError(f"durations.{key}", "unknown action")
        d = parse_quantity(v, "time", f"durations.{key}")
        if d <= 0:
            raise ScenarioError(f"durations.{key}", "must be positive")
        durations[k] = d

    goal = tuple(parse_goal_atom(r.data, r.path) for r in root.get("goal").items())
    if not goal:
        raise ScenarioError("goal", "must not be empty")

    rules = []
    for r in root.get("assemble", []).items():
        inputs = r.get("inputs").idents()
        if len(inputs) != 2:
            raise ScenarioError(r._child("inputs"), "expected exactly two parts")
        rules.append(AssembleRule((inputs[0], inputs[1]), r.get("output").ident(), r.get("at").ident()))

    cfg = ScenarioConfig(
        name=name, agents=tuple(agents), parts=tuple(parts), locations=tuple(locations),
        paths=tuple(paths), gains=gains, starts=starts, info_reqs=InfoRequirements(info),
        cooperations=coops, safety_d=safety, durations=durations, goal=goal,
        assemble_rules=tuple(rules), path_reach=path_reach,
        double_count_ci=bool(root.get("double_count_ci", False).data),
    )
    cfg.check_references()
    return cfg


def load_scenario(source: str | Path) -> ScenarioConfig:
    """Read a YAML scenario file (or YAML text when ``source`` contains a newline)."""
    if isinstance(source, Path) or "\n" not in str(source):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as e:
            raise ScenarioError("", f"cannot read {source}: {e.strerror or e}") from None
        except UnicodeDecodeError:
            raise ScenarioError("", f"{source} is not UTF-8 text") from None
    else:
        text = str(source)
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark is not None else ""
        raise ScenarioError(where, f"invalid YAML: {getattr(e, 'problem', e)}") from None
    return config_from_dict(doc)


# --------------------------------------------------------------------------- compilation


@dataclass(frozen=True)
class CompiledProblem:
    domain: DomainAst
    problem: ProblemAst
    grounded: GroundedTask
    cost_table: CostTable
    costs: Mapping[tuple[str, ...], float] = field(hash=False, default_factory=dict)


def _a(pred: str, *args: str) -> Atom:
    return Atom(pred, args)


def build_domain(cfg: ScenarioConfig) -> DomainAst:
    d = cfg.duration
    actions = (
        ActionSchema(
            "pick", (("?a", "agent"), ("?p", "part"), ("?l", "location")),
            pre=(_a("agent-at", "?a", "?l"), _a("at", "?p", "?l"), _a("hand-free", "?a")),
            add=(_a("holding", "?a", "?p"),),
            delete=(_a("at", "?p", "?l"), _a("hand-free", "?a")),
            cost=FluentTerm("pick-cost", ("?a", "?p", "?l")), duration=d("pick")),
        ActionSchema(
            "place", (("?a", "agent"), ("?p", "part"), ("?l", "location")),
            pre=(_a("agent-at", "?a", "?l"), _a("holding", "?a", "?p"), _a("knows", "?a", "?l")),
            add=(_a("at", "?p", "?l"), _a("hand-free", "?a")),
            delete=(_a("holding", "?a", "?p"),),
            cost=FluentTerm("place-cost", ("?a", "?p", "?l")), duration=d("place")),
        ActionSchema(
            "move", (("?a", "agent"), ("?from", "location"), ("?to", "location"), ("?w", "path")),
            pre=(_a("agent-at", "?a", "?from"), _a("connects", "?w", "?from", "?to")),
            add=(_a("agent-at", "?a", "?to"),),
            delete=(_a("agent-at", "?a", "?from"),),
            cost=FluentTerm("move-cost", ("?a", "?w")), duration=d("move")),
        ActionSchema(
            "assemble", (("?x", "part"), ("?y", "part"), ("?out", "part"), ("?l", "location")),
            pre=(_a("at", "?x", "?l"), _a("at", "?y", "?l"), _a("recipe", "?x", "?y", "?out", "?l")),
            add=(_a("at", "?out", "?l"),),
            delete=(_a("at", "?x", "?l"), _a("at", "?y", "?l")),
            cost=0.0, duration=d("assemble")),
        ActionSchema(
            "cooperate", (("?h", "human"), ("?r", "robot"), ("?p", "part"), ("?l", "location")),
            pre=(_a("agent-at", "?h", "?l"), _a("agent-at", "?r", "?l"), _a("hand-free", "?h"),
                 _a("holding", "?r", "?p")),
            add=(_a("at", "?p", "?l"), _a("hand-free", "?r"), _a("knows", "?r", "?l")),
            delete=(_a("holding", "?r", "?p"),),
            cost=FluentTerm("cooperate-cost", ("?h", "?r", "?p", "?l")), duration=d("cooperate")),
    )
    return DomainAst(
        name="collab-assembly",
        requirements=(":strips", ":typing", ":durative-actions", ":action-costs"),
        types=(("human", "agent"), ("robot", "agent"), ("agent", "object"), ("part", "object"),
               ("location", "object"), ("path", "object")),
        predicates=(
            Predicate("at", (("?p", "part"), ("?l", "location"))),
            Predicate("agent-at", (("?a", "agent"), ("?l", "location"))),
            Predicate("holding", (("?a", "agent"), ("?p", "part"))),
            Predicate("hand-free", (("?a", "agent"),)),
            Predicate("connects", (("?w", "path"), ("?from", "location"), ("?to", "location"))),
            Predicate("knows", (("?a", "agent"), ("?l", "location"))),
            Predicate("recipe", (("?x", "part"), ("?y", "part"), ("?out", "part"), ("?l", "location"))),
        ),
        functions=(
            FunctionDecl("total-cost"),
            FunctionDecl("pick-cost", (("?a", "agent"), ("?p", "part"), ("?l", "location"))),
            FunctionDecl("place-cost", (("?a", "agent"), ("?p", "part"), ("?l", "location"))),
            FunctionDecl("move-cost", (("?a", "agent"), ("?w", "path"))),
            FunctionDecl("cooperate-cost", (("?h", "human"), ("?r", "robot"), ("?p", "part"),
                                            ("?l", "location"))),
        ),
        actions=actions,
    )


def _knows(cfg: ScenarioConfig, agent: AgentSpec, loc: str) -> bool:
    return cfg.info_reqs.required(agent.id, ActionKind.PLACE, loc) <= agent.known_info


def build_problem(cfg: ScenarioConfig, domain_name: str, costs: Mapping[tuple[str, ...], float]) -> ProblemAst:
    objects = tuple(
        [(a.id, a.kind.value) for a in cfg.agents]
        + [(p.id, "part") for p in cfg.parts]
        + [(loc.id, "location") for loc in cfg.locations]
        + [(p.id, "path") for p in cfg.paths]
    )
    init: list[Atom] = []
    for a in cfg.agents:
        init.append(_a("agent-at", a.id, cfg.starts[a.id]))
        init.append(_a("hand-free", a.id))
    for p in cfg.parts:
        if p.initial_location is not None:
            init.append(_a("at", p.id, p.initial_location))
    for w in cfg.paths:
        init.append(_a("connects", w.id, w.start, w.end))
        init.append(_a("connects", w.id, w.end, w.start))
    for a in cfg.agents:
        for loc in cfg.locations:
            if _knows(cfg, a, loc.id):
                init.append(_a("knows", a.id, loc.id))
    for r in cfg.assemble_rules:
        init.append(_a("recipe", r.inputs[0], r.inputs[1], r.output, r.at))
    init = list(dict.fromkeys(init))
    numeric = [(FluentTerm("total-cost"), 0.0)]
    seen = set()
    for key, v in costs.items():
        if key[0] == "assemble" or not math.isfinite(v):
            continue
        term = _cost_term(key)
        if term not in seen:
            seen.add(term)
            numeric.append((term, float(v)))
    return ProblemAst(f"{cfg.name}-problem", domain_name, objects, tuple(init), tuple(numeric),
                      cfg.goal, "total-cost")


def _cost_term(key: tuple[str, ...]) -> FluentTerm:
    name, *args = key
    if name == "move":
        return FluentTerm("move-cost", (args[0], args[3]))
    return FluentTerm(f"{name}-cost", tuple(args))


def ground_costs(cfg: ScenarioConfig, domain: DomainAst) -> dict[tuple[str, ...], float]:
    """Cost of every schema instantiation; ``inf`` marks an infeasible one."""
    skeleton = build_problem(cfg, domain.name, {})
    coops = {(c.at, frozenset(c.agents)): c for c in cfg.cooperations}
    out: dict[tuple[str, ...], float] = {}
    for schema, args in instantiate(domain, skeleton):
        key = (schema.name, *args)
        if schema.name == "pick":
            a, p, l = args
            out[key] = cfg.solo_cost(a, ActionKind.PICK, l, p)
        elif schema.name == "place":
            a, p, l = args
            # gated on knows(a, l), so the informed cost applies
            out[key] = cfg.solo_cost(a, ActionKind.PLACE, l, p, informed=True)
        elif schema.name == "move":
            a, _, _, w = args
            out[key] = cfg.solo_cost(a, ActionKind.MOVE, w)
        elif schema.name == "assemble":
            out[key] = 0.0
        elif schema.name == "cooperate":
            h, r, p, l = args
            coop = coops.get((l, frozenset((h, r))))
            out[key] = math.inf if coop is None else cfg.cooperative_total(coop, cfg.part(p))
        else:  # pragma: no cover - the domain is built above
            raise ScenarioError("", f"no cost rule for {schema.name}")
    return out


def compile_scenario(cfg: ScenarioConfig) -> CompiledProblem:
    """Cost table, PDDL domain and problem, and the grounded task for ``cfg``."""
    cfg.check_references()
    table = build_cost_table(cfg)
    domain = build_domain(cfg)
    costs = ground_costs(cfg, domain)
    problem = build_problem(cfg, domain.name, costs)
    grounded = ground(domain, problem, costs)
    return CompiledProblem(domain, problem, grounded, table, costs)


compile = compile_scenario  # noqa: A001 - public name of the pipeline step


def builtin_benchmark(cycles: int = 2) -> ScenarioConfig:
    """The two-robot, one-worker assembly cell; ``cycles`` finished parts go to storage_3."""
    if cycles not in (1, 2):
        raise ValueError("cycles must be 1 or 2")
    text = resources.files("collabplan.data").joinpath("benchmark.yaml").read_text(encoding="utf-8")
    cfg = config_from_dict(yaml.safe_load(text))
    return dataclasses.replace(cfg, goal=cfg.goal[:cycles])


def benchmark_text() -> str:
    return resources.files("collabplan.data").joinpath("benchmark.yaml").read_text(encoding="utf-8")
