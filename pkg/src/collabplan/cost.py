"""Per-agent action costs: feasibility gates, reachability, safety, cooperation.

Costs live on the extended non-negative reals and are plain floats here;
``math.inf`` marks an infeasible assignment and absorbs any finite addend.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from .model import (
    ActionKind,
    AgentKind,
    AgentSpec,
    GroundAction,
    PartSpec,
    Point3,
    Region,
    Trajectory,
    region_contains,
    trajectory_intersects,
)

if TYPE_CHECKING:
    from .scenario import ScenarioConfig

INF = math.inf

MOST_SUITABLE_ABOVE = 60.0
UNSUITABLE_AT_OR_BELOW = 20.0

CSV_HEADER = ["agent", "action", "param", "f_s", "f_i", "f_r", "r_r", "c_i", "c_s", "total"]


class CostError(ValueError):
    pass


@dataclass(frozen=True)
class CostGains:
    """Gains of the cost model.

    ``c_k`` maps ``(AgentKind, ActionKind)`` to the risk gain; missing entries
    count as zero risk.
    """

    c_k: Mapping[tuple[AgentKind, ActionKind], float] = field(default_factory=dict, hash=False)
    k_c: float = 0.0
    c_h: float = 0.0
    c_r: float = 0.0

    def __post_init__(self) -> None:
        values = [self.k_c, self.c_h, self.c_r, *self.c_k.values()]
        if any(not v >= 0 for v in values):
            raise CostError("gains must be non-negative")

    def risk(self, agent_kind: AgentKind, action: ActionKind) -> float:
        return float(self.c_k.get((agent_kind, action), 0.0))


@dataclass(frozen=True)
class InfoRequirements:
    """Information a robot needs before it may perform an action somewhere."""

    table: Mapping[tuple[str, ActionKind, str], frozenset[str]] = field(default_factory=dict, hash=False)

    def required(self, agent_id: str, kind: ActionKind, at: str) -> frozenset[str]:
        return self.table.get((agent_id, kind, at), frozenset())

    def entries(self):
        return sorted(self.table.items(), key=lambda kv: (kv[0][0], kv[0][1].value, kv[0][2]))


@dataclass(frozen=True)
class CostBreakdown:
    """Components of one agent's cost; ``None`` marks a term left unevaluated
    because a feasibility gate is already infinite."""

    f_s: float
    f_i: float
    f_r: float
    r_r: float | None = None
    c_i: float | None = None
    c_s: float | None = None

    def components(self) -> tuple[float | None, ...]:
        return (self.f_s, self.f_i, self.f_r, self.r_r, self.c_i, self.c_s)

    @property
    def feasibility(self) -> float:
        return self.f_s + self.f_i + self.f_r

    @property
    def total(self) -> float:
        return 1.0 + sum(c for c in self.components() if c is not None)


@dataclass(frozen=True)
class CostContext:
    """Everything the cost of one agent/action pair depends on besides the agent."""

    gains: CostGains
    target: Point3
    part: PartSpec | None = None
    reach_d: float | None = None
    safety_d: float = 0.0
    worker_trajectory: Trajectory | None = None
    robot_ranges: tuple[Region, ...] = ()
    required_info: frozenset[str] = frozenset()
    known_info: frozenset[str] | None = None
    double_count_ci: bool = False


def strength_criterion(agent: AgentSpec, part: PartSpec) -> float:
    return 1.0 - part.weight_kg / agent.strength_limit_kg


def strength_cost(agent: AgentSpec, part: PartSpec | None) -> float:
    if part is None:
        return 0.0
    # zero margin counts as infeasible
    return 0.0 if strength_criterion(agent, part) > 0 else INF


def information_cost(agent: AgentSpec, action: GroundAction | None = None,
                     reqs: InfoRequirements | None = None, *,
                     required: Iterable[str] | None = None,
                     known: Iterable[str] | None = None) -> float:
    """Zero when the robot already knows everything the action requires."""
    if agent.is_human:
        return 0.0
    if required is None:
        if action is None or reqs is None:
            required = frozenset()
        else:
            required = reqs.required(agent.id, action.kind, action.at)
    have = agent.known_info if known is None else frozenset(known)
    return 0.0 if frozenset(required) <= have else INF


def flexibility_cost(agent: AgentSpec, target: Point3) -> float:
    if agent.is_human:
        return 0.0
    assert agent.range is not None
    return 0.0 if region_contains(agent.range, target) else INF


def reachability_cost(agent: AgentSpec, d: float | None) -> float:
    if agent.is_human:
        return 0.0
    if d is None or not 0.0 <= d <= 100.0:
        raise CostError(f"reachability index for {agent.id} must lie in [0, 100], got {d}")
    if d > MOST_SUITABLE_ABOVE:
        return 0.0
    if d > UNSUITABLE_AT_OR_BELOW:
        return 1.0 - d / 100.0
    if d == 0.0:
        return INF
    return 100.0 / d


def intersection_coefficient(worker_traj: Trajectory | Point3, robot_ranges: Sequence[Region],
                             k_c: float) -> float:
    if isinstance(worker_traj, Point3):
        hit = any(region_contains(r, worker_traj) for r in robot_ranges)
    else:
        hit = any(trajectory_intersects(worker_traj, r) for r in robot_ranges)
    return k_c if hit else 0.0


def safety_cost(agent: AgentSpec, kind: ActionKind, d: float, c_i: float, gains: CostGains) -> float:
    if not 0.0 <= d <= 100.0:
        raise CostError(f"activity index must lie in [0, 100], got {d}")
    c_k = gains.risk(agent.kind, kind)
    if agent.is_robot:
        return (1.0 + c_k) * d / 100.0
    return (c_i + c_k) * d / 100.0


def _worker_path(agent: AgentSpec, ctx: CostContext) -> Trajectory | Point3:
    if ctx.worker_trajectory is not None:
        return ctx.worker_trajectory
    if agent.base == ctx.target:
        return ctx.target
    return Trajectory((agent.base, ctx.target))


def agent_action_cost(agent: AgentSpec, kind: ActionKind, ctx: CostContext) -> CostBreakdown:
    """Cost of ``agent`` doing ``kind`` alone.

    The intersection coefficient already enters the human safety term, so the
    standalone term is zero unless ``ctx.double_count_ci`` is set.
    """
    f_s = strength_cost(agent, ctx.part)
    f_i = information_cost(agent, required=ctx.required_info, known=ctx.known_info)
    f_r = flexibility_cost(agent, ctx.target)
    if math.isinf(f_s) or math.isinf(f_r):
        return CostBreakdown(f_s, f_i, f_r)
    r_r = reachability_cost(agent, ctx.reach_d)
    coeff = 0.0
    if agent.is_human:
        coeff = intersection_coefficient(_worker_path(agent, ctx), ctx.robot_ranges, ctx.gains.k_c)
    c_s = safety_cost(agent, kind, ctx.safety_d, coeff, ctx.gains)
    c_i = coeff if ctx.double_count_ci else 0.0
    return CostBreakdown(f_s, f_i, f_r, r_r, c_i, c_s)


def _coop_coeff(agent: AgentSpec, gains: CostGains) -> float:
    if agent.coop_coeff is not None:
        return agent.coop_coeff
    return gains.c_h if agent.is_human else gains.c_r


def cooperation_criterion(agents: Sequence[AgentSpec], gains: CostGains, n: int | None = None) -> float:
    if not agents:
        raise CostError("cooperation needs at least one agent")
    n = len(agents) if n is None else n
    if n < 1:
        raise CostError("number of agents must be >= 1")
    humans = [_coop_coeff(a, gains) for a in agents if a.is_human]
    robots = [_coop_coeff(a, gains) for a in agents if a.is_robot]
    if not robots:
        coeff = sum(humans) / len(humans)
    elif not humans:
        coeff = sum(robots) / len(robots)
    else:
        coeff = (sum(humans) / len(humans) + sum(robots) / len(robots)) / 2.0
    return (1.0 + coeff) ** (n - 1)


def cooperative_cost(agents: Sequence[AgentSpec], kind: ActionKind,
                     contexts: Sequence[CostContext], gains: CostGains) -> float:
    """Cooperation-weighted mean of the participants' solo costs.

    A participant that already has the information shares it, so missing
    information is excused for everyone as long as one member has none missing.
    """
    if len(agents) != len(contexts):
        raise CostError("one context per agent required")
    solos = [agent_action_cost(a, kind, c) for a, c in zip(agents, contexts)]
    shared = any(b.f_i == 0.0 for b in solos)
    totals = [_without_info(b) if shared else b.total for b in solos]
    return cooperation_criterion(agents, gains) * sum(totals) / len(totals)


def _without_info(b: CostBreakdown) -> float:
    return CostBreakdown(b.f_s, 0.0, b.f_r, b.r_r, b.c_i, b.c_s).total


# --------------------------------------------------------------------------- tables


@dataclass(frozen=True)
class CostRow:
    agent: str
    kind: ActionKind
    param: str
    total: float
    breakdown: CostBreakdown | None = None
    phase: str | None = None  # "before"/"after" for information-gated rows
    part: str | None = None

    def cells(self) -> list[str]:
        comps = self.breakdown.components() if self.breakdown else (None,) * 6
        return [self.agent, self.kind.value, self.param, *(_fmt(c) for c in comps), _fmt(self.total)]

    def to_dict(self) -> dict:
        comps = self.breakdown.components() if self.breakdown else (None,) * 6
        d = {"agent": self.agent, "action": self.kind.value, "param": self.param}
        d.update({k: _json_num(c) for k, c in zip(CSV_HEADER[3:9], comps)})
        d["total"] = _json_num(self.total)
        d["phase"] = self.phase
        d["part"] = self.part
        return d


def _fmt(v: float | None) -> str:
    if v is None:
        return ""
    if math.isinf(v):
        return "inf"
    return f"{v:.6g}"


def _json_num(v: float | None):
    if v is None:
        return None
    return "inf" if math.isinf(v) else v


@dataclass(frozen=True)
class CostTable:
    rows: tuple[CostRow, ...]

    def __iter__(self):
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def find(self, agent: str, kind: ActionKind, param: str, phase: str | None = None) -> list[CostRow]:
        return [
            r for r in self.rows
            if r.agent == agent and r.kind is kind and r.param == param
            and (phase is None or r.phase in (None, phase))
        ]

    def total(self, agent: str, kind: ActionKind, param: str, phase: str = "after") -> float:
        rows = self.find(agent, kind, param, phase)
        if len(rows) != 1:
            raise KeyError(f"no unique cost row for {agent} {kind.value} {param} ({phase})")
        return rows[0].total

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow(r.cells())
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps([r.to_dict() for r in self.rows], indent=1)


def build_cost_table(cfg: ScenarioConfig) -> CostTable:
    """Every (agent, action kind, location or path) combination plus the
    declared cooperations. Information-gated rows appear twice, before and
    after the missing information has been supplied."""
    cfg.check_references()
    rows: list[CostRow] = []
    for agent in cfg.agents:
        for kind in (ActionKind.PICK, ActionKind.PLACE):
            for loc in cfg.locations:
                rows.extend(_rows_for(cfg, agent, kind, loc.id, cfg.parts or [None]))
        for path in cfg.paths:
            rows.extend(_rows_for(cfg, agent, ActionKind.MOVE, path.id, [None]))
    for coop in cfg.cooperations:
        rows.extend(_coop_rows(cfg, coop))
    return CostTable(tuple(rows))


def _rows_for(cfg: ScenarioConfig, agent: AgentSpec, kind: ActionKind, place: str,
              parts: Sequence[PartSpec | None]) -> list[CostRow]:
    required = cfg.info_reqs.required(agent.id, kind, place)
    gated = agent.is_robot and not required <= agent.known_info
    phases = [("before", None), ("after", required | agent.known_info)] if gated else [(None, None)]
    by_part = _split_by_strength(agent, parts)
    out = []
    for phase, known in phases:
        for part, label in by_part:
            ctx = cfg.cost_context(agent, kind, place, part, known_info=known)
            b = agent_action_cost(agent, kind, ctx)
            param = place if label is None else f"{place}:{label}"
            out.append(CostRow(agent.id, kind, param, b.total, b, phase, label))
    return out


def _split_by_strength(agent: AgentSpec, parts: Sequence[PartSpec | None]):
    """One representative per row unless parts disagree on the strength gate."""
    gates = {strength_cost(agent, p) for p in parts}
    if len(gates) <= 1:
        heaviest = max(parts, key=lambda p: p.weight_kg if p else 0.0)
        return [(heaviest, None)]
    return [(p, p.id if p else None) for p in parts]


def _coop_rows(cfg: ScenarioConfig, coop) -> list[CostRow]:
    agents = [cfg.agent(a) for a in coop.agents]
    parts = cfg.parts or [None]
    gates = {tuple(strength_cost(a, p) for a in agents) for p in parts}
    choices = [(max(parts, key=lambda p: p.weight_kg if p else 0.0), None)] if len(gates) <= 1 \
        else [(p, p.id if p else None) for p in parts]
    out = []
    for part, label in choices:
        total = cfg.cooperative_total(coop, part)
        param = coop.at if label is None else f"{coop.at}:{label}"
        out.append(CostRow("+".join(coop.agents), ActionKind.COOPERATE, param, total, None, None, label))
    return out
