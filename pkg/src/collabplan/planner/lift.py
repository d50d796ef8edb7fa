"""Partial-order lift of a sequential plan and earliest-start scheduling."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..pddl.grounding import GroundedOp, GroundedTask
from ..pddl.plan import TimedPlan, TimedStep
from .search import PlanError, simulate

INIT = -1  # producer index standing for the initial state


@dataclass(frozen=True)
class CausalLink:
    """``producer`` establishes literal ``prop`` (negated when ``positive`` is false) for ``consumer``.

    ``consumer == len(plan)`` marks the goal.
    """

    producer: int
    consumer: int
    prop: int
    positive: bool = True


@dataclass(frozen=True)
class PrecedenceGraph:
    n: int
    edges: frozenset[tuple[int, int]]
    links: tuple[CausalLink, ...] = ()
    kinds: dict = field(default_factory=dict, compare=False, hash=False)

    def predecessors(self, j: int) -> list[int]:
        return sorted(i for i, k in self.edges if k == j)

    def successors(self, i: int) -> list[int]:
        return sorted(k for j, k in self.edges if j == i)

    def topological_order(self) -> list[int]:
        indeg = [0] * self.n
        out: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            out[i].append(j)
            indeg[j] += 1
        ready = deque(i for i in range(self.n) if indeg[i] == 0)
        order = []
        while ready:
            i = ready.popleft()
            order.append(i)
            for j in sorted(out[i]):
                indeg[j] -= 1
                if indeg[j] == 0:
                    ready.append(j)
        if len(order) != self.n:
            raise PlanError("precedence graph has a cycle")
        return order


def partial_order_lift(plan: Sequence[GroundedOp], task: GroundedTask) -> PrecedenceGraph:
    """Causal links, threat orderings and agent-mutex orderings for ``plan``.

    Every edge points from an earlier to a later sequential position, so the
    graph is acyclic by construction.
    """
    final = simulate(task, plan)
    if not task.goal <= final:
        raise PlanError("plan does not reach the goal")
    n = len(plan)
    edges: set[tuple[int, int]] = set()
    kinds: dict[tuple[int, int], set[str]] = {}

    def edge(i: int, j: int, kind: str) -> None:
        if i == INIT or i == j or j >= n:
            return
        edges.add((i, j))
        kinds.setdefault((i, j), set()).add(kind)

    def makes_true(op: GroundedOp, p: int) -> bool:
        return p in op.add

    def makes_false(op: GroundedOp, p: int) -> bool:
        return p in op.delete and p not in op.add

    links = []
    requirements = [(j, p, True) for j, op in enumerate(plan) for p in op.pre]
    requirements += [(j, p, False) for j, op in enumerate(plan) for p in op.neg_pre]
    requirements += [(n, p, True) for p in sorted(task.goal)]
    for j, p, positive in requirements:
        achieves = makes_true if positive else makes_false
        threatens = makes_false if positive else makes_true
        producer = INIT
        for i in range(j - 1, -1, -1):
            if achieves(plan[i], p):
                producer = i
                break
        links.append(CausalLink(producer, j, p, positive))
        edge(producer, j, "causal")
        for k, op in enumerate(plan):
            if k == j or not threatens(op, p):
                continue
            if k < producer:
                edge(k, producer, "threat")
            elif k > j:
                edge(j, k, "threat")

    last_by_agent: dict[str, int] = {}
    for j, op in enumerate(plan):
        for a in op.agents:
            if a in last_by_agent:
                edge(last_by_agent[a], j, "agent")
            last_by_agent[a] = j
    return PrecedenceGraph(n, frozenset(edges), tuple(links),
                           {k: frozenset(v) for k, v in kinds.items()})


@dataclass(frozen=True)
class Schedule:
    starts: tuple[float, ...]
    durations: tuple[float, ...]

    @property
    def makespan(self) -> float:
        return max((s + d for s, d in zip(self.starts, self.durations)), default=0.0)


def schedule(graph: PrecedenceGraph, durations: Sequence[float]) -> Schedule:
    """Earliest start times: each step begins when its last predecessor finishes."""
    if len(durations) != graph.n:
        raise ValueError("one duration per step is required")
    preds: list[list[int]] = [[] for _ in range(graph.n)]
    for i, j in graph.edges:
        preds[j].append(i)
    starts = [0.0] * graph.n
    for j in graph.topological_order():
        starts[j] = max((starts[i] + durations[i] for i in preds[j]), default=0.0)
    return Schedule(tuple(starts), tuple(float(d) for d in durations))


def timed_plan(plan: Sequence[GroundedOp], sched: Schedule) -> TimedPlan:
    steps = [TimedStep(s, op.name, op.args, d, op.cost)
             for op, s, d in zip(plan, sched.starts, sched.durations)]
    # stable sort on start keeps sequential order among simultaneous steps
    return TimedPlan(tuple(steps))


def sequential_timed_plan(plan: Iterable[GroundedOp]) -> TimedPlan:
    """One step after another, no overlap."""
    t = 0.0
    steps = []
    for op in plan:
        steps.append(TimedStep(t, op.name, op.args, op.duration, op.cost))
        t += op.duration
    return TimedPlan(tuple(steps))


def lift_and_schedule(plan: Sequence[GroundedOp], task: GroundedTask) -> tuple[PrecedenceGraph, Schedule, TimedPlan]:
    graph = partial_order_lift(plan, task)
    sched = schedule(graph, [op.duration for op in plan])
    return graph, sched, timed_plan(plan, sched)
