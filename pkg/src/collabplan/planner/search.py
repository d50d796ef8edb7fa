"""Cost-optimal forward search with the h_max delete-relaxation heuristic."""

from __future__ import annotations

import heapq
import math
from typing import Iterable

from ..pddl.grounding import GroundedOp, GroundedTask

State = frozenset  # of proposition indices

DEFAULT_BUDGET = 2_000_000


class BudgetExhausted(RuntimeError):
    """Node-expansion budget ran out; ``bound`` is the best proven lower bound."""

    def __init__(self, expanded: int, bound: float):
        self.expanded = expanded
        self.bound = bound
        super().__init__(f"budget exhausted after {expanded} expansions (optimal cost >= {bound:g})")


class PlanError(ValueError):
    pass


def applicable(s: Iterable[int], op: GroundedOp) -> bool:
    s = s if isinstance(s, (set, frozenset)) else frozenset(s)
    return all(p in s for p in op.pre) and not any(p in s for p in op.neg_pre)


def apply(s: Iterable[int], op: GroundedOp) -> frozenset[int]:
    s = frozenset(s)
    if not applicable(s, op):
        raise PlanError(f"{op.label} is not applicable")
    return (s - frozenset(op.delete)) | frozenset(op.add)


def simulate(task: GroundedTask, plan: Iterable[GroundedOp]) -> frozenset[int]:
    """Apply ``plan`` from the initial state; raises ``PlanError`` on the first failure."""
    s = task.init
    for i, op in enumerate(plan):
        if not applicable(s, op):
            missing = [task.label(p) for p in op.pre if p not in s]
            present = [task.label(p) for p in op.neg_pre if p in s]
            raise PlanError(f"step {i} {op.label}: unmet {missing or present}")
        s = apply(s, op)
    return s


def _mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def to_mask(s: Iterable[int]) -> int:
    return _mask(s)


def from_mask(m: int) -> frozenset[int]:
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return frozenset(out)


class CompiledTask:
    """Bitmask view of a task used by the search loops."""

    def __init__(self, task: GroundedTask):
        self.task = task
        self.ops = task.actions
        self.pre = [_mask(o.pre) for o in self.ops]
        self.neg = [_mask(o.neg_pre) for o in self.ops]
        self.add = [_mask(o.add) for o in self.ops]
        self.keep = [~_mask(o.delete) for o in self.ops]
        self.cost = [o.cost for o in self.ops]
        self.labels = [o.label for o in self.ops]
        self.init = _mask(task.init)
        self.goal = _mask(task.goal)

    def successors(self, s: int):
        pre, neg, add, keep = self.pre, self.neg, self.add, self.keep
        for i in range(len(pre)):
            if s & pre[i] == pre[i] and not s & neg[i]:
                yield i, (s & keep[i]) | add[i]

    def is_goal(self, s: int) -> bool:
        return s & self.goal == self.goal


class HMax:
    """h_max over the cost-annotated delete relaxation (admissible)."""

    def __init__(self, task: GroundedTask):
        self.task = task
        n = task.n_props
        self.n = n
        self.goal = sorted(task.goal)
        self.ops_pre = [op.pre for op in task.actions]
        self.ops_add = [op.add for op in task.actions]
        self.ops_cost = [op.cost for op in task.actions]
        self.pre_of: list[list[int]] = [[] for _ in range(n)]
        for i, pre in enumerate(self.ops_pre):
            for p in pre:
                self.pre_of[p].append(i)
        self.free_ops = [i for i, pre in enumerate(self.ops_pre) if not pre]
        self.n_pre = [len(p) for p in self.ops_pre]
        self.is_goal = [False] * n
        for g in self.goal:
            self.is_goal[g] = True
        self.n_goal = len(self.goal)

    def __call__(self, state: Iterable[int]) -> float:
        if isinstance(state, int):
            state = from_mask(state)
        goal_left = self.n_goal
        if not goal_left:
            return 0.0
        inf = math.inf
        cost = [inf] * self.n
        unsat = self.n_pre[:]
        pre_of, ops_add, ops_cost, is_goal = self.pre_of, self.ops_add, self.ops_cost, self.is_goal
        heap: list[tuple[float, int]] = []
        push, pop = heapq.heappush, heapq.heappop

        for p in state:
            cost[p] = 0.0
        # facts already true cost nothing; settle them before the queue runs
        for p in state:
            if is_goal[p]:
                goal_left -= 1
            for i in pre_of[p]:
                unsat[i] -= 1
                if unsat[i] == 0:
                    v = ops_cost[i]
                    for q in ops_add[i]:
                        if v < cost[q]:
                            cost[q] = v
                            push(heap, (v, q))
        if not goal_left:
            return 0.0
        for i in self.free_ops:
            v = ops_cost[i]
            for q in ops_add[i]:
                if v < cost[q]:
                    cost[q] = v
                    push(heap, (v, q))
        while heap:
            c, p = pop(heap)
            if c > cost[p]:
                continue
            if is_goal[p]:
                goal_left -= 1
                if not goal_left:
                    return c  # pops are non-decreasing, so this is the max
            for i in pre_of[p]:
                unsat[i] -= 1
                if unsat[i] == 0:
                    v = c + ops_cost[i]
                    for q in ops_add[i]:
                        if v < cost[q]:
                            cost[q] = v
                            push(heap, (v, q))
        return inf


def heuristic(s: Iterable[int], task: GroundedTask) -> float:
    return HMax(task)(s)


def plan_search(task: GroundedTask, budget: int = DEFAULT_BUDGET) -> list[GroundedOp] | None:
    """A* on ``f = g + h_max``; returns a cost-optimal op sequence or ``None``.

    Ties break on smaller f, then smaller h, then the lexicographically smallest
    producing action label, then insertion order.
    """
    ct = CompiledTask(task)
    hmax = HMax(task)
    h_cache: dict[int, float] = {}

    def h_of(s: int) -> float:
        v = h_cache.get(s)
        if v is None:
            v = h_cache[s] = hmax(from_mask(s))
        return v

    start = ct.init
    h0 = h_of(start)
    if math.isinf(h0):
        return None
    best_g = {start: 0.0}
    parent: dict[int, tuple[int, int]] = {}
    counter = 0
    heap = [(h0, h0, "", counter, 0.0, start)]
    expanded = 0
    closed: set[int] = set()
    while heap:
        f, h, _, _, g, s = heapq.heappop(heap)
        if g > best_g.get(s, math.inf) or s in closed:
            continue
        if ct.is_goal(s):
            return _extract(ct, parent, s)
        if expanded >= budget:
            raise BudgetExhausted(expanded, f)
        expanded += 1
        closed.add(s)
        for i, ns in ct.successors(s):
            ng = g + ct.cost[i]
            if ng < best_g.get(ns, math.inf):
                nh = h_of(ns)
                if math.isinf(nh):
                    continue
                best_g[ns] = ng
                parent[ns] = (s, i)
                closed.discard(ns)
                counter += 1
                heapq.heappush(heap, (ng + nh, nh, ct.labels[i], counter, ng, ns))
    return None


def _extract(ct: CompiledTask, parent: dict[int, tuple[int, int]], s: int) -> list[GroundedOp]:
    out = []
    while s in parent:
        s, i = parent[s]
        out.append(ct.ops[i])
    out.reverse()
    return out


def plan_cost(plan: Iterable[GroundedOp]) -> float:
    return math.fsum(op.cost for op in plan)
