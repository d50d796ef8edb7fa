"""Exhaustive reference solvers used to check the planner."""

from __future__ import annotations

import heapq
import math
from collections import deque

from ..pddl.grounding import GroundedTask
from .search import CompiledTask

DEFAULT_NODE_LIMIT = 1_000_000


def brute_force_optimal(task: GroundedTask, node_limit: int = DEFAULT_NODE_LIMIT) -> float | None:
    """Uniform-cost enumeration with duplicate elimination.

    Returns the optimal plan cost, ``math.inf`` when the whole reachable space
    was exhausted without meeting the goal, or ``None`` when ``node_limit``
    expansions did not settle the question.
    """
    ct = CompiledTask(task)
    best = {ct.init: 0.0}
    parent: dict[int, tuple[int, int]] = {}
    heap = [(0.0, ct.init)]
    expanded = 0
    while heap:
        g, s = heapq.heappop(heap)
        if g > best[s]:
            continue
        if ct.is_goal(s):
            # re-add along the path so the total matches math.fsum over the plan
            costs = []
            while s in parent:
                s, i = parent[s]
                costs.append(ct.cost[i])
            return math.fsum(costs)
        if expanded >= node_limit:
            return None
        expanded += 1
        for i, ns in ct.successors(s):
            ng = g + ct.cost[i]
            if ng < best.get(ns, math.inf):
                best[ns] = ng
                parent[ns] = (s, i)
                heapq.heappush(heap, (ng, ns))
    return math.inf


def reachable_states(task: GroundedTask, node_limit: int = DEFAULT_NODE_LIMIT) -> list[int]:
    """Bitmasks of every state reachable from the initial state."""
    ct = CompiledTask(task)
    seen = {ct.init}
    queue = deque([ct.init])
    while queue:
        s = queue.popleft()
        for _, ns in ct.successors(s):
            if ns not in seen:
                if len(seen) >= node_limit:
                    raise RuntimeError("state space exceeds node limit")
                seen.add(ns)
                queue.append(ns)
    return sorted(seen)


def optimal_cost_to_go(task: GroundedTask, node_limit: int = DEFAULT_NODE_LIMIT) -> dict[int, float]:
    """Exact remaining cost (``inf`` for dead ends) for every reachable state."""
    ct = CompiledTask(task)
    states = reachable_states(task, node_limit)
    reverse: dict[int, list[tuple[int, float]]] = {s: [] for s in states}
    for s in states:
        for i, ns in ct.successors(s):
            reverse[ns].append((s, ct.cost[i]))
    dist = {s: math.inf for s in states}
    heap = []
    for s in states:
        if ct.is_goal(s):
            dist[s] = 0.0
            heap.append((0.0, s))
    heapq.heapify(heap)
    while heap:
        d, s = heapq.heappop(heap)
        if d > dist[s]:
            continue
        for prev, c in reverse[s]:
            if d + c < dist[prev]:
                dist[prev] = d + c
                heapq.heappush(heap, (d + c, prev))
    return dist
