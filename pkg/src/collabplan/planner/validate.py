"""Independent simulation of a timed plan against a grounded task."""

from __future__ import annotations

import heapq
import json
from dataclasses import asdict, dataclass

from ..pddl.grounding import GroundedTask
from ..pddl.plan import TimedPlan


@dataclass(frozen=True)
class Violation:
    step: int | None  # None for goal failures
    kind: str  # agent-overlap | precondition | negative-precondition | goal | unknown-action
    detail: str

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def validate_plan(task: GroundedTask, timed: TimedPlan) -> Violation | None:
    """Return the first violation, or ``None`` when the plan is valid.

    Effects take hold when a step finishes. A step's conditions are checked at
    its start against everything finished so far; steps finishing at the same
    instant are applied before the start.
    """
    steps = timed.steps
    ops = []
    for i, st in enumerate(steps):
        op = task.find_op(st.key)
        if op is None:
            return Violation(i, "unknown-action", st.label)
        ops.append(op)

    state = set(task.init)
    running: list[tuple[float, int]] = []
    busy: dict[str, int] = {}

    def finish() -> None:
        _, k = heapq.heappop(running)
        op = ops[k]
        state.difference_update(op.delete)
        state.update(op.add)
        for a in op.agents:
            if busy.get(a) == k:
                del busy[a]

    for i, st in enumerate(steps):
        while running and running[0][0] <= st.start:
            finish()
        op = ops[i]
        for a in op.agents:
            if a in busy:
                other = steps[busy[a]]
                return Violation(i, "agent-overlap", f"{a}: {other.label} overlaps {st.label}")
        for p in op.pre:
            if p not in state:
                return Violation(i, "precondition", task.label(p))
        for p in op.neg_pre:
            if p in state:
                return Violation(i, "negative-precondition", task.label(p))
        for a in op.agents:
            busy[a] = i
        heapq.heappush(running, (st.end, i))
    while running:
        finish()
    missing = [task.label(g) for g in sorted(task.goal) if g not in state]
    if missing:
        return Violation(None, "goal", " ".join(missing))
    return None
