"""Small random propositional tasks for oracle comparisons."""

from __future__ import annotations

import random

from ..pddl.ast import Atom
from ..pddl.grounding import GroundedOp, GroundedTask


def random_task(rng: random.Random, max_props: int = 12, max_ops: int = 20, max_cost: int = 9,
                neg_prob: float = 0.15, agents: tuple[str, ...] = ("a1", "a2", "a3")) -> GroundedTask:
    """A task with at most ``max_props`` facts and ``max_ops`` ops, integer costs in [0, max_cost].

    Ops are labelled ``(op<i>)`` and tagged with zero to two of ``agents`` so
    agent-mutex ordering gets exercised too.
    """
    n = rng.randint(2, max_props)
    props = tuple(Atom("p", (str(i),)) for i in range(n))
    ops = []
    for i in range(rng.randint(1, max_ops)):
        pre = rng.sample(range(n), rng.randint(0, min(3, n)))
        add = rng.sample(range(n), rng.randint(1, min(3, n)))
        rest = [p for p in range(n) if p not in add]
        delete = rng.sample(rest, rng.randint(0, min(2, len(rest))))
        free = [p for p in range(n) if p not in pre]
        neg = [p for p in free if rng.random() < neg_prob / 2][:2]
        tagged = tuple(sorted(rng.sample(agents, rng.randint(0, min(2, len(agents))))))
        ops.append(GroundedOp(f"op{i:02d}", (), tuple(pre), tuple(add), tuple(delete),
                              float(rng.randint(0, max_cost)), float(rng.randint(1, 5)), tuple(neg), tagged))
    init = frozenset(rng.sample(range(n), rng.randint(0, n // 2)))
    goal = frozenset(rng.sample(range(n), rng.randint(1, min(4, n))))
    return GroundedTask(props, tuple(ops), init, goal)
