"""Plan one and two assembly cycles of the built-in cell.

Shows the optimal sequential plan, the partial-order schedule derived
from it, and checks both against the validator and the exhaustive
oracle.
"""

import sys
import time

from collabplan.pddl import emit_plan
from collabplan.planner import (
    brute_force_optimal,
    lift_and_schedule,
    plan_cost,
    plan_search,
    sequential_timed_plan,
    validate_plan,
)
from collabplan.scenario import builtin_benchmark, compile_scenario


def run(cycles):
    cp = compile_scenario(builtin_benchmark(cycles))
    task = cp.grounded
    print(f"== {cycles} cycle(s): {len(task.actions)} ground actions, {task.n_props} facts")

    t0 = time.perf_counter()
    plan = plan_search(task)
    print(f"search: {len(plan)} steps, cost {plan_cost(plan):.4f}, {time.perf_counter() - t0:.2f} s")

    graph, sched, timed = lift_and_schedule(plan, task)
    serial = sequential_timed_plan(plan).makespan
    print(f"schedule: makespan {sched.makespan:g} s (one step at a time: {serial:g} s), "
          f"{len(graph.edges)} ordering constraints")
    print(emit_plan(timed))

    violation = validate_plan(task, timed)
    print("validator:", "ok" if violation is None else violation.to_json())
    print(f"oracle optimum: {brute_force_optimal(task):.4f}\n")


def main(argv):
    for cycles in [int(a) for a in argv] or [1, 2]:
        run(cycles)


if __name__ == "__main__":
    main(sys.argv[1:])
