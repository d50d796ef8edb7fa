import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collabplan.pddl import Atom, TimedPlan, TimedStep
from collabplan.pddl.grounding import GroundedOp, GroundedTask
from collabplan.planner import (
    BudgetExhausted,
    PlanError,
    Violation,
    apply,
    brute_force_optimal,
    from_mask,
    heuristic,
    lift_and_schedule,
    optimal_cost_to_go,
    partial_order_lift,
    plan_cost,
    plan_search,
    reachable_states,
    schedule,
    sequential_timed_plan,
    simulate,
    validate_plan,
)
from collabplan.planner.lift import INIT
from collabplan.planner.random_tasks import random_task


def _task(n, ops, init, goal):
    props = tuple(Atom("p", (str(i),)) for i in range(n))
    return GroundedTask(props, tuple(ops), frozenset(init), frozenset(goal))


def op(name, pre=(), add=(), delete=(), cost=1.0, duration=1.0, neg=(), agents=()):
    return GroundedOp(name, (), tuple(pre), tuple(add), tuple(delete), cost, duration, tuple(neg), tuple(agents))


# --------------------------------------------------------------------------- search

def test_goal_already_true_gives_empty_plan():
    t = _task(2, [op("a", add=[1])], {0}, {0})
    assert plan_search(t) == []


def test_single_action():
    a = op("a", pre=[0], add=[1], cost=4)
    t = _task(2, [a], {0}, {1})
    assert plan_search(t) == [a]


def test_cheaper_longer_plan_wins():
    direct = op("direct", add=[2], cost=10)
    s1 = op("s1", add=[1], cost=2)
    s2 = op("s2", pre=[1], add=[2], cost=3)
    t = _task(3, [direct, s1, s2], set(), {2})
    assert plan_search(t) == [s1, s2]


def test_unreachable_goal_has_no_plan():
    t = _task(3, [op("a", add=[1])], set(), {2})
    assert heuristic(set(), t) == math.inf
    assert plan_search(t) is None


def test_delete_trap_is_detected_by_search():
    # both facts are relaxed-reachable but each achiever deletes the other fact
    t = _task(2, [op("a", add=[0], delete=[1]), op("b", add=[1], delete=[0])], set(), {0, 1})
    assert heuristic(set(), t) < math.inf
    assert plan_search(t) is None


def test_budget_exhaustion_reports_the_bound():
    rng = random.Random(3)
    t = random_task(rng, max_props=12, max_ops=20)
    while plan_search(t) is None or len(plan_search(t)) < 2:
        t = random_task(rng, max_props=12, max_ops=20)
    with pytest.raises(BudgetExhausted) as e:
        plan_search(t, budget=1)
    assert e.value.expanded == 1
    assert 0 <= e.value.bound <= plan_cost(plan_search(t))


def test_heuristic_of_goal_state_is_zero():
    t = _task(2, [op("a", pre=[0], add=[1], cost=3)], {0}, {1})
    assert heuristic({0, 1}, t) == 0
    assert heuristic({0}, t) == 3


def test_apply_is_idempotent_on_add_effects():
    a = op("a", add=[0])
    s = apply(frozenset(), a)
    assert apply(s, a) == s


def test_apply_rejects_inapplicable_ops():
    with pytest.raises(PlanError):
        apply(frozenset(), op("a", pre=[0]))
    with pytest.raises(PlanError):
        apply(frozenset({1}), op("a", neg=[1]))


def test_simulate_reports_the_failing_step():
    t = _task(2, [], set(), {1})
    with pytest.raises(PlanError, match="step 1"):
        simulate(t, [op("a", add=[0]), op("b", pre=[1])])


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_search_matches_the_brute_force_optimum(seed):
    t = random_task(random.Random(seed), max_props=8, max_ops=12)
    plan = plan_search(t)
    best = brute_force_optimal(t)
    if plan is None:
        assert best == math.inf
    else:
        assert math.isclose(plan_cost(plan), best)
        assert simulate(t, plan) >= t.goal


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_heuristic_never_overestimates(seed):
    t = random_task(random.Random(seed), max_props=7, max_ops=10)
    exact = optimal_cost_to_go(t)
    for m in reachable_states(t, 10**5):
        assert heuristic(from_mask(m), t) <= exact.get(m, math.inf) + 1e-9


def test_reachable_states_limit():
    t = _task(4, [op(f"a{i}", add=[i]) for i in range(4)], set(), {3})
    assert len(reachable_states(t, 100)) == 16
    with pytest.raises(RuntimeError):
        reachable_states(t, 5)


def test_brute_force_node_limit_returns_none():
    t = _task(4, [op(f"a{i}", add=[i]) for i in range(4)], set(), {0, 1, 2, 3})
    assert brute_force_optimal(t, node_limit=2) is None
    assert brute_force_optimal(t) == 4


# --------------------------------------------------------------------------- lift and schedule

def test_independent_steps_are_unordered():
    a, b = op("a", add=[0], duration=5), op("b", add=[1], duration=3)
    t = _task(2, [a, b], set(), {0, 1})
    g, sched, timed = lift_and_schedule([a, b], t)
    assert g.edges == frozenset()
    assert sched.starts == (0.0, 0.0)
    assert sched.makespan == 5.0
    assert validate_plan(t, timed) is None


def test_chain_is_fully_ordered():
    ops = [op("a", add=[0], duration=10), op("b", pre=[0], add=[1], duration=10),
           op("c", pre=[1], add=[2], duration=10)]
    t = _task(3, ops, set(), {2})
    g, sched, _ = lift_and_schedule(ops, t)
    assert {(0, 1), (1, 2)} <= g.edges
    assert sched.starts == (0.0, 10.0, 20.0)
    assert sched.makespan == 30.0


def test_same_agent_steps_stay_ordered():
    pick = op("pick", add=[0], agents=["r"], duration=4)
    move = op("move", add=[1], agents=["r"], duration=2)
    t = _task(2, [pick, move], set(), {0, 1})
    g = partial_order_lift([pick, move], t)
    assert g.edges == {(0, 1)}
    assert g.kinds[(0, 1)] == {"agent"}


def test_threat_is_ordered_after_the_consumer():
    make = op("make", add=[0])
    use = op("use", pre=[0], add=[1])
    spoil = op("spoil", delete=[0], add=[2])
    t = _task(3, [make, use, spoil], set(), {1, 2})
    g = partial_order_lift([make, use, spoil], t)
    assert (1, 2) in g.edges
    link = next(c for c in g.links if c.consumer == 1)
    assert link.producer == 0 and link.prop == 0


def test_goal_links_point_past_the_last_step():
    a = op("a", add=[0])
    t = _task(1, [a], {0}, {0})
    g = partial_order_lift([a], t)
    assert g.edges == frozenset()
    goal_link = g.links[-1]
    assert goal_link.consumer == 1 and goal_link.producer == 0
    assert INIT == -1


def test_lift_rejects_failing_plans():
    t = _task(2, [], set(), {1})
    with pytest.raises(PlanError):
        partial_order_lift([op("a", add=[0])], t)


def test_empty_plan():
    t = _task(1, [], {0}, {0})
    g, sched, timed = lift_and_schedule([], t)
    assert g.n == 0 and sched.makespan == 0.0 and timed.steps == ()
    assert validate_plan(t, timed) is None


def test_schedule_checks_lengths():
    g = partial_order_lift([], _task(1, [], {0}, {0}))
    with pytest.raises(ValueError):
        schedule(g, [1.0])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_lifted_schedule_is_valid_and_no_longer(seed):
    t = random_task(random.Random(seed), max_props=8, max_ops=12)
    plan = plan_search(t)
    if not plan:
        return
    g, sched, timed = lift_and_schedule(plan, t)
    assert validate_plan(t, timed) is None
    assert sched.makespan <= sequential_timed_plan(plan).makespan + 1e-9
    assert timed.total_cost == pytest.approx(plan_cost(plan))
    # any topological order of the lift is itself a valid sequential plan
    reordered = [plan[i] for i in g.topological_order()]
    assert simulate(t, reordered) >= t.goal
    for i, j in g.edges:
        assert sched.starts[j] >= sched.starts[i] + sched.durations[i] - 1e-9


# --------------------------------------------------------------------------- validation

def _chain():
    ops = [op("a", add=[0], agents=["r"], duration=2), op("b", pre=[0], add=[1], agents=["r"], duration=2)]
    return _task(2, ops, set(), {1}), ops


def test_validator_accepts_sequential_plan():
    t, ops = _chain()
    assert validate_plan(t, sequential_timed_plan(ops)) is None


def test_validator_flags_a_deleted_step():
    t, ops = _chain()
    v = validate_plan(t, sequential_timed_plan(ops[1:]))
    assert v == Violation(0, "precondition", "(p 0)")


def test_validator_flags_agent_overlap():
    t, _ = _chain()
    timed = TimedPlan((TimedStep(0, "a", (), 2), TimedStep(1, "b", (), 2)))
    v = validate_plan(t, timed)
    assert v.kind == "agent-overlap" and v.step == 1


def test_step_may_start_exactly_when_its_producer_ends():
    t, _ = _chain()
    timed = TimedPlan((TimedStep(0, "a", (), 2), TimedStep(2, "b", (), 2)))
    assert validate_plan(t, timed) is None


def test_validator_flags_unknown_actions_and_goals():
    t, _ = _chain()
    assert validate_plan(t, TimedPlan((TimedStep(0, "zz", (), 1),))).kind == "unknown-action"
    v = validate_plan(t, TimedPlan((TimedStep(0, "a", (), 2),)))
    assert v.step is None and v.kind == "goal"


def test_violation_json():
    assert Violation(3, "goal", "x").to_json() == '{"detail": "x", "kind": "goal", "step": 3}'
