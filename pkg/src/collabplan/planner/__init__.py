"""Cost-optimal search, partial-order lift, scheduling and validation."""

from .lift import (CausalLink, PrecedenceGraph, Schedule, lift_and_schedule, partial_order_lift, schedule,
                   sequential_timed_plan, timed_plan)
from .oracle import brute_force_optimal, optimal_cost_to_go, reachable_states
from .search import (BudgetExhausted, HMax, PlanError, applicable, apply, from_mask, heuristic, plan_cost,
                     plan_search, simulate, to_mask)
from .validate import Violation, validate_plan

__all__ = [
    "CausalLink", "PrecedenceGraph", "Schedule", "lift_and_schedule", "partial_order_lift", "schedule",
    "sequential_timed_plan", "timed_plan", "brute_force_optimal", "optimal_cost_to_go", "reachable_states",
    "BudgetExhausted", "HMax", "PlanError", "applicable", "apply", "from_mask", "heuristic", "plan_cost",
    "plan_search", "simulate", "to_mask", "Violation", "validate_plan",
]
