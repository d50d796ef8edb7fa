"""PDDL subset: reader, emitter, grounder and timed plan format."""

from .ast import ActionSchema, Atom, DomainAst, FluentTerm, FunctionDecl, Predicate, ProblemAst
from .emit import emit_domain, emit_problem
from .grounding import GroundedOp, GroundedTask, GroundingError, ground, instantiate, static_predicates
from .parser import parse_domain, parse_problem
from .plan import PlanFormatError, TimedPlan, TimedStep, emit_plan, parse_plan
from .sexpr import ParseError

__all__ = [
    "ActionSchema", "Atom", "DomainAst", "FluentTerm", "FunctionDecl", "Predicate", "ProblemAst",
    "emit_domain", "emit_problem", "GroundedOp", "GroundedTask", "GroundingError", "ground",
    "instantiate", "static_predicates", "parse_domain", "parse_problem", "PlanFormatError",
    "TimedPlan", "TimedStep", "emit_plan", "parse_plan", "ParseError",
]
