import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collabplan.pddl import (
    Atom,
    GroundingError,
    ParseError,
    PlanFormatError,
    TimedPlan,
    TimedStep,
    emit_domain,
    emit_plan,
    emit_problem,
    ground,
    parse_domain,
    parse_plan,
    parse_problem,
)
from collabplan.pddl.sexpr import MAX_DEPTH, read_all

from pddl_gen import mutate, random_domain, random_problem

LOGISTICS = """
; two rooms, one ball
(define (domain Gripper)
  (:requirements :strips :typing :action-costs :negative-preconditions)
  (:types room ball - object)
  (:predicates (at ?b - ball ?r - room) (robby ?r - room) (free) (carry ?b - ball))
  (:functions (total-cost) (move-cost ?from ?to - room))
  (:action MOVE
    :parameters (?from ?to - room)
    :precondition (and (robby ?from) (not (robby ?to)))
    :effect (and (robby ?to) (not (robby ?from)) (increase (total-cost) (move-cost ?from ?to))))
  (:action pick
    :parameters (?b - ball ?r - room)
    :precondition (and (at ?b ?r) (robby ?r) (free))
    :effect (and (carry ?b) (not (at ?b ?r)) (not (free)) (increase (total-cost) 1)))
  (:action drop
    :parameters (?b - ball ?r - room)
    :precondition (and (carry ?b) (robby ?r))
    :effect (and (at ?b ?r) (free) (not (carry ?b)) (increase (total-cost) 1))))
"""

PROBLEM = """
(define (problem p1) (:domain gripper)
  (:objects a b - room ball1 - ball)
  (:init (robby a) (free) (at ball1 a) (= (move-cost a b) 2) (= (move-cost b a) 3) (= (total-cost) 0))
  (:goal (and (at ball1 b)))
  (:metric minimize (total-cost)))
"""


def test_parse_is_case_insensitive_and_skips_comments():
    d = parse_domain(LOGISTICS)
    assert d.name == "gripper"
    assert [a.name for a in d.actions] == ["move", "pick", "drop"]
    move = d.action("move")
    assert move.neg_pre == (Atom("robby", ("?to",)),)


def test_parse_problem_against_domain():
    d = parse_domain(LOGISTICS)
    p = parse_problem(PROBLEM, d)
    assert p.goal == (Atom("at", ("ball1", "b")),)
    assert p.metric == "total-cost"
    assert len(p.numeric_init) == 3


@pytest.mark.parametrize("text, fragment", [
    ("(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) :effect (q ?x)))",
     "undeclared predicate"),
    ("(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) :effect (p ?x ?x)))",
     "wrong arity"),
    ("(define (domain d) (:predicates (p ?x)) (:action a :parameters () :effect (p ?y)))",
     "unbound variable"),
    ("(define (domain d) (:types a - b b - a))", "cycl"),
    ("(define (domain d) (:requirements :adl))", "unknown requirement"),
    ("(define (domain d) (:predicates (p)) (:action a :parameters () :effect (p)) "
     "(:action a :parameters () :effect (p)))", "duplicate"),
    ("(define (domain d)", "unexpected end of input"),
    ("(define (domain d)))", "unbalanced"),
    ("(define (domain d) [)", "unexpected character"),
])
def test_domain_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment) as e:
        parse_domain(text)
    assert e.value.line >= 1 and e.value.col >= 1


def test_error_positions_point_at_the_token():
    text = "(define (domain d)\n  (:predicates (p))\n  (:action a :parameters () :effect (q)))"
    with pytest.raises(ParseError) as e:
        parse_domain(text)
    assert e.value.line == 3


@pytest.mark.parametrize("text, fragment", [
    ("(define (problem p) (:domain gripper) (:objects x - room) (:init) (:goal (and)))", "empty goal"),
    ("(define (problem p) (:domain gripper) (:objects x - room) (:init) (:goal (and (robby zz))))",
     "undeclared object"),
    ("(define (problem p) (:domain gripper) (:objects x - room) (:init) (:goal (not (robby x))))",
     None),
])
def test_problem_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_problem(text, parse_domain(LOGISTICS))


def test_nesting_limit():
    with pytest.raises(ParseError, match="nest"):
        read_all("(" * (MAX_DEPTH + 5) + ")" * (MAX_DEPTH + 5))


def test_invalid_utf8_is_a_positioned_error():
    with pytest.raises(ParseError) as e:
        parse_domain(b"(define (domain d))\n(\xff)")
    assert e.value.line == 2


def test_round_trip_fixed_domain():
    d = parse_domain(LOGISTICS)
    assert parse_domain(emit_domain(d)) == d
    p = parse_problem(PROBLEM, d)
    assert parse_problem(emit_problem(p), d) == p


def test_emit_is_canonical():
    d = parse_domain(LOGISTICS)
    once = emit_domain(d)
    assert emit_domain(parse_domain(once)) == once


def test_durative_actions_collapse():
    text = """(define (domain t) (:requirements :durative-actions)
      (:predicates (p) (q))
      (:functions (total-cost))
      (:durative-action a :parameters () :duration (= ?duration 4)
        :condition (and (at start (p)))
        :effect (and (at start (not (p))) (at end (q)) (at end (increase (total-cost) 2)))))"""
    a = parse_domain(text).action("a")
    assert a.duration == 4.0 and a.cost == 2.0
    assert a.pre == (Atom("p"),) and a.add == (Atom("q"),) and a.delete == (Atom("p"),)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_random_round_trips(seed):
    rng = random.Random(seed)
    d = random_domain(rng)
    p = random_problem(rng, d)
    d2 = parse_domain(emit_domain(d))
    assert d2 == d
    assert parse_problem(emit_problem(p), d2) == p


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9))
def test_mutated_text_fails_cleanly(seed):
    rng = random.Random(seed)
    d = random_domain(rng)
    texts = [("d", emit_domain(d)), ("p", emit_problem(random_problem(rng, d)))]
    kind, text = rng.choice(texts)
    bad = mutate(rng, text)
    try:
        parse_domain(bad) if kind == "d" else parse_problem(bad, d)
    except ParseError as e:
        assert e.line >= 1 and e.col >= 1


# --------------------------------------------------------------------------- grounding

def _gripper_task(**kw):
    d = parse_domain(LOGISTICS)
    return ground(d, parse_problem(PROBLEM, d), **kw)


def test_grounding_prunes_and_costs():
    t = _gripper_task()
    labels = sorted(op.label for op in t.actions)
    # (drop ball1 a) needs carry, reachable; (move a a) is blocked by its negative precondition
    assert "(move a a)" not in labels
    assert t.op("(move a b)").cost == 2.0
    assert t.op("(move b a)").cost == 3.0
    assert t.op(("pick", "ball1", "a")).cost == 1.0


def test_undefined_cost_fluent_drops_the_action():
    d = parse_domain(LOGISTICS)
    p = parse_problem(PROBLEM.replace("(= (move-cost b a) 3)", ""), d)
    t = ground(d, p)
    assert t.find_op("(move b a)") is None
    assert t.find_op("(move a b)") is not None


def test_cost_table_must_cover_every_instantiation():
    d = parse_domain(LOGISTICS)
    p = parse_problem(PROBLEM, d)
    with pytest.raises(GroundingError, match="no entry"):
        ground(d, p, {("move", "a", "b"): 1.0})


def test_infinite_table_costs_drop_actions():
    d = parse_domain(LOGISTICS)
    p = parse_problem(PROBLEM, d)
    from collabplan.pddl.grounding import instantiate
    costs = {(s.name, *args): 1.0 for s, args in instantiate(d, p)}
    costs[("pick", "ball1", "a")] = math.inf
    t = ground(d, p, costs)
    assert t.find_op("(pick ball1 a)") is None


def test_static_facts_vanish_from_the_task():
    text = """(define (domain s) (:predicates (link ?a ?b) (at ?a))
      (:action go :parameters (?a ?b) :precondition (and (at ?a) (link ?a ?b))
        :effect (and (at ?b) (not (at ?a)))))"""
    d = parse_domain(text)
    p = parse_problem("(define (problem q) (:domain s) (:objects x y z) "
                      "(:init (at x) (link x y)) (:goal (and (at y))))", d)
    t = ground(d, p)
    assert all(a.predicate == "at" for a in t.propositions)
    assert [op.label for op in t.actions] == ["(go x y)"]


# --------------------------------------------------------------------------- plan files

def test_plan_round_trip():
    plan = TimedPlan((TimedStep(10.0, "move", ("a", "b"), 10.0), TimedStep(0.0, "pick", ("ball1", "a"), 2.0)))
    text = emit_plan(plan)
    assert text.splitlines()[0] == "0.000: (pick ball1 a) [2.000]"
    assert parse_plan(text) == plan
    assert plan.makespan == 20.0


def test_plan_costs_come_from_the_task():
    t = _gripper_task()
    plan = parse_plan("0: (pick ball1 a) [2]\n2.0: (move a b) [10] ; comment\n", t)
    assert plan.total_cost == 3.0


@pytest.mark.parametrize("text", ["0: pick ball1 a [2]", "x: (pick) [1]", "0: (pick ball1 a)", "0: (p?ck) [1]"])
def test_malformed_plan_lines(text):
    with pytest.raises(PlanFormatError) as e:
        parse_plan("\n" + text)
    assert e.value.line == 2


def test_unknown_plan_action():
    with pytest.raises(PlanFormatError, match="unknown action"):
        parse_plan("0: (fly a b) [1]", _gripper_task())
