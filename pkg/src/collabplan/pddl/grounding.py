"""Grounding of typed STRIPS schemas into a propositional task."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .ast import ActionSchema, Atom, DomainAst, FluentTerm, NumExpr, ProblemAst

GroundKey = tuple[str, ...]  # (action name, *args)


class GroundingError(ValueError):
    pass


@dataclass(frozen=True)
class GroundedOp:
    name: str
    args: tuple[str, ...]
    pre: tuple[int, ...]
    add: tuple[int, ...]
    delete: tuple[int, ...]
    cost: float
    duration: float = 1.0
    neg_pre: tuple[int, ...] = ()
    agents: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for f in ("pre", "add", "delete", "neg_pre"):
            v = getattr(self, f)
            object.__setattr__(self, f, tuple(sorted(set(v))))
        if not 0.0 <= self.cost < math.inf:
            raise GroundingError(f"op {self.label}: cost must be finite and non-negative")
        if not self.duration >= 0.0:
            raise GroundingError(f"op {self.label}: negative duration")

    @property
    def key(self) -> GroundKey:
        return (self.name, *self.args)

    @property
    def label(self) -> str:
        return "(" + " ".join(self.key) + ")"


@dataclass(frozen=True)
class GroundedTask:
    propositions: tuple[Atom, ...]
    actions: tuple[GroundedOp, ...]
    init: frozenset[int]
    goal: frozenset[int]
    _index: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        self._index["props"] = {a: i for i, a in enumerate(self.propositions)}
        self._index["ops"] = {op.key: op for op in self.actions}

    def prop(self, atom: Atom | str) -> int:
        if isinstance(atom, str):
            atom = atom_from_label(atom)
        return self._index["props"][atom]

    def has_prop(self, atom: Atom | str) -> bool:
        if isinstance(atom, str):
            atom = atom_from_label(atom)
        return atom in self._index["props"]

    def op(self, key: GroundKey | str) -> GroundedOp:
        if isinstance(key, str):
            key = tuple(key.strip("() ").split())
        return self._index["ops"][tuple(key)]

    def find_op(self, key: GroundKey | str) -> GroundedOp | None:
        try:
            return self.op(key)
        except KeyError:
            return None

    def label(self, p: int) -> str:
        return str(self.propositions[p])

    @property
    def n_props(self) -> int:
        return len(self.propositions)


def atom_from_label(text: str) -> Atom:
    parts = text.strip().strip("()").split()
    return Atom(parts[0], tuple(parts[1:]))


def _objects_by_type(domain: DomainAst, problem: ProblemAst) -> dict[str, list[str]]:
    by_type: dict[str, list[str]] = {}
    parents = domain.type_parents()
    for obj, t in (*domain.constants, *problem.objects):
        seen = set()
        while t and t not in seen:
            seen.add(t)
            by_type.setdefault(t, []).append(obj)
            t = parents.get(t, "")
    for objs in by_type.values():
        objs.sort()
    return by_type


def static_predicates(domain: DomainAst) -> frozenset[str]:
    changed = {a.predicate for s in domain.actions for a in (*s.add, *s.delete)}
    return frozenset(p.name for p in domain.predicates if p.name not in changed)


def _subst(atom: Atom, binding: Mapping[str, str]) -> Atom:
    return Atom(atom.predicate, tuple(binding.get(a, a) for a in atom.args))


def _instantiations(schema: ActionSchema, by_type: dict[str, list[str]], static: frozenset[str],
                    facts: frozenset[Atom]) -> Iterator[tuple[str, ...]]:
    """Type-consistent bindings that satisfy the static preconditions.

    Static literals are checked as soon as all of their variables are bound.
    """
    variables = schema.variables
    checks: list[list[tuple[Atom, bool]]] = [[] for _ in range(max(1, len(variables)))]
    position = {v: i for i, v in enumerate(variables)}
    for atom, positive in [(a, True) for a in schema.pre] + [(a, False) for a in schema.neg_pre]:
        if atom.predicate not in static:
            continue
        idx = [position[a] for a in atom.args if a.startswith("?")]
        checks[max(idx) if idx else 0].append((atom, positive))
    domains = [by_type.get(t, []) for _, t in schema.params]
    if not variables:
        if all((a in facts) == pos for a, pos in checks[0]):
            yield ()
        return
    binding: dict[str, str] = {}

    def rec(i: int) -> Iterator[tuple[str, ...]]:
        if i == len(variables):
            yield tuple(binding[v] for v in variables)
            return
        for obj in domains[i]:
            binding[variables[i]] = obj
            if all((_subst(a, binding) in facts) == pos for a, pos in checks[i]):
                yield from rec(i + 1)
        binding.pop(variables[i], None)

    yield from rec(0)


def instantiate(domain: DomainAst, problem: ProblemAst) -> list[tuple[ActionSchema, tuple[str, ...]]]:
    """All type-consistent instantiations whose static preconditions hold."""
    by_type = _objects_by_type(domain, problem)
    static = static_predicates(domain)
    facts = frozenset(a for a in problem.init if a.predicate in static)
    out = []
    for schema in domain.actions:
        for args in _instantiations(schema, by_type, static, facts):
            out.append((schema, args))
    return out


def _evaluate(expr: NumExpr | None, binding: Mapping[str, str], fluents: Mapping[FluentTerm, float],
              default: float) -> float:
    if expr is None:
        return default
    if isinstance(expr, FluentTerm):
        term = FluentTerm(expr.name, tuple(binding.get(a, a) for a in expr.args))
        # an undefined fluent makes the instantiation inapplicable
        return fluents.get(term, math.inf)
    return float(expr)


def ground(domain: DomainAst, problem: ProblemAst, costs: Mapping[GroundKey, float] | None = None, *,
           agent_type: str = "agent", default_duration: float = 1.0) -> GroundedTask:
    """Build the propositional task.

    With ``costs`` given, every instantiation must have an entry (keyed by
    ``(name, *args)``); otherwise each schema's ``total-cost`` increase is
    evaluated against the problem's numeric facts. Instantiations of infinite
    cost are dropped, static predicates are compiled away, and facts that are
    unreachable or can never become false are pruned.
    """
    fluents = dict(problem.numeric_init)
    static = static_predicates(domain)
    agent_params_by_schema = {
        s.name: [i for i, (_, t) in enumerate(s.params)
                 if any(t2 == agent_type for t2, _ in domain.types) and domain.is_subtype(t, agent_type)]
        for s in domain.actions
    }
    raw = []
    for schema, args in instantiate(domain, problem):
        key = (schema.name, *args)
        binding = dict(zip(schema.variables, args))
        if costs is not None:
            if key not in costs:
                raise GroundingError(f"cost table has no entry for ({' '.join(key)})")
            cost = float(costs[key])
        else:
            cost = _evaluate(schema.cost, binding, fluents, 0.0)
        if math.isinf(cost):
            continue
        if cost < 0 or math.isnan(cost):
            raise GroundingError(f"invalid cost {cost} for ({' '.join(key)})")
        duration = _evaluate(schema.duration, binding, fluents, default_duration)
        if math.isinf(duration):
            continue
        fluent = lambda atoms: frozenset(_subst(a, binding) for a in atoms if a.predicate not in static)
        agents = tuple(args[i] for i in agent_params_by_schema[schema.name])
        raw.append([key, fluent(schema.pre), fluent(schema.neg_pre), fluent(schema.add),
                    fluent(schema.delete), cost, duration, agents])

    init = frozenset(a for a in problem.init if a.predicate not in static)
    goal = frozenset(problem.goal)
    static_facts = frozenset(a for a in problem.init if a.predicate in static)
    for g in goal:
        if g.predicate in static and g not in static_facts:
            return _unsolvable(init, goal)
    goal = frozenset(g for g in goal if g.predicate not in static)

    # relaxed reachability, then drop facts that can never become false
    while True:
        reached = set(init)
        live: list = []
        pending = list(raw)
        progress = True
        while progress:
            progress = False
            rest = []
            for op in pending:
                if op[1] <= reached:
                    live.append(op)
                    if not op[3] <= reached:
                        reached |= op[3]
                    progress = True
                else:
                    rest.append(op)
            pending = rest
        deleted = set().union(*(op[4] for op in live)) if live else set()
        invariant = {a for a in init if a not in deleted}
        before = len(raw)
        raw = [op for op in live if not (op[2] & invariant)]
        if len(raw) == before:
            break
    for op in raw:
        op[1] = op[1] - invariant
        op[2] = op[2] & reached
        op[3] = op[3] - invariant
        op[4] = op[4] & reached
    universe = (reached - invariant) | (goal - invariant)
    props = tuple(sorted(universe, key=lambda a: (a.predicate, a.args)))
    index = {a: i for i, a in enumerate(props)}
    ops = tuple(
        GroundedOp(key[0], tuple(key[1:]), tuple(index[a] for a in pre), tuple(index[a] for a in add),
                   tuple(index[a] for a in dele), cost, duration, tuple(index[a] for a in neg), agents)
        for key, pre, neg, add, dele, cost, duration, agents in sorted(raw, key=lambda r: r[0])
    )
    return GroundedTask(
        props,
        ops,
        frozenset(index[a] for a in init if a in index),
        frozenset(index[a] for a in goal if a in index),
    )


def _unsolvable(init: frozenset[Atom], goal: frozenset[Atom]) -> GroundedTask:
    props = tuple(sorted(init | goal, key=lambda a: (a.predicate, a.args)))
    index = {a: i for i, a in enumerate(props)}
    # a goal that no op can ever reach; static goals that fail stay in the goal set
    return GroundedTask(props, (), frozenset(index[a] for a in init), frozenset(index[a] for a in goal))
