"""Abstract syntax for domains and problems in the supported PDDL subset."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

TypedList = tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return "(" + " ".join((self.predicate, *self.args)) + ")"


@dataclass(frozen=True)
class FluentTerm:
    name: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return "(" + " ".join((self.name, *self.args)) + ")"


NumExpr = Union[float, FluentTerm]


@dataclass(frozen=True)
class Predicate:
    name: str
    params: TypedList = ()


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    params: TypedList = ()


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: TypedList = ()
    pre: tuple[Atom, ...] = ()
    neg_pre: tuple[Atom, ...] = ()
    add: tuple[Atom, ...] = ()
    delete: tuple[Atom, ...] = ()
    cost: NumExpr | None = None
    duration: NumExpr | None = None

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.params)


@dataclass(frozen=True)
class DomainAst:
    name: str
    requirements: tuple[str, ...] = ()
    types: TypedList = ()
    constants: TypedList = ()
    predicates: tuple[Predicate, ...] = ()
    functions: tuple[FunctionDecl, ...] = ()
    actions: tuple[ActionSchema, ...] = ()

    def type_parents(self) -> dict[str, str]:
        parents = {"object": ""}
        for t, p in self.types:
            parents[t] = p
        return parents

    def is_subtype(self, t: str, ancestor: str) -> bool:
        parents = self.type_parents()
        seen = set()
        while t and t not in seen:
            if t == ancestor:
                return True
            seen.add(t)
            t = parents.get(t, "")
        return False

    def action(self, name: str) -> ActionSchema:
        for a in self.actions:
            if a.name == name:
                return a
        raise KeyError(name)


@dataclass(frozen=True)
class ProblemAst:
    name: str
    domain_name: str
    objects: TypedList = ()
    init: tuple[Atom, ...] = ()
    numeric_init: tuple[tuple[FluentTerm, float], ...] = ()
    goal: tuple[Atom, ...] = ()
    metric: str | None = None
