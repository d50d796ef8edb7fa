"""Canonical pretty-printer for domain and problem ASTs."""

from __future__ import annotations

from .ast import ActionSchema, Atom, DomainAst, FluentTerm, NumExpr, ProblemAst


def _num(v: NumExpr) -> str:
    if isinstance(v, FluentTerm):
        return str(v)
    return repr(float(v))


def _typed(items, indent: str = "") -> str:
    """Group consecutive names sharing a type: ``a b - t c - u``."""
    chunks: list[str] = []
    group: list[str] = []
    current = None
    for name, t in items:
        if group and t != current:
            chunks.append(" ".join(group) + f" - {current}")
            group = []
        group.append(name)
        current = t
    if group:
        chunks.append(" ".join(group) + f" - {current}")
    return (" " if not indent else "\n" + indent).join(chunks)


def _conj(lits: list[str]) -> str:
    if not lits:
        return "(and)"
    return "(and " + " ".join(lits) + ")"


def _action(a: ActionSchema) -> str:
    lines = []
    params = _typed(a.params)
    pre = [str(x) for x in a.pre] + [f"(not {x})" for x in a.neg_pre]
    if a.duration is None:
        eff = [str(x) for x in a.add] + [f"(not {x})" for x in a.delete]
        if a.cost is not None:
            eff.append(f"(increase (total-cost) {_num(a.cost)})")
        lines.append(f"  (:action {a.name}")
        lines.append(f"    :parameters ({params})")
        lines.append(f"    :precondition {_conj(pre)}")
        lines.append(f"    :effect {_conj(eff)})")
    else:
        cond = [f"(at start {x})" for x in pre]
        eff = [f"(at start (not {x}))" for x in a.delete] + [f"(at end {x})" for x in a.add]
        if a.cost is not None:
            eff.append(f"(at end (increase (total-cost) {_num(a.cost)}))")
        lines.append(f"  (:durative-action {a.name}")
        lines.append(f"    :parameters ({params})")
        lines.append(f"    :duration (= ?duration {_num(a.duration)})")
        lines.append(f"    :condition {_conj(cond)}")
        lines.append(f"    :effect {_conj(eff)})")
    return "\n".join(lines)


def emit_domain(ast: DomainAst) -> str:
    out = [f"(define (domain {ast.name})"]
    if ast.requirements:
        out.append("  (:requirements " + " ".join(ast.requirements) + ")")
    if ast.types:
        out.append("  (:types " + _typed(ast.types) + ")")
    if ast.constants:
        out.append("  (:constants " + _typed(ast.constants) + ")")
    if ast.predicates:
        out.append("  (:predicates")
        for p in ast.predicates:
            inner = " ".join([p.name, _typed(p.params)]).strip()
            out.append(f"    ({inner})")
        out[-1] += ")"
    if ast.functions:
        out.append("  (:functions")
        for f in ast.functions:
            inner = " ".join([f.name, _typed(f.params)]).strip()
            out.append(f"    ({inner}) - number")
        out[-1] += ")"
    for a in ast.actions:
        out.append(_action(a))
    out[-1] += ")"
    return "\n".join(out) + "\n"


def _atom(a: Atom) -> str:
    return str(a)


def emit_problem(ast: ProblemAst) -> str:
    out = [f"(define (problem {ast.name})", f"  (:domain {ast.domain_name})"]
    if ast.objects:
        out.append("  (:objects " + _typed(ast.objects) + ")")
    out.append("  (:init")
    for a in ast.init:
        out.append(f"    {_atom(a)}")
    for term, value in ast.numeric_init:
        out.append(f"    (= {term} {_num(value)})")
    out[-1] += ")"
    out.append(f"  (:goal {_conj([_atom(g) for g in ast.goal])})")
    if ast.metric is not None:
        out.append(f"  (:metric minimize ({ast.metric}))")
    out[-1] += ")"
    return "\n".join(out) + "\n"
