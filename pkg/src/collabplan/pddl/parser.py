"""Parsers for domain and problem files.

Grammar (keywords case-insensitive, ``;`` comments)::

    domain  := (define (domain NAME) (:requirements FLAG*)? (:types TYPED*)?
                (:constants TYPED*)? (:predicates PRED*)? (:functions FN*)? ACTION*)
    ACTION  := (:action NAME :parameters (TYPED-VARS) [:precondition CONJ] [:effect EFF])
             | (:durative-action NAME :parameters (TYPED-VARS) :duration (= ?duration EXPR)
                [:condition TIMED-CONJ] [:effect TIMED-EFF])
    problem := (define (problem NAME) (:domain NAME) (:objects TYPED*)?
                (:init FACT*) (:goal CONJ) (:metric minimize (total-cost))?)
"""

from __future__ import annotations

import re

from .ast import ActionSchema, Atom, DomainAst, FluentTerm, FunctionDecl, NumExpr, Predicate, ProblemAst
from .sexpr import ParseError, SList, Sym, is_number, read_all

REQUIREMENTS = frozenset({
    ":strips", ":typing", ":negative-preconditions", ":action-costs",
    ":durative-actions", ":numeric-fluents", ":fluents", ":equality",
})

_NAME_RE = re.compile(r"[a-z][a-z0-9_\-]*\Z")
_VAR_RE = re.compile(r"\?[a-z][a-z0-9_\-]*\Z")


def _pos(node) -> tuple[int, int]:
    return node.line, node.col


def _err(msg: str, node, token: str | None = None) -> ParseError:
    if token is None and isinstance(node, Sym):
        token = node.text
    return ParseError(msg, node.line, node.col, token)


def _list(node, what: str) -> SList:
    if not isinstance(node, SList):
        raise _err(f"expected {what}", node)
    return node


def _sym(node, what: str) -> str:
    if not isinstance(node, Sym):
        raise _err(f"expected {what}", node, "(")
    return node.text


def _name(node, what: str = "name") -> str:
    text = _sym(node, what)
    if not _NAME_RE.match(text):
        raise _err(f"bad {what}", node)
    return text


def _var(node) -> str:
    text = _sym(node, "variable")
    if not _VAR_RE.match(text):
        raise _err("bad variable", node)
    return text


def _typed_list(items, *, variables: bool) -> tuple[tuple[str, str], ...]:
    out: list[tuple[str, str]] = []
    pending: list[str] = []
    i = 0
    while i < len(items):
        node = items[i]
        if isinstance(node, Sym) and node.text == "-":
            if not pending:
                raise _err("type without names", node)
            if i + 1 >= len(items):
                raise _err("missing type after '-'", node)
            t = _name(items[i + 1], "type name")
            out.extend((p, t) for p in pending)
            pending = []
            i += 2
            continue
        pending.append(_var(node) if variables else _name(node))
        i += 1
    out.extend((p, "object") for p in pending)
    return tuple(out)


def _typed_nodes(items) -> dict[str, object]:
    # remember where each declared type was mentioned, for error positions
    where: dict[str, object] = {}
    for i, node in enumerate(items):
        if isinstance(node, Sym) and node.text == "-" and i + 1 < len(items):
            where.setdefault(items[i + 1].text if isinstance(items[i + 1], Sym) else "", items[i + 1])
    return where


def _atom_args(node: SList, what: str) -> Atom:
    if len(node) == 0:
        raise _err(f"empty {what}", node, "()")
    pred = _name(node[0], "predicate name")
    args = []
    for a in node.items[1:]:
        text = _sym(a, "term")
        if not (_NAME_RE.match(text) or _VAR_RE.match(text)):
            raise _err("bad term", a)
        args.append(text)
    return Atom(pred, tuple(args))


def _conjunction(node, *, allow_negative: bool) -> tuple[list[Atom], list[Atom], list]:
    """Flatten an ``(and ...)`` of literals; returns (positive, negative, nodes)."""
    node = _list(node, "condition")
    parts = node.items[1:] if node.head() == "and" else (node,)
    pos: list[Atom] = []
    neg: list[Atom] = []
    nodes: list = []
    for lit in parts:
        lit = _list(lit, "literal")
        if lit.head() == "not":
            if not allow_negative:
                raise _err("negative literal not allowed here", lit, "not")
            if len(lit) != 2:
                raise _err("'not' takes one atom", lit, "not")
            neg.append(_atom_args(_list(lit[1], "atom"), "atom"))
            nodes.append(lit[1])
        elif lit.head() in ("and", "or", "imply", "forall", "exists", "when"):
            raise _err("unsupported connective", lit, lit.head())
        else:
            pos.append(_atom_args(lit, "atom"))
            nodes.append(lit)
    return pos, neg, nodes


def _num_expr(node) -> NumExpr:
    if isinstance(node, Sym):
        if not is_number(node.text):
            raise _err("expected number", node)
        value = float(node.text)
        if value != value or value in (float("inf"), float("-inf")):
            raise _err("non-finite number", node)
        return value
    node = _list(node, "numeric expression")
    if len(node) == 0:
        raise _err("empty numeric expression", node, "()")
    name = _name(node[0], "function name")
    args = tuple(_sym(a, "term") for a in node.items[1:])
    for a, n in zip(args, node.items[1:]):
        if not (_NAME_RE.match(a) or _VAR_RE.match(a)):
            raise _err("bad term", n)
    return FluentTerm(name, args)


def _effects(items, schema: str) -> tuple[list[Atom], list[Atom], NumExpr | None]:
    add: list[Atom] = []
    delete: list[Atom] = []
    cost: NumExpr | None = None
    for eff in items:
        eff = _list(eff, "effect")
        head = eff.head()
        if head == "not":
            if len(eff) != 2:
                raise _err("'not' takes one atom", eff, "not")
            delete.append(_atom_args(_list(eff[1], "atom"), "atom"))
        elif head == "increase":
            if len(eff) != 3:
                raise _err("'increase' takes a fluent and an expression", eff, "increase")
            target = _num_expr(eff[1])
            if not isinstance(target, FluentTerm) or target != FluentTerm("total-cost"):
                raise _err("only (total-cost) may be increased", eff, "increase")
            if cost is not None:
                raise _err(f"action {schema} increases total-cost twice", eff, "increase")
            cost = _num_expr(eff[2])
        elif head in ("and", "when", "forall", "decrease", "assign", "scale-up", "scale-down"):
            raise _err("unsupported effect", eff, head)
        else:
            add.append(_atom_args(eff, "atom"))
    return add, delete, cost


def _effect_items(node) -> tuple:
    node = _list(node, "effect")
    return node.items[1:] if node.head() == "and" else (node,)


def _strip_timing(items, allowed: tuple[str, ...], what: str) -> list:
    out = []
    for node in items:
        node = _list(node, what)
        if node.head() == "at" and len(node) == 3 and isinstance(node[1], Sym) and node[1].text in ("start", "end"):
            key = "at " + node[1].text
            inner = node[2]
        elif node.head() == "over" and len(node) == 3 and isinstance(node[1], Sym) and node[1].text == "all":
            key = "over all"
            inner = node[2]
        else:
            raise _err(f"expected timed {what}", node, node.head() or "(")
        if key not in allowed:
            raise _err(f"'{key}' not allowed in {what}", node, key)
        inner = _list(inner, what)
        out.extend(inner.items[1:] if inner.head() == "and" else (inner,))
    return out


def _keyword_args(items, start: int, allowed: set[str], what) -> dict[str, object]:
    found: dict[str, object] = {}
    i = start
    while i < len(items):
        key = items[i]
        k = _sym(key, "keyword")
        if k not in allowed:
            raise _err("unexpected keyword", key)
        if k in found:
            raise _err("duplicate keyword", key)
        if i + 1 >= len(items):
            raise _err(f"missing value for {k}", key)
        found[k] = items[i + 1]
        i += 2
    if ":parameters" not in found:
        raise _err(f"{what} lacks :parameters", items[1] if len(items) > 1 else items[0])
    return found


def _action(node: SList) -> tuple[ActionSchema, dict]:
    durative = node.head() == ":durative-action"
    if len(node) < 2:
        raise _err("action needs a name", node, node.head())
    name = _name(node[1], "action name")
    allowed = {":parameters", ":duration", ":condition", ":effect"} if durative else \
        {":parameters", ":precondition", ":effect"}
    kw = _keyword_args(node.items, 2, allowed, f"action {name}")
    params = _typed_list(_list(kw[":parameters"], "parameter list").items, variables=True)
    pre: list[Atom] = []
    neg: list[Atom] = []
    add: list[Atom] = []
    delete: list[Atom] = []
    cost = None
    duration = None
    if durative:
        if ":duration" not in kw:
            raise _err(f"durative action {name} lacks :duration", node[1])
        d = _list(kw[":duration"], "duration constraint")
        if len(d) != 3 or d.head() != "=" or not isinstance(d[1], Sym) or d[1].text != "?duration":
            raise _err("expected (= ?duration EXPR)", d, d.head() or "(")
        duration = _num_expr(d[2])
        if ":condition" in kw:
            cond = _list(kw[":condition"], "condition")
            items = cond.items[1:] if cond.head() == "and" else (cond,)
            lits = _strip_timing(items, ("at start", "over all", "at end"), "condition")
            pre, neg, _ = _conjunction(SList(tuple([Sym("and", d.line, d.col), *lits]), cond.line, cond.col),
                                       allow_negative=True)
        if ":effect" in kw:
            effs = _strip_timing(_effect_items(kw[":effect"]), ("at start", "at end"), "effect")
            add, delete, cost = _effects(effs, name)
    else:
        if ":precondition" in kw:
            pre, neg, _ = _conjunction(kw[":precondition"], allow_negative=True)
        if ":effect" in kw:
            add, delete, cost = _effects(_effect_items(kw[":effect"]), name)
    schema = ActionSchema(name, params, tuple(pre), tuple(neg), tuple(add), tuple(delete), cost, duration)
    return schema, kw


def _check_action(schema: ActionSchema, node: SList, predicates: dict[str, Predicate],
                  functions: dict[str, FunctionDecl], types: set[str], constants: set[str]) -> None:
    seen: set[str] = set()
    for v, t in schema.params:
        if v in seen:
            raise _err(f"duplicate parameter {v} in {schema.name}", node[1], v)
        seen.add(v)
        if t not in types:
            raise _err(f"undeclared type {t!r}", node[1], t)
    for atom in (*schema.pre, *schema.neg_pre, *schema.add, *schema.delete):
        decl = predicates.get(atom.predicate)
        if decl is None:
            raise _err(f"undeclared predicate {atom.predicate!r} in {schema.name}", node[1], atom.predicate)
        if len(decl.params) != len(atom.args):
            raise _err(f"wrong arity for {atom.predicate!r} in {schema.name}", node[1], atom.predicate)
        for a in atom.args:
            if a.startswith("?") and a not in seen:
                raise _err(f"unbound variable {a} in {schema.name}", node[1], a)
            if not a.startswith("?") and a not in constants:
                raise _err(f"unknown constant {a!r} in {schema.name}", node[1], a)
    if set(schema.add) & set(schema.delete):
        raise _err(f"action {schema.name} adds and deletes the same atom", node[1])
    for expr in (schema.cost, schema.duration):
        if isinstance(expr, FluentTerm):
            decl = functions.get(expr.name)
            if decl is None:
                raise _err(f"undeclared function {expr.name!r} in {schema.name}", node[1], expr.name)
            if len(decl.params) != len(expr.args):
                raise _err(f"wrong arity for {expr.name!r} in {schema.name}", node[1], expr.name)
            for a in expr.args:
                if a.startswith("?") and a not in seen:
                    raise _err(f"unbound variable {a} in {schema.name}", node[1], a)


def _define(text, kind: str) -> tuple[SList, str]:
    forms = read_all(text)
    if not forms:
        raise ParseError("unexpected end of input", 1, 1)
    if len(forms) > 1:
        extra = forms[1]
        raise _err("trailing input after definition", extra, extra.text if isinstance(extra, Sym) else "(")
    root = forms[0]
    root = _list(root, "(define ...)")
    if root.head() != "define" or len(root) < 2:
        raise _err("expected (define ...)", root, root.head() or "(")
    header = _list(root[1], f"({kind} NAME)")
    if header.head() != kind or len(header) != 2:
        raise _err(f"expected ({kind} NAME)", header, header.head() or "(")
    return root, _name(header[1], f"{kind} name")


def _section_order_check(node: SList, sections_seen: set[str]) -> str:
    head = node.head()
    if head is None:
        raise _err("expected section keyword", node, "(")
    if head in sections_seen and head not in (":action", ":durative-action"):
        raise _err("duplicate section", node[0])
    sections_seen.add(head)
    return head


def parse_domain(text: str | bytes) -> DomainAst:
    root, name = _define(text, "domain")
    requirements: list[str] = []
    types: tuple = ()
    constants: tuple = ()
    predicates: list[Predicate] = []
    functions: list[FunctionDecl] = []
    actions: list[ActionSchema] = []
    action_nodes: list[SList] = []
    type_nodes: dict[str, object] = {}
    seen: set[str] = set()
    for node in root.items[2:]:
        node = _list(node, "domain section")
        head = _section_order_check(node, seen)
        body = node.items[1:]
        if head == ":requirements":
            for flag in body:
                f = _sym(flag, "requirement flag")
                if f not in REQUIREMENTS:
                    raise _err("unknown requirement flag", flag)
                requirements.append(f)
        elif head == ":types":
            types = _typed_list(body, variables=False)
            type_nodes = _typed_nodes(body)
        elif head == ":constants":
            constants = _typed_list(body, variables=False)
            type_nodes = {**_typed_nodes(body), **type_nodes}
        elif head == ":predicates":
            for p in body:
                p = _list(p, "predicate declaration")
                if len(p) == 0:
                    raise _err("empty predicate declaration", p, "()")
                predicates.append(Predicate(_name(p[0], "predicate name"),
                                            _typed_list(p.items[1:], variables=True)))
        elif head == ":functions":
            i = 0
            while i < len(body):
                f = _list(body[i], "function declaration")
                if len(f) == 0:
                    raise _err("empty function declaration", f, "()")
                functions.append(FunctionDecl(_name(f[0], "function name"),
                                              _typed_list(f.items[1:], variables=True)))
                i += 1
                if i < len(body) and isinstance(body[i], Sym) and body[i].text == "-":
                    if i + 1 >= len(body) or _sym(body[i + 1], "function type") != "number":
                        raise _err("function type must be number", body[i])
                    i += 2
        elif head in (":action", ":durative-action"):
            schema, _ = _action(node)
            actions.append(schema)
            action_nodes.append(node)
        else:
            raise _err("unknown domain section", node[0])

    declared = {"object"} | {t for t, _ in types}
    for t, parent in (*types, *constants):
        if parent not in declared:
            raise _err(f"undeclared type {parent!r}", type_nodes.get(parent, root), parent)
    for kind, names in (("type", [t for t, _ in types]), ("constant", [c for c, _ in constants]),
                        ("predicate", [p.name for p in predicates]), ("function", [f.name for f in functions]),
                        ("action", [a.name for a in actions])):
        dup = _first_duplicate(names)
        if dup is not None:
            raise _err(f"duplicate {kind} {dup!r}", root, dup)
    for p in predicates:
        for _, t in p.params:
            if t not in declared:
                raise _err(f"undeclared type {t!r} in predicate {p.name}", root, t)
    pred_map = {p.name: p for p in predicates}
    fn_map = {f.name: f for f in functions}
    const_names = {c for c, _ in constants}
    for schema, node in zip(actions, action_nodes):
        _check_action(schema, node, pred_map, fn_map, declared, const_names)
    if _has_cycle({t: p for t, p in types}):
        raise _err("cyclic type hierarchy", root)
    return DomainAst(name, tuple(requirements), types, constants, tuple(predicates),
                     tuple(functions), tuple(actions))


def _first_duplicate(names) -> str | None:
    seen = set()
    for n in names:
        if n in seen:
            return n
        seen.add(n)
    return None


def _has_cycle(parents: dict[str, str]) -> bool:
    for start in parents:
        seen = set()
        t = start
        while t in parents:
            if t in seen:
                return True
            seen.add(t)
            t = parents[t]
    return False


def parse_problem(text: str | bytes, domain: DomainAst | None = None) -> ProblemAst:
    """Parse a problem; with ``domain`` given, types and predicates are checked too."""
    root, name = _define(text, "problem")
    domain_name = None
    objects: tuple = ()
    obj_nodes: dict[str, object] = {}
    init: list[Atom] = []
    numeric: list[tuple[FluentTerm, float]] = []
    goal: list[Atom] | None = None
    goal_nodes: list = []
    metric = None
    seen: set[str] = set()
    for node in root.items[2:]:
        node = _list(node, "problem section")
        head = _section_order_check(node, seen)
        body = node.items[1:]
        if head == ":domain":
            if len(body) != 1:
                raise _err("expected (:domain NAME)", node, head)
            domain_name = _name(body[0], "domain name")
        elif head == ":objects":
            objects = _typed_list(body, variables=False)
            obj_nodes = _typed_nodes(body)
        elif head == ":init":
            for fact in body:
                fact = _list(fact, "initial fact")
                if fact.head() == "=":
                    if len(fact) != 3:
                        raise _err("expected (= (FLUENT ...) NUMBER)", fact, "=")
                    term = _num_expr(fact[1])
                    value = _num_expr(fact[2])
                    if not isinstance(term, FluentTerm) or not isinstance(value, float):
                        raise _err("expected (= (FLUENT ...) NUMBER)", fact, "=")
                    if any(a.startswith("?") for a in term.args):
                        raise _err("initial fluent must be ground", fact, "=")
                    numeric.append((term, value))
                elif fact.head() == "not":
                    raise _err("negative initial fact", fact, "not")
                else:
                    atom = _atom_args(fact, "fact")
                    if any(a.startswith("?") for a in atom.args):
                        raise _err("initial fact must be ground", fact)
                    init.append(atom)
        elif head == ":goal":
            if len(body) != 1:
                raise _err("expected (:goal CONDITION)", node, head)
            pos, neg, goal_nodes = _conjunction(body[0], allow_negative=True)
            if neg:
                raise _err("negative goals are not supported", body[0], "not")
            if any(a.startswith("?") for atom in pos for a in atom.args):
                raise _err("goal must be ground", body[0])
            goal = pos
        elif head == ":metric":
            if len(body) != 2 or _sym(body[0], "metric direction") != "minimize":
                raise _err("expected (:metric minimize (total-cost))", node, head)
            term = _num_expr(body[1])
            if not isinstance(term, FluentTerm) or term.args:
                raise _err("metric must be a 0-ary fluent", node, head)
            metric = term.name
        else:
            raise _err("unknown problem section", node[0])
    if domain_name is None:
        raise _err("missing (:domain NAME)", root, "define")
    if goal is None:
        raise _err("missing (:goal ...)", root, "define")
    if not goal:
        raise _err("empty goal", root, ":goal")

    dup = _first_duplicate(o for o, _ in objects)
    if dup is not None:
        raise _err(f"duplicate object {dup!r}", root, dup)
    known = {o for o, _ in objects}
    if domain is not None:
        known |= {c for c, _ in domain.constants}
        declared = {"object"} | {t for t, _ in domain.types}
        for o, t in objects:
            if t not in declared:
                raise _err(f"object {o!r} has undeclared type {t!r}", obj_nodes.get(t, root), t)
        preds = {p.name: len(p.params) for p in domain.predicates}
        for atom in (*init, *goal):
            if preds.get(atom.predicate) != len(atom.args):
                raise _err(f"undeclared predicate or wrong arity: {atom}", root, atom.predicate)
    for atom, node in zip(goal, goal_nodes):
        for a, n in zip(atom.args, node.items[1:]):
            if a not in known:
                raise _err(f"goal references undeclared object {a!r}", n, a)
    for atom in init:
        for a in atom.args:
            if a not in known:
                raise _err(f"initial state references undeclared object {a!r}", root, a)
    return ProblemAst(name, domain_name, objects, tuple(init), tuple(numeric), tuple(goal), metric)
