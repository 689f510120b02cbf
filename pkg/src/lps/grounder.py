"""Relevance grounding and the default kind-ordered stratification."""

from __future__ import annotations

import itertools

from .errors import NotStratified
from .fol import Model, solve
from .sorts import Universe
from .strat import Stratification, perfect_model
from .syntax import (BUILTINS, COMPOSITE, EVENT, FLUENT, INTENSIONAL, TIMELESS, Clause,
                     atoms_of, free_vars, is_nonatomic, subst)
from .terms import Atom

META_PREDS = ("initiated", "terminated")
# kind groups from the bottom stratum upwards
GROUPS = ((FLUENT, EVENT), (TIMELESS,), (INTENSIONAL,), ("meta",), (COMPOSITE,))


def ground_clause(c: Clause, possible: Model, universe: Universe):
    """Ground instances of ``c`` whose positive atoms all lie in ``possible``.

    Built-ins are decided during grounding and dropped from the bodies they satisfy.
    """
    joinable = tuple(b for b in c.body if isinstance(b, Atom) or isinstance(b, BUILTINS))
    rest = tuple(b for b in c.body if not isinstance(b, Atom) and not isinstance(b, BUILTINS))
    for s in solve(joinable, possible, universe, {}, {}):
        free = sorted((v for v in free_vars((c.head,) + rest) if v not in s), key=lambda v: v.name)
        domains = [universe.members(v.sort) for v in free]
        for combo in itertools.product(*domains):
            s2 = dict(s)
            s2.update(zip(free, combo))
            head = subst(c.head, s2)
            body = tuple(subst(b, s2) for b in c.body if not isinstance(b, BUILTINS))
            yield Clause(head, body, c.loc)


def _positive_preds(c: Clause) -> set:
    return {b.pred for b in c.body if isinstance(b, Atom)}


def ground_program(clauses, facts, universe: Universe) -> list[Clause]:
    """Ground ``clauses`` against an over-approximation of what they can derive from ``facts``.

    A clause is re-grounded only when one of its positive body predicates gained atoms.
    """
    clauses = list(clauses)
    needs = [_positive_preds(c) for c in clauses]
    possible = set(facts)
    seen: dict = {}
    changed = None  # predicates that gained atoms last round; None means everything
    while True:
        model = Model(possible)
        grown = set()
        for c, preds in zip(clauses, needs):
            if changed is not None and not (preds & changed):
                continue
            for g in ground_clause(c, model, universe):
                if g not in seen:
                    seen[g] = None
                    if g.head not in possible:
                        possible.add(g.head)
                        grown.add(g.head.pred)
        if not grown:
            return list(seen)
        changed = grown


def _group_of(pred: str, kinds: dict) -> int:
    if pred in META_PREDS:
        return 3
    kind = kinds.get(pred, FLUENT)
    for i, g in enumerate(GROUPS):
        if kind in g:
            return i
    return 0


def predicate_levels(kinds: dict, clauses) -> dict:
    """Stratum per predicate: kind groups in order, internal levels from the dependency graph."""
    clauses = list(clauses)
    preds = set(kinds) | set(META_PREDS)
    for c in clauses:
        preds.add(c.head.pred)
    internal = {p: 0 for p in preds}
    deps = []  # (head, body pred, strict)
    for c in clauses:
        h = c.head.pred
        for b in c.body:
            if isinstance(b, Atom):
                deps.append((h, b.pred, False))
            elif is_nonatomic(b):
                for a in atoms_of(b):
                    deps.append((h, a.pred, True))
    bound = len(preds) + 1
    changed = True
    while changed:
        changed = False
        for h, q, strict in deps:
            gh, gq = _group_of(h, kinds), _group_of(q, kinds)
            if gh != gq:
                continue
            need = internal.get(q, 0) + (1 if strict else 0)
            if internal[h] < need:
                internal[h] = need
                changed = True
                if need > bound:
                    raise NotStratified(f"predicate {h} depends negatively on itself")
    levels = {}
    base = 0
    for gi in range(len(GROUPS)):
        members = [p for p in preds if _group_of(p, kinds) == gi]
        top = max((internal[p] for p in members), default=0)
        for p in members:
            levels[p] = base + internal[p]
        base += top + 1
    return levels


def kind_stratification(kinds: dict, clauses) -> Stratification:
    levels = predicate_levels(kinds, clauses)
    return Stratification(rule=lambda a: levels.get(a.pred, 0))


def sem(clauses, facts, kinds: dict, universe: Universe) -> Model:
    """Perfect model of the non-ground ``clauses`` over the ground ``facts``."""
    facts = list(facts)
    clauses = list(clauses)
    ground = ground_program(clauses, facts, universe)
    program = [Clause(a, ()) for a in facts] + ground
    return perfect_model(program, kind_stratification(kinds, clauses), universe)

