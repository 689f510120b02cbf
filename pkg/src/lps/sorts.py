"""Sort declarations, the finite Herbrand universe, and grounding."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import UndeclaredSort
from .syntax import Clause, ReactiveRule, free_vars, subst
from .terms import Var, is_ground, term_key

TIME = "time"


@dataclass(frozen=True)
class SortDecl:
    name: str
    members: tuple = ()
    supersorts: tuple = ()


class Universe:
    """Per-sort member tuples in term order, plus the integer time sort."""

    def __init__(self, sorts: Mapping[str, Iterable] | None = None, time: Iterable[int] = (),
                 parents: Mapping[str, tuple] | None = None):
        self._sorts = {k: tuple(sorted(set(v), key=term_key)) for k, v in (sorts or {}).items()}
        self._sets = {k: frozenset(v) for k, v in self._sorts.items()}
        self.time = tuple(sorted(set(time)))
        self._parents = dict(parents or {})

    def sorts(self) -> dict:
        out = dict(self._sorts)
        out[TIME] = self.time
        return out

    def members(self, sort: str | None) -> tuple:
        if sort == TIME:
            return self.time
        if sort is None or sort not in self._sorts:
            raise UndeclaredSort(f"undeclared sort: {sort}")
        return self._sorts[sort]

    def member(self, t, sort: str | None) -> bool:
        if sort is None:
            return True
        if sort == TIME:
            return isinstance(t, int) and t in self.time
        if sort not in self._sets:
            raise UndeclaredSort(f"undeclared sort: {sort}")
        return t in self._sets[sort]

    def is_subsort(self, a: str, b: str) -> bool:
        if a == b:
            return True
        return any(self.is_subsort(p, b) for p in self._parents.get(a, ()))

    def with_time(self, times: Iterable[int]) -> "Universe":
        return Universe(self._sorts, times, self._parents)

    def __contains__(self, sort: str) -> bool:
        return sort == TIME or sort in self._sorts

    def __eq__(self, other) -> bool:
        return isinstance(other, Universe) and self.sorts() == other.sorts()


def herbrand_universe(sorts: Iterable[SortDecl], horizon: int | None = None,
                      used: Iterable[str] = ()) -> dict:
    """Map each declared sort to its finite member set; time is 0..horizon."""
    decls = {d.name: d for d in sorts}
    for d in decls.values():
        for sup in d.supersorts:
            if sup not in decls:
                raise UndeclaredSort(f"sort {d.name} names undeclared supersort {sup}")
    for name in used:
        if name != TIME and name not in decls:
            raise UndeclaredSort(f"undeclared sort: {name}")
    out: dict = {name: set(d.members) for name, d in decls.items()}
    changed = True
    while changed:  # members flow upward into supersorts
        changed = False
        for d in decls.values():
            for sup in d.supersorts:
                before = len(out[sup])
                out[sup] |= out[d.name]
                changed |= len(out[sup]) != before
    result = {k: frozenset(v) for k, v in out.items()}
    if horizon is not None:
        result[TIME] = frozenset(range(horizon + 1))
    return result


def make_universe(sorts: Iterable[SortDecl], horizon: int) -> Universe:
    decls = tuple(sorts)
    table = herbrand_universe(decls)
    parents = {d.name: tuple(d.supersorts) for d in decls}
    return Universe(table, range(horizon + 1), parents)


def _free(obj) -> set:
    if isinstance(obj, Clause):
        return free_vars(obj.head) | free_vars(obj.body)
    if isinstance(obj, ReactiveRule):
        return free_vars(obj.antecedent) | free_vars(obj.consequent)
    return free_vars(obj)


def _apply(obj, s):
    if isinstance(obj, Clause):
        return Clause(subst(obj.head, s), subst(obj.body, s), obj.loc)
    if isinstance(obj, ReactiveRule):
        return ReactiveRule(subst(obj.antecedent, s), subst(obj.consequent, s), obj.loc)
    return subst(obj, s)


def ground_instances(obj, universe: Universe) -> Iterator:
    """Every instance over the free variables; quantifier-bound variables stay put."""
    vs = sorted(_free(obj), key=lambda v: v.name)
    domains = []
    for v in vs:
        if v.sort is None:
            raise UndeclaredSort(f"variable {v.name} has no sort")
        domains.append(universe.members(v.sort))
    for combo in itertools.product(*domains):
        yield _apply(obj, dict(zip(vs, combo)))


def well_sorted(args: tuple, arg_sorts: tuple | None, universe: Universe) -> bool:
    """True when every ground argument lies in the sort declared for its position."""
    if arg_sorts is None:
        return True
    if len(arg_sorts) != len(args):
        return False
    for t, s in zip(args, arg_sorts):
        if s is None:
            continue
        if isinstance(t, Var):
            if t.sort is not None and s in universe and t.sort in universe:
                if not (universe.is_subsort(t.sort, s) or universe.is_subsort(s, t.sort)):
                    return False
            continue
        if is_ground(t) and not universe.member(t, s):
            return False
    return True
