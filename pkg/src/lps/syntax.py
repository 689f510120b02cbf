"""FOL conditions, clauses, reactive rules and the Program container."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Union

from .terms import Atom, Fn, Var, apply, term_vars

# predicate kinds
FLUENT = "fluent"            # extensional fluent
INTENSIONAL = "intensional"  # intensional fluent
EVENT = "event"              # simple event
COMPOSITE = "composite"      # composite event
TIMELESS = "timeless"
KINDS = (FLUENT, INTENSIONAL, EVENT, COMPOSITE, TIMELESS)
META = ("initiated", "terminated", "holds", "happens")
TIME_ARGS = {FLUENT: 1, INTENSIONAL: 1, EVENT: 2, COMPOSITE: 2, TIMELESS: 0}


@dataclass(frozen=True, slots=True)
class Not:
    body: "Formula"


@dataclass(frozen=True, slots=True)
class And:
    parts: tuple


@dataclass(frozen=True, slots=True)
class Or:
    parts: tuple


@dataclass(frozen=True, slots=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True, slots=True)
class Forall:
    var: Var
    sort: str
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Exists:
    var: Var
    sort: str
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Cmp:
    """Temporal constraint ``lhs op rhs + offset``; ``succ`` means rhs = lhs + 1."""

    op: str  # '<', '=<', 'succ'
    lhs: object
    rhs: object
    offset: int = 0


@dataclass(frozen=True, slots=True)
class Eq:
    lhs: object
    rhs: object


@dataclass(frozen=True, slots=True)
class Neq:
    lhs: object
    rhs: object


@dataclass(frozen=True, slots=True)
class Func:
    """Built-in timeless function relation, e.g. max(A, B, C) with C = max(A, B)."""

    name: str  # 'max' | 'min'
    a: object
    b: object
    out: object


Builtin = Union[Cmp, Eq, Neq, Func]
Formula = Union[Atom, Not, And, Or, Implies, Forall, Exists, Cmp, Eq, Neq, Func]
BUILTINS = (Cmp, Eq, Neq, Func)
FUNCS = {"max": max, "min": min}


def is_builtin(f) -> bool:
    return isinstance(f, BUILTINS)


def is_nonatomic(f) -> bool:
    return isinstance(f, (Not, And, Or, Implies, Forall, Exists))


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple = ()
    loc: tuple | None = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        from .printer import fmt_clause

        return fmt_clause(self)


@dataclass(frozen=True)
class ReactiveRule:
    antecedent: tuple
    consequent: tuple
    loc: tuple | None = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        from .printer import fmt_rule

        return fmt_rule(self)


@dataclass(frozen=True)
class Signature:
    kind: str
    sorts: tuple | None = None  # sorts of the non-time arguments, None when unknown


@dataclass(frozen=True)
class Config:
    horizon: int = 10
    max_reductions: int = 64
    unfold_depth: int = 8
    agents: tuple = ()


@dataclass(frozen=True)
class Program:
    sorts: tuple = ()
    signatures: tuple = ()  # sorted (pred, Signature) pairs
    reactive_rules: tuple = ()
    l_int: tuple = ()
    l_events: tuple = ()
    l_timeless: tuple = ()
    d_post: tuple = ()
    d_pre: tuple = ()
    initial_state: frozenset = frozenset()
    initial_goals: tuple = ()
    config: Config = Config()
    unfolded_rules: tuple = ()  # reactive rules with antecedent composites unfolded

    @cached_property
    def sigs(self) -> dict:
        return dict(self.signatures)

    @cached_property
    def kinds(self) -> dict:
        return {p: s.kind for p, s in self.signatures}

    @property
    def rules(self) -> tuple:
        return self.unfolded_rules or self.reactive_rules

    def kind(self, pred: str) -> str | None:
        return self.kinds.get(pred)

    def preds_of(self, kind: str) -> set:
        return {p for p, s in self.signatures if s.kind == kind}

    @property
    def l_temp(self) -> tuple:
        return ()  # built in


# ---------------------------------------------------------------- traversal

def atoms_of(f) -> Iterator[Atom]:
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from atoms_of(f.body)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            yield from atoms_of(p)
    elif isinstance(f, Implies):
        yield from atoms_of(f.lhs)
        yield from atoms_of(f.rhs)
    elif isinstance(f, (Forall, Exists)):
        yield from atoms_of(f.body)


def builtin_terms(f) -> tuple:
    if isinstance(f, (Cmp, Eq, Neq)):
        return (f.lhs, f.rhs)
    if isinstance(f, Func):
        return (f.a, f.b, f.out)
    return ()


def free_vars(f) -> set:
    if isinstance(f, Atom):
        return set(term_vars(f))
    if isinstance(f, BUILTINS):
        out = set()
        for t in builtin_terms(f):
            out.update(term_vars(t))
        return out
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        out = set()
        for p in f.parts:
            out |= free_vars(p)
        return out
    if isinstance(f, Implies):
        return free_vars(f.lhs) | free_vars(f.rhs)
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body) - {f.var}
    if isinstance(f, (tuple, list)):
        out = set()
        for p in f:
            out |= free_vars(p)
        return out
    raise TypeError(f"not a formula: {f!r}")


def subst(f, s):
    """Apply a substitution to a formula, leaving quantifier-bound variables alone."""
    if not s:
        return f
    if isinstance(f, Atom):
        return apply(f, s)
    if isinstance(f, Cmp):
        return Cmp(f.op, apply(f.lhs, s), apply(f.rhs, s), f.offset)
    if isinstance(f, Eq):
        return Eq(apply(f.lhs, s), apply(f.rhs, s))
    if isinstance(f, Neq):
        return Neq(apply(f.lhs, s), apply(f.rhs, s))
    if isinstance(f, Func):
        return Func(f.name, apply(f.a, s), apply(f.b, s), apply(f.out, s))
    if isinstance(f, Not):
        return Not(subst(f.body, s))
    if isinstance(f, And):
        return And(tuple(subst(p, s) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(subst(p, s) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(subst(f.lhs, s), subst(f.rhs, s))
    if isinstance(f, (Forall, Exists)):
        inner = {v: t for v, t in s.items() if v != f.var}
        return type(f)(f.var, f.sort, subst(f.body, inner))
    if isinstance(f, tuple):
        return tuple(subst(p, s) for p in f)
    raise TypeError(f"not a formula: {f!r}")


def rename_formula(f, suffix: str):
    from .terms import rename

    if isinstance(f, Atom):
        return rename(f, suffix)
    if isinstance(f, Cmp):
        return Cmp(f.op, rename(f.lhs, suffix), rename(f.rhs, suffix), f.offset)
    if isinstance(f, Eq):
        return Eq(rename(f.lhs, suffix), rename(f.rhs, suffix))
    if isinstance(f, Neq):
        return Neq(rename(f.lhs, suffix), rename(f.rhs, suffix))
    if isinstance(f, Func):
        return Func(f.name, rename(f.a, suffix), rename(f.b, suffix), rename(f.out, suffix))
    if isinstance(f, Not):
        return Not(rename_formula(f.body, suffix))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(rename_formula(p, suffix) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(rename_formula(f.lhs, suffix), rename_formula(f.rhs, suffix))
    if isinstance(f, (Forall, Exists)):
        return type(f)(rename(f.var, suffix), f.sort, rename_formula(f.body, suffix))
    if isinstance(f, tuple):
        return tuple(rename_formula(p, suffix) for p in f)
    raise TypeError(f"not a formula: {f!r}")


def rename_clause(c: Clause, suffix: str) -> Clause:
    return Clause(rename_formula(c.head, suffix), rename_formula(c.body, suffix), c.loc)


# ---------------------------------------------------------------- time stamps

def stamp(fluent: Atom, *times) -> Atom:
    return Atom(fluent.pred, fluent.args + tuple(times))


def unstamp(atom: Atom, n: int) -> Atom:
    return Atom(atom.pred, atom.args[: len(atom.args) - n])


def times_of(atom: Atom, n: int) -> tuple:
    return atom.args[len(atom.args) - n:] if n else ()


def as_term(a: Atom) -> Fn:
    return Fn(a.pred, a.args)


def as_atom(t: Fn) -> Atom:
    return Atom(t.functor, t.args)
