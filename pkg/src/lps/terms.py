"""Sorted first-order terms, atoms, substitutions and unification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    sort: str | None = field(default=None, compare=False)

    def __str__(self) -> str:
        return self.name

    def __lt__(self, other: "Var") -> bool:
        return self.name < other.name


@dataclass(frozen=True, slots=True)
class Fn:
    """A compound term; constants are zero-arity compounds."""

    functor: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.functor
        return f"{self.functor}({', '.join(map(str, self.args))})"


Term = Union[Var, Fn, int]


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({', '.join(map(str, self.args))})"

    @property
    def arity(self) -> int:
        return len(self.args)


Subst = dict  # Var -> Term, always kept idempotent


def const(name: str) -> Fn:
    return Fn(name, ())


def term_key(t) -> tuple:
    """Total order on terms: integers, then compounds, then variables."""
    if isinstance(t, bool):
        raise TypeError("booleans are not terms")
    if isinstance(t, int):
        return (0, t)
    if isinstance(t, Fn):
        return (1, t.functor, len(t.args), tuple(term_key(a) for a in t.args))
    if isinstance(t, Var):
        return (2, t.name)
    raise TypeError(f"not a term: {t!r}")


def atom_key(a: Atom) -> tuple:
    return (a.pred, len(a.args), tuple(term_key(x) for x in a.args))


def is_ground(t) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Fn):
        return all(is_ground(a) for a in t.args)
    if isinstance(t, Atom):
        return all(is_ground(a) for a in t.args)
    return True


def term_vars(t) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, (Fn, Atom)):
        for a in t.args:
            yield from term_vars(a)


def walk(t, s: Mapping):
    while isinstance(t, Var) and t in s:
        t = s[t]
    return t


def apply(t, s: Mapping):
    """Apply a substitution to a term or atom."""
    if not s:
        return t
    if isinstance(t, Var):
        v = walk(t, s)
        return v if isinstance(v, Var) else apply(v, s)
    if isinstance(t, Fn):
        if not t.args:
            return t
        return Fn(t.functor, tuple(apply(a, s) for a in t.args))
    if isinstance(t, Atom):
        return Atom(t.pred, tuple(apply(a, s) for a in t.args))
    return t


def _occurs(v: Var, t, s) -> bool:
    t = walk(t, s)
    if t == v:
        return True
    if isinstance(t, Fn):
        return any(_occurs(v, a, s) for a in t.args)
    return False


def _sort_ok(v: Var, t, universe) -> bool:
    if universe is None or v.sort is None:
        return True
    if isinstance(t, Var):
        return (t.sort is None or universe.is_subsort(t.sort, v.sort)
                or universe.is_subsort(v.sort, t.sort))
    return not is_ground(t) or universe.member(t, v.sort)


def unify_terms(a, b, s: dict, sorts=None) -> dict | None:
    stack = [(a, b)]
    s = dict(s)
    while stack:
        x, y = stack.pop()
        x, y = walk(x, s), walk(y, s)
        if x == y:
            continue
        if isinstance(x, Var):
            if _occurs(x, y, s) or not _sort_ok(x, y, sorts):
                return None
            s[x] = y
        elif isinstance(y, Var):
            if _occurs(y, x, s) or not _sort_ok(y, x, sorts):
                return None
            s[y] = x
        elif isinstance(x, Fn) and isinstance(y, Fn):
            if x.functor != y.functor or len(x.args) != len(y.args):
                return None
            stack.extend(zip(x.args, y.args))
        else:
            return None
    return s


def resolve(s: dict) -> dict:
    """Make a triangular substitution idempotent."""
    return {v: apply(t, s) for v, t in s.items()}


def unify(a: Atom, b: Atom, s: Mapping | None = None, sorts=None) -> dict | None:
    """Most general unifier of two atoms (occurs check on), or None."""
    if a.pred != b.pred or len(a.args) != len(b.args):
        return None
    out = unify_terms(Fn("", a.args), Fn("", b.args), dict(s or {}), sorts)
    return None if out is None else resolve(out)


def match(pattern: Atom, ground: Atom, s: Mapping) -> dict | None:
    """One-way matching of a pattern against a ground atom, extending s."""
    if pattern.pred != ground.pred or len(pattern.args) != len(ground.args):
        return None
    out = dict(s)
    stack = list(zip(pattern.args, ground.args))
    while stack:
        p, g = stack.pop()
        if isinstance(p, Var):
            bound = out.get(p)
            if bound is None:
                out[p] = g
            elif bound != g:
                return None
        elif isinstance(p, Fn):
            if not isinstance(g, Fn) or p.functor != g.functor or len(p.args) != len(g.args):
                return None
            stack.extend(zip(p.args, g.args))
        elif p != g:
            return None
    return out


def compose(s1: Mapping, s2: Mapping) -> dict:
    out = {v: apply(t, s2) for v, t in s1.items()}
    for v, t in s2.items():
        out.setdefault(v, t)
    return out


def freeze(s: Mapping) -> tuple:
    return tuple(sorted(((v.name, term_key(t)) for v, t in s.items())))


def rename(t, suffix: str):
    if isinstance(t, Var):
        return Var(t.name + suffix, t.sort)
    if isinstance(t, Fn):
        return Fn(t.functor, tuple(rename(a, suffix) for a in t.args)) if t.args else t
    if isinstance(t, Atom):
        return Atom(t.pred, tuple(rename(a, suffix) for a in t.args))
    return t


def fmt_atoms(atoms: Iterable[Atom]) -> list[str]:
    return [str(a) for a in sorted(atoms, key=atom_key)]
