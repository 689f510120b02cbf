"""Classical truth and answer enumeration for FOL conditions over a Herbrand interpretation."""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Iterator

from .sorts import Universe
from .syntax import (BUILTINS, FUNCS, And, Cmp, Eq, Exists, Forall, Func, Implies, Neq,
                     Not, Or, free_vars, subst)
from .terms import Atom, Var, apply, is_ground, match, term_key


class Model:
    """An immutable set of ground atoms indexed by predicate."""

    __slots__ = ("atoms", "_index", "_args")

    def __init__(self, atoms: Iterable[Atom] = ()):
        self.atoms = frozenset(atoms)
        self._index: dict | None = None
        self._args: dict = {}

    def by_pred(self, pred: str) -> tuple:
        if self._index is None:
            idx: dict = {}
            for a in self.atoms:
                idx.setdefault(a.pred, []).append(a)
            self._index = {k: tuple(v) for k, v in idx.items()}
        return self._index.get(pred, ())

    def matching(self, pattern: Atom) -> tuple:
        """Atoms of the pattern's predicate agreeing with it on its most selective ground argument."""
        atoms = self.by_pred(pattern.pred)
        if len(atoms) < 8:
            return atoms
        best = atoms
        for i, x in enumerate(pattern.args):
            if not is_ground(x):
                continue
            idx = self._args.get((pattern.pred, i))
            if idx is None:
                idx = {}
                for a in atoms:
                    if len(a.args) > i:
                        idx.setdefault(a.args[i], []).append(a)
                self._args[(pattern.pred, i)] = idx
            hit = idx.get(x, ())
            if len(hit) < len(best):
                best = hit
                if not best:
                    break
        return best

    def __contains__(self, a) -> bool:
        return a in self.atoms

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Model):
            return self.atoms == other.atoms
        if isinstance(other, (set, frozenset)):
            return self.atoms == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.atoms)

    def __or__(self, other) -> "Model":
        return Model(self.atoms | frozenset(other))

    def __sub__(self, other) -> "Model":
        return Model(self.atoms - frozenset(other))

    def __repr__(self) -> str:
        return f"Model({len(self.atoms)} atoms)"


def as_model(m) -> Model:
    return m if isinstance(m, Model) else Model(m)


def eval_builtin(f) -> bool:
    if isinstance(f, Cmp):
        lhs, rhs = f.lhs, f.rhs
        if not (isinstance(lhs, int) and isinstance(rhs, int)):
            return False
        if f.op == "<":
            return lhs < rhs + f.offset
        if f.op == "=<":
            return lhs <= rhs + f.offset
        if f.op == "succ":
            return rhs == lhs + 1
        raise ValueError(f"unknown comparison {f.op}")
    if isinstance(f, Eq):
        return f.lhs == f.rhs
    if isinstance(f, Neq):
        return f.lhs != f.rhs
    if isinstance(f, Func):
        if not all(isinstance(x, int) for x in (f.a, f.b, f.out)):
            return False
        return f.out == FUNCS[f.name](f.a, f.b)
    raise TypeError(f"not a builtin: {f!r}")


def eval_truth(sentence, m, universe: Universe, cache: dict | None = None) -> bool:
    """Truth of a closed formula; negation is failure to be in ``m``."""
    m = as_model(m)
    return _truth(sentence, m, universe, {} if cache is None else cache)


def _truth(f, m: Model, u: Universe, cache: dict) -> bool:
    if isinstance(f, Atom):
        return f in m.atoms
    if isinstance(f, BUILTINS):
        return eval_builtin(f)
    if isinstance(f, tuple):
        return all(_truth(p, m, u, cache) for p in f)
    hit = cache.get(f)
    if hit is not None:
        return hit
    if isinstance(f, Not):
        r = not _truth(f.body, m, u, cache)
    elif isinstance(f, And):
        r = all(_truth(p, m, u, cache) for p in f.parts)
    elif isinstance(f, Or):
        r = any(_truth(p, m, u, cache) for p in f.parts)
    elif isinstance(f, Implies):
        r = (not _truth(f.lhs, m, u, cache)) or _truth(f.rhs, m, u, cache)
    elif isinstance(f, Forall):
        r = all(_truth(subst(f.body, {f.var: x}), m, u, cache) for x in u.members(f.sort))
    elif isinstance(f, Exists):
        r = any(_truth(subst(f.body, {f.var: x}), m, u, cache) for x in u.members(f.sort))
    else:
        raise TypeError(f"not a formula: {f!r}")
    cache[f] = r
    return r


# ---------------------------------------------------------------- answers

def _unbound(f, s) -> list:
    return sorted((v for v in free_vars(f) if v not in s), key=lambda v: v.name)


def _domain(v: Var, u: Universe) -> tuple:
    return u.members(v.sort)


def _cost(f, free: list, s, u: Universe, m: Model) -> float:
    if not free:
        return 0
    if isinstance(f, Atom):
        n = len(m.matching(apply(f, s)))
        return 1 + n / (n + 1)  # fewer candidate atoms first
    if isinstance(f, Eq):
        l, r = apply(f.lhs, s), apply(f.rhs, s)
        return 1.5 if is_ground(l) or is_ground(r) else 50
    if isinstance(f, Func):
        return 1.5 if is_ground(apply(f.a, s)) and is_ground(apply(f.b, s)) else 50
    if isinstance(f, Cmp) and f.op == "succ":
        l, r = apply(f.lhs, s), apply(f.rhs, s)
        return 1.5 if isinstance(l, int) or isinstance(r, int) else 50
    if isinstance(f, (Exists, And)):
        return 2
    if isinstance(f, Or):
        return 3
    size = 1
    for v in free:
        try:
            size *= max(1, len(_domain(v, u)))
        except Exception:
            size = math.inf
    return 10 + size


def solve(f, m: Model, u: Universe, s: dict, cache: dict) -> Iterator[dict]:
    """Yield extensions of ``s`` binding every free variable of ``f`` that make it true."""
    if isinstance(f, tuple):
        yield from _solve_conj(list(f), m, u, s, cache)
        return
    free = _unbound(f, s)
    if not free:
        if _truth(subst(f, s), m, u, cache):
            yield s
        return
    if isinstance(f, Atom):
        pat = apply(f, s)
        for a in m.matching(pat):
            out = match(pat, a, s)
            if out is not None and all(u.member(out[v], v.sort) for v in free if v.sort):
                yield out
        return
    if isinstance(f, And):
        yield from _solve_conj(list(f.parts), m, u, s, cache)
        return
    if isinstance(f, Or):
        seen = set()
        names = free
        for part in f.parts:
            for s1 in solve(part, m, u, s, cache):
                rest = [v for v in names if v not in s1]
                for combo in itertools.product(*(_domain(v, u) for v in rest)):
                    s2 = dict(s1)
                    s2.update(zip(rest, combo))
                    key = tuple(term_key(s2[v]) for v in names)
                    if key not in seen:
                        seen.add(key)
                        yield s2
        return
    if isinstance(f, Exists):
        seen = set()
        inner = {k: v for k, v in s.items() if k != f.var}
        body = f.body
        for s1 in solve(body, m, u, inner, cache):
            if f.var in s1 and not u.member(s1[f.var], f.sort):
                continue
            out = {k: v for k, v in s1.items() if k != f.var}
            if f.var in s:
                out[f.var] = s[f.var]
            key = tuple(term_key(out[v]) for v in free)
            if key not in seen:
                seen.add(key)
                yield out
        return
    if isinstance(f, Eq):
        l, r = apply(f.lhs, s), apply(f.rhs, s)
        if is_ground(l) != is_ground(r):
            var, val = (r, l) if is_ground(l) else (l, r)
            if isinstance(var, Var):
                if u.member(val, var.sort):
                    out = dict(s)
                    out[var] = val
                    yield out
                return
            from .terms import unify_terms

            out = unify_terms(var, val, {}, None)
            if out is not None:
                ext = dict(s)
                ext.update({k: apply(v, out) for k, v in out.items()})
                if all(u.member(ext[v], v.sort) for v in free):
                    yield ext
            return
    if isinstance(f, Func):
        a, b = apply(f.a, s), apply(f.b, s)
        out_t = apply(f.out, s)
        if isinstance(a, int) and isinstance(b, int) and isinstance(out_t, Var):
            val = FUNCS[f.name](a, b)
            if u.member(val, out_t.sort):
                out = dict(s)
                out[out_t] = val
                yield out
            return
    if isinstance(f, Cmp) and f.op == "succ":
        l, r = apply(f.lhs, s), apply(f.rhs, s)
        if isinstance(l, int) and isinstance(r, Var):
            var, val = r, l + 1
        elif isinstance(r, int) and isinstance(l, Var):
            var, val = l, r - 1
        else:
            var = None
        if var is not None:
            if u.member(val, var.sort or "time"):
                out = dict(s)
                out[var] = val
                yield out
            return
    # generic: enumerate the remaining variables over their sorts
    for combo in itertools.product(*(_domain(v, u) for v in free)):
        s2 = dict(s)
        s2.update(zip(free, combo))
        if _truth(subst(f, s2), m, u, cache):
            yield s2


def _solve_conj(items: list, m: Model, u: Universe, s: dict, cache: dict) -> Iterator[dict]:
    prepared = [(f, sorted(free_vars(f), key=lambda v: v.name)) for f in items]
    yield from _conj(prepared, m, u, s, cache)


def _conj(items: list, m: Model, u: Universe, s: dict, cache: dict) -> Iterator[dict]:
    if not items:
        yield s
        return
    best, best_cost = 0, None
    for i, (f, fv) in enumerate(items):
        c = _cost(f, [v for v in fv if v not in s], s, u, m)
        if best_cost is None or c < best_cost:
            best, best_cost = i, c
            if c == 0:
                break
    first, rest = items[best][0], items[:best] + items[best + 1:]
    for s1 in solve(first, m, u, s, cache):
        yield from _conj(rest, m, u, s1, cache)


def answer_key(s: dict, names: list) -> tuple:
    return tuple(term_key(s[v]) for v in names)


def query(formula, m, universe: Universe, bindings: dict | None = None) -> list[dict]:
    """All ground substitutions for the free variables making ``formula`` true, in a fixed order."""
    m = as_model(m)
    base = dict(bindings or {})
    names = sorted(free_vars(formula) - set(base), key=lambda v: v.name)
    seen = {}
    for s in solve(formula, m, universe, base, {}):
        out = {v: s[v] for v in names}
        seen.setdefault(answer_key(out, names), out)
    return [seen[k] for k in sorted(seen)]
