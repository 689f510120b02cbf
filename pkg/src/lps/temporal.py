"""Difference constraints over integer time: implication, feasibility and simplification."""

from __future__ import annotations

from .fol import eval_builtin
from .syntax import COMPOSITE, EVENT, Cmp, Eq, Func, Neq
from .terms import Atom, Var, is_ground

ZERO = "<0>"  # the node standing for the integer origin


class _False:
    def __repr__(self) -> str:
        return "FALSE"

    def __bool__(self) -> bool:
        return False


FALSE = _False()


def _node(t):
    """Split a time term into (node, offset)."""
    if isinstance(t, int):
        return ZERO, t
    if isinstance(t, Var):
        return t, 0
    return None


def _is_time(t) -> bool:
    return isinstance(t, int) or (isinstance(t, Var) and t.sort == "time")


def leq(x, y, k: int = 0) -> list:
    """Edges for x <= y + k; empty when either side is not a time term."""
    a, b = _node(x), _node(y)
    if a is None or b is None:
        return []
    (u, ou), (v, ov) = a, b
    return [(u, v, k + ov - ou)]


def edges_of(cond, kinds: dict | None = None) -> list:
    """Difference edges (u, v, w) meaning u <= v + w implied by one condition."""
    if isinstance(cond, Cmp):
        if cond.op == "<":
            return leq(cond.lhs, cond.rhs, cond.offset - 1)
        if cond.op == "=<":
            return leq(cond.lhs, cond.rhs, cond.offset)
        if cond.op == "succ":
            return leq(cond.rhs, cond.lhs, 1) + leq(cond.lhs, cond.rhs, -1)
    if isinstance(cond, Eq) and _is_time(cond.lhs) and _is_time(cond.rhs):
        return leq(cond.lhs, cond.rhs) + leq(cond.rhs, cond.lhs)
    if isinstance(cond, Func):
        if cond.name == "max":
            return leq(cond.a, cond.out) + leq(cond.b, cond.out)
        return leq(cond.out, cond.a) + leq(cond.out, cond.b)
    if isinstance(cond, Atom) and kinds is not None:
        kind = kinds.get(cond.pred)
        if kind in (EVENT, COMPOSITE) and len(cond.args) >= 2:
            s, e = cond.args[-2], cond.args[-1]
            if kind == EVENT:
                return leq(e, s, 1) + leq(s, e, -1)
            return leq(s, e)
    return []


def _bellman_ford(edges: list, source=None):
    """Shortest distances from ``source`` (or a virtual source to every node); None on a negative cycle."""
    index = {ZERO: 0}
    coded = []
    for u, v, w in edges:
        iu = index.setdefault(u, len(index))
        iv = index.setdefault(v, len(index))
        coded.append((iu, iv, w))
    if source is not None:
        index.setdefault(source, len(index))
    inf = float("inf")
    if source is None:
        dist = [0] * len(index)
    else:
        dist = [inf] * len(index)
        dist[index[source]] = 0
    for _ in range(len(index)):
        changed = False
        for u, v, w in coded:  # u <= v + w : edge v -> u
            d = dist[v] + w
            if d < dist[u]:
                dist[u] = d
                changed = True
        if not changed:
            return {n: dist[i] for n, i in index.items()}
    return None


def implied_leq(edges: list, x, y, k: int = 0) -> bool:
    """Does the system entail x <= y + k? An inconsistent system entails everything."""
    a, b = _node(x), _node(y)
    if a is None or b is None:
        return False
    (u, ou), (v, ov) = a, b
    if _bellman_ford(edges) is None:
        return True
    dist = _bellman_ford(edges, source=v)
    if u == v:
        return ou <= ov + k
    return dist.get(u, float("inf")) <= k + ov - ou


def feasible(edges: list, lower: int | None = 0) -> bool:
    """Integer solvability, optionally with every time variable >= ``lower``."""
    extra = []
    if lower is not None:
        nodes = dict.fromkeys(n for u, v, _ in edges for n in (u, v) if n != ZERO)
        extra = [(ZERO, n, -lower) for n in nodes]
    return _bellman_ford(edges + extra) is not None


def simplify_constraints(constraints, bindings: dict | None = None, lower: int | None = 0):
    """Apply bindings; drop ground-true constraints; FALSE if any is false or the rest is unsolvable."""
    from .syntax import subst

    rest = []
    for c in constraints:
        c = subst(c, bindings or {})
        if is_ground_builtin(c):
            if not eval_builtin(c):
                return FALSE
            continue
        rest.append(c)
    edges = [e for c in rest for e in edges_of(c)]
    if not feasible(edges, lower):
        return FALSE
    return tuple(rest)


def is_ground_builtin(c) -> bool:
    from .syntax import builtin_terms

    return isinstance(c, (Cmp, Eq, Neq, Func)) and all(is_ground(t) for t in builtin_terms(c))
