"""Render programs back to the concrete syntax accepted by the parser."""

from __future__ import annotations

from .syntax import And, Cmp, Eq, Exists, Forall, Func, Implies, Neq, Not, Or, Program
from .terms import Atom, Fn, Var

# binding strength of each connective, loosest first
IMPLIES, OR, AND, UNARY = range(4)


class _Ctx:
    """Annotate each variable with its sort at its first occurrence in a clause."""

    def __init__(self, annotate: bool):
        self.annotate = annotate
        self.seen: set = set()

    def var(self, v: Var) -> str:
        if self.annotate and v.sort and v.name not in self.seen:
            self.seen.add(v.name)
            return f"{v.name}:{v.sort}"
        return v.name


def fmt_term(t, ctx: _Ctx | None = None) -> str:
    ctx = ctx or _Ctx(False)
    if isinstance(t, Var):
        return ctx.var(t)
    if isinstance(t, Fn):
        if not t.args:
            return t.functor
        return f"{t.functor}({', '.join(fmt_term(a, ctx) for a in t.args)})"
    return str(t)


def fmt_atom(a: Atom, ctx: _Ctx | None = None) -> str:
    if not a.args:
        return a.pred
    return f"{a.pred}({', '.join(fmt_term(x, ctx) for x in a.args)})"


def _offset(t: str, k: int) -> str:
    if k > 0:
        return f"{t} + {k}"
    if k < 0:
        return f"{t} - {-k}"
    return t


def _level(f) -> int:
    if isinstance(f, Implies):
        return IMPLIES
    if isinstance(f, Or):
        return OR
    if isinstance(f, And):
        return AND
    return UNARY


def fmt_formula(f, ctx: _Ctx | None = None, need: int = IMPLIES) -> str:
    ctx = ctx or _Ctx(False)
    text = _fmt(f, ctx)
    # a nested connective of the same strength is bracketed so its structure survives a reparse
    if _level(f) < need or (_level(f) == need and need in (OR, AND)):
        return f"({text})"
    return text


def _fmt(f, ctx: _Ctx) -> str:
    if isinstance(f, Atom):
        return fmt_atom(f, ctx)
    if isinstance(f, Cmp):
        if f.op == "succ":
            return f"succ({fmt_term(f.lhs, ctx)}, {fmt_term(f.rhs, ctx)})"
        return f"{fmt_term(f.lhs, ctx)} {f.op} {_offset(fmt_term(f.rhs, ctx), f.offset)}"
    if isinstance(f, Eq):
        return f"{fmt_term(f.lhs, ctx)} = {fmt_term(f.rhs, ctx)}"
    if isinstance(f, Neq):
        return f"{fmt_term(f.lhs, ctx)} \\= {fmt_term(f.rhs, ctx)}"
    if isinstance(f, Func):
        return f"{f.name}({fmt_term(f.a, ctx)}, {fmt_term(f.b, ctx)}, {fmt_term(f.out, ctx)})"
    if isinstance(f, Not):
        return "~" + fmt_formula(f.body, ctx, UNARY)
    if isinstance(f, And):
        return " & ".join(fmt_formula(p, ctx, AND) for p in f.parts)
    if isinstance(f, Or):
        return " | ".join(fmt_formula(p, ctx, OR) for p in f.parts)
    if isinstance(f, Implies):
        return f"{fmt_formula(f.lhs, ctx, OR)} -> {fmt_formula(f.rhs, ctx, IMPLIES)}"
    if isinstance(f, (Forall, Exists)):
        q = "forall" if isinstance(f, Forall) else "exists"
        ctx.seen.add(f.var.name)
        return f"{q} {f.var.name}:{f.sort} ({fmt_formula(f.body, ctx)})"
    raise TypeError(f"not a formula: {f!r}")


def fmt_conj(parts, ctx: _Ctx | None = None) -> str:
    ctx = ctx or _Ctx(False)
    if len(parts) == 1:
        return fmt_formula(parts[0], ctx, AND if isinstance(parts[0], And) else IMPLIES)
    return " & ".join(fmt_formula(p, ctx, UNARY) for p in parts)


def fmt_clause(c, annotate: bool = False) -> str:
    ctx = _Ctx(annotate)
    head = fmt_atom(c.head, ctx)
    if not c.body:
        return f"{head}."
    return f"{head} <- {fmt_conj(c.body, ctx)}."


def fmt_rule(r, annotate: bool = False) -> str:
    ctx = _Ctx(annotate)
    ante = " & ".join(fmt_formula(p, ctx, UNARY) for p in r.antecedent)
    cons = " & ".join(fmt_formula(p, ctx, UNARY) for p in r.consequent)
    return f"{ante} -> {cons}."


def _section(name: str, lines: list) -> str:
    if not lines:
        return f"{name} {{\n}}\n"
    body = "\n".join("  " + ln for ln in lines)
    return f"{name} {{\n{body}\n}}\n"


def print_program(p: Program) -> str:
    """Concrete syntax that parses back to a structurally equal Program."""
    sorts = []
    for d in p.sorts:
        sup = f" < {', '.join(d.supersorts)}" if d.supersorts else ""
        sorts.append(f"{d.name}{sup} = {{{', '.join(fmt_term(m) for m in d.members)}}}.")
    decls = []
    for pred, sig in p.signatures:
        args = f"({', '.join(s or '_' for s in sig.sorts)})" if sig.sorts else ""
        decls.append(f"{sig.kind} {pred}{args}.")
    cfg = p.config
    config = [f"horizon = {cfg.horizon}.", f"max = {cfg.max_reductions}.",
              f"unfold = {cfg.unfold_depth}."]
    if cfg.agents:
        config.append(f"agents = {{{', '.join(fmt_term(a) for a in cfg.agents)}}}.")
    initial = [fmt_atom(a) + "." for a in sorted(p.initial_state, key=str)]
    goals = []
    for g in p.initial_goals:
        ctx = _Ctx(True)
        goals.append(" & ".join(fmt_formula(x, ctx, UNARY) for x in g) + ".")
    out = [
        _section("sorts", sorts),
        _section("declare", decls),
        _section("config", config),
        _section("initial", initial),
        _section("goals", goals),
        _section("reactive", [fmt_rule(r, True) for r in p.reactive_rules]),
        _section("intensional", [fmt_clause(c, True) for c in p.l_int]),
        _section("events", [fmt_clause(c, True) for c in p.l_events]),
        _section("timeless", [fmt_clause(c, True) for c in p.l_timeless]),
        _section("post", [fmt_clause(c, True) for c in p.d_post]),
        _section("pre", [fmt_clause(c, True) for c in p.d_pre]),
    ]
    return "\n".join(out)
