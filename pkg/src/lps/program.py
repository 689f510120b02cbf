"""Well-formedness checks that turn a parsed source into a Program."""

from __future__ import annotations

from dataclasses import replace

from .errors import KindViolation, TimeArgViolation, UndeclaredSort, UnfoldDepthExceeded
from .sorts import TIME, herbrand_universe
from .syntax import (COMPOSITE, EVENT, FLUENT, INTENSIONAL, TIME_ARGS, TIMELESS, And, Clause,
                     Cmp, Config, Eq, Exists, Forall, Func, Implies, Neq, Not, Or, Program,
                     ReactiveRule, Signature, atoms_of, free_vars, is_nonatomic, rename_formula,
                     subst)
from .temporal import edges_of, implied_leq
from .terms import Atom, Fn, Var, is_ground, term_vars, unify

RESERVED = {"initiated", "terminated", "holds", "happens", "false", "succ", "max", "min",
            "forall", "exists"}
STATE_KINDS = (FLUENT, INTENSIONAL, TIMELESS)
SELF = Fn("self", ())


def _err(cls, msg, loc):
    line, col = loc if loc else (None, None)
    return cls(msg, line, col)


class _Checker:
    def __init__(self, raw):
        self.raw = raw
        self.sigs: dict = {}
        self.decls = {}
        self.parents = {}

    # ---------------------------------------------------------------- sorts

    def sorts(self) -> tuple:
        decls = []
        seen = set()
        for d, tok in self.raw.sorts:
            if d.name in seen or d.name == TIME:
                raise KindViolation(f"sort {d.name} declared twice", tok.line, tok.col)
            seen.add(d.name)
            decls.append(d)
        for d, tok in self.raw.sorts:
            for sup in d.supersorts:
                if sup not in seen:
                    raise UndeclaredSort(f"sort {d.name} names undeclared supersort {sup}",
                                         tok.line, tok.col)
        self.decls = {d.name: d for d in decls}
        self.parents = {d.name: d.supersorts for d in decls}
        return tuple(decls)

    def is_subsort(self, a: str, b: str) -> bool:
        return a == b or any(self.is_subsort(p, b) for p in self.parents.get(a, ()))

    def known_sort(self, s, loc):
        if s is not None and s != TIME and s not in self.decls:
            raise _err(UndeclaredSort, f"undeclared sort: {s}", loc)

    # ---------------------------------------------------------------- kinds

    def declare(self, pred, kind, sorts, loc):
        if pred in RESERVED:
            raise _err(KindViolation, f"{pred} is a reserved predicate", loc)
        for s in sorts:
            self.known_sort(s, loc)
        old = self.sigs.get(pred)
        if old is None:
            self.sigs[pred] = Signature(kind, tuple(sorts))
            return
        if old.kind != kind:
            raise _err(KindViolation, f"{pred} is a {old.kind} predicate but is used as {kind}", loc)
        if len(old.sorts) != len(sorts):
            raise _err(TimeArgViolation,
                       f"{pred} takes {len(old.sorts)} non-time arguments, not {len(sorts)}", loc)
        merged = tuple(a if a is not None else b for a, b in zip(old.sorts, sorts))
        self.sigs[pred] = Signature(kind, merged)

    def infer_kinds(self):
        for kind, pred, sorts, tok in self.raw.decls:
            self.declare(pred, kind, sorts, (tok.line, tok.col))
        for a, tok in self.raw.initial:
            self._infer(a.pred, FLUENT, len(a.args), (tok.line, tok.col))
        for section, kind in (("intensional", INTENSIONAL), ("events", COMPOSITE),
                              ("timeless", TIMELESS)):
            for c in self.raw.clauses[section]:
                h = c.head
                if h.pred in RESERVED:
                    raise _err(KindViolation, f"{h.pred} cannot head a {section} clause", c.loc)
                n = len(h.args) - TIME_ARGS[kind]
                if n < 0:
                    raise _err(TimeArgViolation, f"{h} lacks its time arguments", c.loc)
                self._infer(h.pred, kind, n, c.loc)
        for c in self.raw.clauses["post"]:
            h = c.head
            if h.pred not in ("initiated", "terminated") or len(h.args) != 3 \
                    or not isinstance(h.args[0], Fn):
                raise _err(KindViolation,
                           "post clauses must have initiated(F, T1, T2) or terminated(F, T1, T2) heads",
                           c.loc)
            f = h.args[0]
            self._infer(f.functor, FLUENT, len(f.args), c.loc)

    def _infer(self, pred, kind, n, loc):
        old = self.sigs.get(pred)
        if old is not None and old.kind != kind:
            raise _err(KindViolation, f"{pred} is a {old.kind} predicate but is used as {kind}", loc)
        if old is None:
            self.declare(pred, kind, (None,) * n, loc)
        elif len(old.sorts) != n:
            raise _err(TimeArgViolation, f"{pred} takes {len(old.sorts)} non-time arguments", loc)

    # ---------------------------------------------------------------- occurrences

    def kind_of(self, a: Atom, loc) -> str:
        if a.pred in ("initiated", "terminated"):
            raise _err(KindViolation, f"{a.pred} may only head a post clause", loc)
        if a.pred == "false":
            raise _err(KindViolation, "false may only head a pre clause", loc)
        sig = self.sigs.get(a.pred)
        if sig is None:
            raise _err(KindViolation, f"undeclared predicate {a.pred}/{len(a.args)}", loc)
        n = TIME_ARGS[sig.kind]
        if len(a.args) != len(sig.sorts) + n:
            raise _err(TimeArgViolation,
                       f"{a.pred} is a {sig.kind} predicate with {len(sig.sorts)} argument(s) "
                       f"and {n} time argument(s), got {len(a.args)} in {a}", loc)
        for t in a.args[len(a.args) - n:]:
            if not isinstance(t, (int, Var)):
                raise _err(TimeArgViolation, f"time argument {t} of {a} is not a time", loc)
        return sig.kind

    def check_conds(self, conds, loc, top_kinds, where: str):
        """Check kinds of a conjunction: events only as top-level conjuncts."""
        for cond in conds:
            if isinstance(cond, Atom):
                k = self.kind_of(cond, loc)
                if k not in top_kinds:
                    raise _err(KindViolation, f"{k} predicate {cond.pred} is not allowed in {where}", loc)
            elif is_nonatomic(cond):
                for a in atoms_of(cond):
                    k = self.kind_of(a, loc)
                    if k in (EVENT, COMPOSITE):
                        raise _err(KindViolation,
                                   f"event {a.pred} may only occur as a top-level conjunct", loc)
                    if k not in top_kinds:
                        raise _err(KindViolation,
                                   f"{k} predicate {a.pred} is not allowed in {where}", loc)

    # ---------------------------------------------------------------- sorts of variables

    def infer_var_sorts(self, parts, loc) -> dict:
        sorts: dict = {}
        eqs = []

        def note(name, s):
            if s is None:
                return
            self.known_sort(s, loc)
            old = sorts.get(name)
            if old is None or old == s or self.is_subsort(s, old):
                sorts[name] = s
            elif not self.is_subsort(old, s):
                raise _err(KindViolation, f"variable {name} is used as both {old} and {s}", loc)

        def term(t, s):
            if isinstance(t, Var):
                note(t.name, t.sort)
                note(t.name, s)
            elif isinstance(t, Fn):
                for a in t.args:
                    term(a, None)

        def atom_args(pred, args, with_time):
            sig = self.sigs.get(pred)
            if sig is None:
                for t in args:
                    term(t, None)
                return
            n = TIME_ARGS[sig.kind] if with_time else 0
            for t, s in zip(args, sig.sorts + (TIME,) * n):
                term(t, s)

        def walk(f):
            if isinstance(f, Atom):
                if f.pred in ("initiated", "terminated") and f.args and isinstance(f.args[0], Fn):
                    atom_args(f.args[0].functor, f.args[0].args, False)
                    for t in f.args[1:]:
                        term(t, TIME)
                else:
                    atom_args(f.pred, f.args, True)
            elif isinstance(f, (Cmp, Func)):
                for t in ((f.lhs, f.rhs) if isinstance(f, Cmp) else (f.a, f.b, f.out)):
                    term(t, TIME)
            elif isinstance(f, (Eq, Neq)):
                term(f.lhs, None)
                term(f.rhs, None)
                if isinstance(f.lhs, Var) and isinstance(f.rhs, Var):
                    eqs.append((f.lhs.name, f.rhs.name))
            elif isinstance(f, Not):
                walk(f.body)
            elif isinstance(f, (And, Or)):
                for p in f.parts:
                    walk(p)
            elif isinstance(f, Implies):
                walk(f.lhs)
                walk(f.rhs)
            elif isinstance(f, (Forall, Exists)):
                note(f.var.name, f.sort)
                walk(f.body)
            elif isinstance(f, tuple):
                for p in f:
                    walk(p)

        walk(parts)
        changed = True
        while changed:
            changed = False
            for a, b in eqs:
                for x, y in ((a, b), (b, a)):
                    if x in sorts and sorts.get(y) is None:
                        sorts[y] = sorts[x]
                        changed = True
        return sorts

    def resort(self, parts, loc):
        """Annotate every variable with its inferred sort; unsorted free variables are errors."""
        sorts = self.infer_var_sorts(parts, loc)
        for v in free_vars(parts):
            if v.name not in sorts:
                raise _err(UndeclaredSort, f"cannot determine the sort of variable {v.name}", loc)
        return _annotate(parts, sorts)

    # ---------------------------------------------------------------- time checks

    def edges(self, conds) -> list:
        kinds = {p: s.kind for p, s in self.sigs.items()}
        return [e for c in conds for e in edges_of(c, kinds)]

    def atom_times(self, conds, top_only=False) -> list:
        out = []
        for c in conds:
            atoms = [c] if isinstance(c, Atom) else ([] if top_only else list(atoms_of(c)))
            bound = set() if isinstance(c, Atom) else _bound_vars(c)
            for a in atoms:
                sig = self.sigs.get(a.pred)
                if sig is None:
                    continue
                n = TIME_ARGS[sig.kind]
                for t in a.args[len(a.args) - n:] if n else ():
                    if t not in bound:
                        out.append(t)
        return out

    def check_rule_times(self, r: ReactiveRule):
        everything = r.antecedent + r.consequent
        edges = self.edges(everything)
        ante = [t for t in _time_terms(r.antecedent) if isinstance(t, Var) or isinstance(t, int)]
        ante_vars = {t for t in _time_terms(r.antecedent) if isinstance(t, Var)}
        later = [t for t in _time_terms(r.consequent) if isinstance(t, Var) and t not in ante_vars]
        for c in dict.fromkeys(later):
            for a in dict.fromkeys(ante):
                if not implied_leq(edges, a, c):
                    raise _err(TimeArgViolation,
                               f"consequent time {c} is not constrained to be at or after "
                               f"antecedent time {a}", r.loc)

    def check_event_head_times(self, c: Clause):
        n = len(c.head.args)
        start, end = c.head.args[n - 2], c.head.args[n - 1]
        edges = self.edges(c.body)
        for t in dict.fromkeys(self.atom_times(c.body)):
            if not implied_leq(edges, start, t):
                raise _err(TimeArgViolation,
                           f"head start {start} of {c.head.pred} must not be after body time {t}", c.loc)
            if not implied_leq(edges, t, end):
                raise _err(TimeArgViolation,
                           f"head end {end} of {c.head.pred} must not be before body time {t}", c.loc)

    def check_action_args(self, known: set, conds, loc):
        """Reject simple events whose non-time arguments nothing else can bind (feedback variables)."""
        bound = set(known)
        for c in conds:
            if isinstance(c, Atom) and self.sigs[c.pred].kind == EVENT:
                continue
            bound |= free_vars(c)
        for c in conds:
            if isinstance(c, Atom) and self.sigs[c.pred].kind == EVENT:
                loose = [v for a in c.args[:-2] for v in term_vars(a) if v not in bound]
                if loose:
                    raise _err(KindViolation,
                               f"action {c} has argument {loose[0]} that no condition binds; "
                               f"selected actions must be ground apart from their times", loc)

    def check_actions(self, rules, goals, l_events):
        """Apply check_action_args to consequents, goals and the event clauses they can reach."""
        for r in rules:
            self.check_action_args(free_vars(And(r.antecedent)), r.consequent, r.loc)
        for conds, loc in goals:
            self.check_action_args(set(), conds, loc)
        by_head: dict = {}
        for c in l_events:
            by_head.setdefault(c.head.pred, []).append(c)
        todo = [a.pred for conds in [r.consequent for r in rules] + [g for g, _ in goals]
                for a in conds if isinstance(a, Atom) and a.pred in by_head]
        seen = set()
        while todo:
            pred = todo.pop()
            if pred in seen:
                continue
            seen.add(pred)
            for c in by_head[pred]:
                self.check_action_args(free_vars(c.head), c.body, c.loc)
                todo += [a.pred for a in c.body if isinstance(a, Atom) and a.pred in by_head]

    def check_domain_times(self, c: Clause, post: bool):
        t1 = t2 = None
        if post:
            t1, t2 = c.head.args[1], c.head.args[2]
        fluent_times = []
        for cond in c.body:
            for a in ([cond] if isinstance(cond, Atom) else atoms_of(cond)):
                k = self.sigs[a.pred].kind
                if k == EVENT:
                    s, e = a.args[-2], a.args[-1]
                    if t1 is None:
                        t1, t2 = s, e
                    elif (s, e) != (t1, t2):
                        raise _err(TimeArgViolation,
                                   f"event {a} must occur over ({t1}, {t2})", c.loc)
                elif k in (FLUENT, INTENSIONAL):
                    fluent_times.append((a, a.args[-1]))
        bound = set()
        for cond in c.body:
            bound |= _bound_vars(cond)
        for a, t in fluent_times:
            if t in bound:
                continue
            if t1 is None:
                t1 = t
            elif t != t1:
                raise _err(TimeArgViolation, f"fluent {a} must hold at {t1}", c.loc)

    def check_int_times(self, c: Clause):
        head_t = c.head.args[-1]
        for t in self.atom_times(c.body):
            if t != head_t:
                raise _err(TimeArgViolation,
                           f"body fluents of {c.head.pred} must share the head time {head_t}", c.loc)

    # ---------------------------------------------------------------- assembly

    def build(self) -> Program:
        raw = self.raw
        sorts = self.sorts()
        self.infer_kinds()

        initial = []
        for a, tok in raw.initial:
            loc = (tok.line, tok.col)
            if self.sigs[a.pred].kind != FLUENT:
                raise _err(KindViolation, f"{a.pred} in the initial state is not an extensional fluent", loc)
            if not is_ground(a):
                raise _err(KindViolation, f"initial fact {a} is not ground", loc)
            self.check_ground_sorts(a, loc)
            initial.append(a)

        rules = []
        all_kinds = (FLUENT, INTENSIONAL, TIMELESS, EVENT, COMPOSITE)
        for r in raw.reactive:
            self.check_conds(r.antecedent, r.loc, all_kinds, "reactive rules")
            self.check_conds(r.consequent, r.loc, all_kinds, "reactive rules")
            ante, cons = self.resort((r.antecedent, r.consequent), r.loc)
            r = ReactiveRule(ante, cons, r.loc)
            self.check_rule_times(r)
            rules.append(r)

        goals, goal_locs = [], []
        for conds, tok in raw.goals:
            loc = (tok.line, tok.col)
            self.check_conds(conds, loc, all_kinds, "goals")
            goals.append(self.resort(tuple(conds), loc))
            goal_locs.append(loc)

        def clauses(section, head_kinds, body_kinds, where):
            out = []
            for c in raw.clauses[section]:
                if section != "post" and section != "pre":
                    k = self.kind_of(c.head, c.loc)
                    if k not in head_kinds:
                        raise _err(KindViolation, f"{k} predicate {c.head.pred} cannot head {where}", c.loc)
                self.check_conds(c.body, c.loc, body_kinds, where)
                head, body = self.resort((c.head, c.body), c.loc)
                out.append(Clause(head, body, c.loc))
            return out

        l_int = clauses("intensional", (INTENSIONAL,), STATE_KINDS, "intensional clauses")
        for c in l_int:
            self.check_int_times(c)
        l_events = clauses("events", (COMPOSITE,), all_kinds, "event clauses")
        for c in l_events:
            self.check_event_head_times(c)
        l_timeless = clauses("timeless", (TIMELESS,), (TIMELESS,), "timeless clauses")
        for c in l_timeless:
            if not c.body:
                self.check_ground_sorts(c.head, c.loc)
        self.check_actions(rules, list(zip(goals, goal_locs)), l_events)
        d_post = clauses("post", (), (EVENT,) + STATE_KINDS, "post clauses")
        for c in d_post:
            f = c.head.args[0]
            self.kind_of(Atom(f.functor, f.args + (0,)), c.loc)
            self.check_domain_times(c, post=True)
        d_pre = []
        for c in raw.clauses["pre"]:
            if c.head != Atom("false", ()):
                raise _err(KindViolation, "pre clauses must have head false", c.loc)
        d_pre = clauses("pre", (), (EVENT,) + STATE_KINDS, "pre clauses")
        for c in d_pre:
            self.check_domain_times(c, post=False)

        cfg = raw.config
        config = Config(horizon=cfg.get("horizon", Config.horizon),
                        max_reductions=cfg.get("max", Config.max_reductions),
                        unfold_depth=cfg.get("unfold", Config.unfold_depth),
                        agents=tuple(cfg.get("agents", ())))
        signatures = tuple(sorted(self.sigs.items()))
        prog = Program(sorts=sorts, signatures=signatures, reactive_rules=tuple(rules),
                       l_int=tuple(l_int), l_events=tuple(l_events), l_timeless=tuple(l_timeless),
                       d_post=tuple(d_post), d_pre=tuple(d_pre),
                       initial_state=frozenset(initial), initial_goals=tuple(goals), config=config)
        unfolded = unfold_antecedents(prog)
        if unfolded == prog.reactive_rules:
            return prog
        return replace(prog, unfolded_rules=unfolded)

    def check_ground_sorts(self, a: Atom, loc):
        sig = self.sigs[a.pred]
        table = herbrand_universe(self.decls.values())
        for t, s in zip(a.args, sig.sorts):
            if s is not None and s != TIME and t not in table[s]:
                raise _err(KindViolation, f"{t} is not a member of sort {s} in {a}", loc)


def _bound_vars(f) -> set:
    if isinstance(f, (Forall, Exists)):
        return {f.var} | _bound_vars(f.body)
    if isinstance(f, Not):
        return _bound_vars(f.body)
    if isinstance(f, (And, Or)):
        out = set()
        for p in f.parts:
            out |= _bound_vars(p)
        return out
    if isinstance(f, Implies):
        return _bound_vars(f.lhs) | _bound_vars(f.rhs)
    return set()


def _time_terms(conds) -> list:
    out = []
    for v in sorted(free_vars(tuple(conds)), key=lambda v: v.name):
        if v.sort == TIME:
            out.append(v)
    for c in conds:
        if isinstance(c, Atom):
            out.extend(t for t in c.args if isinstance(t, int))
    return out


def _annotate(f, sorts: dict, bound: dict | None = None):
    bound = bound or {}

    def t_(t):
        if isinstance(t, Var):
            s = bound.get(t.name, sorts.get(t.name))
            return Var(t.name, s)
        if isinstance(t, Fn) and t.args:
            return Fn(t.functor, tuple(t_(a) for a in t.args))
        return t

    if isinstance(f, Atom):
        return Atom(f.pred, tuple(t_(a) for a in f.args))
    if isinstance(f, Cmp):
        return Cmp(f.op, t_(f.lhs), t_(f.rhs), f.offset)
    if isinstance(f, Eq):
        return Eq(t_(f.lhs), t_(f.rhs))
    if isinstance(f, Neq):
        return Neq(t_(f.lhs), t_(f.rhs))
    if isinstance(f, Func):
        return Func(f.name, t_(f.a), t_(f.b), t_(f.out))
    if isinstance(f, Not):
        return Not(_annotate(f.body, sorts, bound))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_annotate(p, sorts, bound) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(_annotate(f.lhs, sorts, bound), _annotate(f.rhs, sorts, bound))
    if isinstance(f, (Forall, Exists)):
        inner = dict(bound)
        inner[f.var.name] = f.sort
        return type(f)(Var(f.var.name, f.sort), f.sort, _annotate(f.body, sorts, inner))
    if isinstance(f, tuple):
        return tuple(_annotate(p, sorts, bound) for p in f)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------- unfolding

def unfold_antecedents(program: Program) -> tuple:
    """Replace composite events in rule antecedents by their L_events definitions."""
    composite = program.preds_of(COMPOSITE)
    limit = program.config.unfold_depth
    out = []
    counter = [0]

    def expand(rule: ReactiveRule, depths: tuple):
        # depths[i] is how many definitions were unfolded to produce conjunct i
        idx = next((i for i, c in enumerate(rule.antecedent)
                    if isinstance(c, Atom) and c.pred in composite), None)
        if idx is None:
            out.append(rule)
            return
        if depths[idx] >= limit:
            raise _err(UnfoldDepthExceeded,
                       f"unfolding {rule.antecedent[idx].pred} in a rule antecedent exceeds depth {limit}",
                       rule.loc)
        target = rule.antecedent[idx]
        for c in program.l_events:
            if c.head.pred != target.pred:
                continue
            counter[0] += 1
            suffix = f"_{counter[0]}"
            head = rename_formula(c.head, suffix)
            body = rename_formula(c.body, suffix)
            s = unify(target, head)
            if s is None:
                continue
            ante = rule.antecedent[:idx] + body + rule.antecedent[idx + 1:]
            ds = depths[:idx] + (depths[idx] + 1,) * len(body) + depths[idx + 1:]
            expand(ReactiveRule(subst(ante, s), subst(rule.consequent, s), rule.loc), ds)

    for r in program.reactive_rules:
        expand(r, (0,) * len(r.antecedent))
    return tuple(out)


def build_program(raw) -> Program:
    return _Checker(raw).build()


def for_agent(program: Program, agent) -> Program:
    """Instantiate the reserved constant ``self`` with an agent name."""
    def sub(f):
        return _replace_const(f, SELF, agent)

    return replace(
        program,
        reactive_rules=tuple(ReactiveRule(sub(r.antecedent), sub(r.consequent), r.loc)
                             for r in program.reactive_rules),
        unfolded_rules=tuple(ReactiveRule(sub(r.antecedent), sub(r.consequent), r.loc)
                             for r in program.unfolded_rules),
        l_int=tuple(Clause(sub(c.head), sub(c.body), c.loc) for c in program.l_int),
        l_events=tuple(Clause(sub(c.head), sub(c.body), c.loc) for c in program.l_events),
        d_post=tuple(Clause(sub(c.head), sub(c.body), c.loc) for c in program.d_post),
        d_pre=tuple(Clause(sub(c.head), sub(c.body), c.loc) for c in program.d_pre),
        initial_goals=tuple(sub(g) for g in program.initial_goals),
    )


def _replace_const(f, old: Fn, new):
    def t_(t):
        if t == old:
            return new
        if isinstance(t, Fn) and t.args:
            return Fn(t.functor, tuple(t_(a) for a in t.args))
        return t

    if isinstance(f, Atom):
        return Atom(f.pred, tuple(t_(a) for a in f.args))
    if isinstance(f, Cmp):
        return Cmp(f.op, t_(f.lhs), t_(f.rhs), f.offset)
    if isinstance(f, (Eq, Neq)):
        return type(f)(t_(f.lhs), t_(f.rhs))
    if isinstance(f, Func):
        return Func(f.name, t_(f.a), t_(f.b), t_(f.out))
    if isinstance(f, Not):
        return Not(_replace_const(f.body, old, new))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_replace_const(p, old, new) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(_replace_const(f.lhs, old, new), _replace_const(f.rhs, old, new))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, f.sort, _replace_const(f.body, old, new))
    if isinstance(f, tuple):
        return tuple(_replace_const(p, old, new) for p in f)
    raise TypeError(f"not a formula: {f!r}")
