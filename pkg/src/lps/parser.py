"""Concrete syntax for LPS programs and event scripts."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import KindViolation, LPSSyntaxError, UnknownEventPredicate
from .lexer import Cursor, Token, tokenize
from .sorts import SortDecl
from .syntax import (And, Clause, Cmp, Eq, Exists, Forall, Func, Implies, Neq, Not,
                     Or, ReactiveRule)
from .terms import Atom, Fn, Var

SECTIONS = ("sorts", "declare", "config", "initial", "goals", "reactive", "intensional",
            "events", "timeless", "post", "pre")
DECL_KINDS = {"fluent": "fluent", "intensional": "intensional", "event": "event",
              "action": "event", "composite": "composite", "timeless": "timeless"}
COMPARATORS = ("<", "=<", ">", ">=", "=", "\\=", "!=")


@dataclass
class RawProgram:
    sorts: list = field(default_factory=list)
    decls: list = field(default_factory=list)  # (kind, pred, sorts, tok)
    config: dict = field(default_factory=dict)
    initial: list = field(default_factory=list)  # (atom, tok)
    goals: list = field(default_factory=list)  # (conds, tok)
    reactive: list = field(default_factory=list)
    clauses: dict = field(default_factory=lambda: {k: [] for k in
                                                   ("intensional", "events", "timeless", "post", "pre")})


class Parser:
    def __init__(self, text: str):
        self.c = Cursor(tokenize(text))

    # ------------------------------------------------------------ terms

    def term(self):
        c = self.c
        t = c.tok
        if t.kind == "var":
            c.take()
            sort = None
            if c.at(":") and c.peek().kind == "name":
                c.take()
                sort = c.take().text
            return Var(t.text, sort)
        if t.kind == "int":
            c.take()
            return int(t.text)
        if c.at("-") and c.peek().kind == "int":
            c.take()
            return -int(c.take().text)
        if t.kind == "name":
            c.take()
            if c.accept("("):
                args = [self.term()]
                while c.accept(","):
                    args.append(self.term())
                c.expect(")")
                return Fn(t.text, tuple(args))
            return Fn(t.text, ())
        c.fail(f"expected a term but found '{t}'")

    def members(self) -> list:
        """A ground term that may contain integer ranges ``a..b``; returns its expansion."""
        c = self.c
        t = c.tok
        if t.kind == "int":
            c.take()
            lo = int(t.text)
            if c.accept(".."):
                hi = int(c.expect_kind("int").text)
                return list(range(lo, hi + 1))
            return [lo]
        if t.kind == "name":
            c.take()
            if c.accept("("):
                groups = [self.members()]
                while c.accept(","):
                    groups.append(self.members())
                c.expect(")")
                return [Fn(t.text, combo) for combo in itertools.product(*groups)]
            return [Fn(t.text, ())]
        c.fail(f"expected a ground term but found '{t}'")

    def texpr(self):
        base = self.term()
        off = 0
        while self.c.at("+") or (self.c.at("-") and self.c.peek().kind == "int"):
            sign = 1 if self.c.take().text == "+" else -1
            off += sign * int(self.c.expect_kind("int").text)
        return base, off

    # ------------------------------------------------------------ formulas

    def formula(self):
        lhs = self.disjunction()
        if self.c.accept("->"):
            return Implies(lhs, self.formula())
        return lhs

    def disjunction(self):
        parts = [self.conjunction()]
        while self.c.accept("|"):
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self):
        parts = [self.unary()]
        while self.c.accept("&"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def conj_list(self) -> list:
        parts = [self.unary()]
        while self.c.accept("&"):
            parts.append(self.unary())
        return parts

    def unary(self):
        c = self.c
        if c.accept("~"):
            return Not(self.unary())
        if c.tok.kind == "name" and c.tok.text in ("forall", "exists") and c.peek().kind == "var":
            q = c.take().text
            v = c.take().text
            c.expect(":")
            sort = c.expect_kind("name").text
            body = self.unary()
            return (Forall if q == "forall" else Exists)(Var(v, sort), sort, body)
        if c.accept("("):
            f = self.formula()
            c.expect(")")
            return f
        if c.accept("["):
            f = self.formula()
            c.expect("]")
            return f
        return self.primary()

    def primary(self):
        c = self.c
        start = c.tok
        lhs, loff = self.texpr()
        if c.tok.kind == "op" and c.tok.text in COMPARATORS:
            op = c.take().text
            rhs, roff = self.texpr()
            return self.comparison(op, lhs, loff, rhs, roff, start)
        if loff:
            c.fail("arithmetic offset outside a comparison", start)
        if not isinstance(lhs, Fn):
            c.fail(f"expected a condition but found '{start}'", start)
        return self.normalize(lhs, start)

    def comparison(self, op, lhs, loff, rhs, roff, tok: Token):
        if op in ("=", "\\=", "!="):
            if loff or roff:
                self.c.fail("offsets are only allowed in < =< > >= comparisons", tok)
            return Eq(lhs, rhs) if op == "=" else Neq(lhs, rhs)
        if op in ("<", "=<"):
            return Cmp(op, lhs, rhs, roff - loff)
        return Cmp("<" if op == ">" else "=<", rhs, lhs, loff - roff)

    def normalize(self, t: Fn, tok: Token):
        name, args = t.functor, t.args
        if name == "holds":
            if len(args) != 2 or not isinstance(args[0], Fn):
                self.c.fail("holds/2 expects a fluent term and a time", tok)
            return Atom(args[0].functor, args[0].args + (args[1],))
        if name == "happens":
            if len(args) != 3 or not isinstance(args[0], Fn):
                self.c.fail("happens/3 expects an event term and two times", tok)
            return Atom(args[0].functor, args[0].args + args[1:])
        if name == "succ":
            if len(args) != 2:
                self.c.fail("succ/2 expects two times", tok)
            return Cmp("succ", args[0], args[1], 0)
        if name in ("max", "min") and len(args) == 3:
            return Func(name, *args)
        return Atom(name, args)

    # ------------------------------------------------------------ sections

    def program(self) -> RawProgram:
        raw = RawProgram()
        c = self.c
        while c.tok.kind != "eof":
            head = c.expect_kind("name")
            if head.text == "temporal":
                raise KindViolation("temporal predicates are built in and cannot be defined",
                                    head.line, head.col)
            if head.text not in SECTIONS:
                c.fail(f"unknown section '{head.text}'", head)
            c.expect("{")
            while not c.at("}"):
                if c.tok.kind == "eof":
                    c.fail(f"unterminated section '{head.text}'")
                getattr(self, "sec_" + head.text)(raw)
            c.expect("}")
        return raw

    def sec_sorts(self, raw: RawProgram):
        c = self.c
        tok = c.expect_kind("name")
        supers = []
        if c.accept("<"):
            supers.append(c.expect_kind("name").text)
            while c.accept(","):
                supers.append(c.expect_kind("name").text)
        c.expect("=")
        c.expect("{")
        members = []
        if not c.at("}"):
            members.extend(self.members())
            while c.accept(","):
                members.extend(self.members())
        c.expect("}")
        c.expect(".")
        raw.sorts.append((SortDecl(tok.text, tuple(members), tuple(supers)), tok))

    def sec_declare(self, raw: RawProgram):
        c = self.c
        kt = c.expect_kind("name")
        if kt.text not in DECL_KINDS:
            c.fail(f"unknown predicate kind '{kt.text}'", kt)
        pt = c.expect_kind("name")
        sorts = []
        if c.accept("("):
            while True:
                if c.accept("_"):
                    sorts.append(None)
                elif c.tok.kind == "var" and c.tok.text == "_":
                    c.take()
                    sorts.append(None)
                else:
                    sorts.append(c.expect_kind("name").text)
                if not c.accept(","):
                    break
            c.expect(")")
        c.expect(".")
        raw.decls.append((DECL_KINDS[kt.text], pt.text, tuple(sorts), pt))

    def sec_config(self, raw: RawProgram):
        c = self.c
        key = c.expect_kind("name")
        c.expect("=")
        if key.text in ("horizon", "max", "unfold"):
            raw.config[key.text] = int(c.expect_kind("int").text)
        elif key.text == "agents":
            c.expect("{")
            members = []
            if not c.at("}"):
                members.extend(self.members())
                while c.accept(","):
                    members.extend(self.members())
            c.expect("}")
            raw.config["agents"] = tuple(members)
        else:
            c.fail(f"unknown config key '{key.text}'", key)
        c.expect(".")

    def sec_initial(self, raw: RawProgram):
        tok = self.c.tok
        for t in self.members():
            raw.initial.append((Atom(t.functor, t.args), tok))
        self.c.expect(".")

    def sec_goals(self, raw: RawProgram):
        tok = self.c.tok
        conds = self.conj_list()
        self.c.expect(".")
        raw.goals.append((tuple(conds), tok))

    def sec_reactive(self, raw: RawProgram):
        tok = self.c.tok
        ante = self.conj_list()
        self.c.expect("->")
        cons = self.conj_list()
        self.c.expect(".")
        raw.reactive.append(ReactiveRule(tuple(ante), tuple(cons), (tok.line, tok.col)))

    def _clause(self, raw: RawProgram, section: str):
        c = self.c
        tok = c.tok
        head = self.primary()
        if not isinstance(head, Atom):
            c.fail("clause head must be an atom", tok)
        body = ()
        if c.accept("<-"):
            f = self.formula()
            body = f.parts if isinstance(f, And) else (f,)
        c.expect(".")
        raw.clauses[section].append(Clause(head, tuple(body), (tok.line, tok.col)))

    def sec_intensional(self, raw):
        self._clause(raw, "intensional")

    def sec_events(self, raw):
        self._clause(raw, "events")

    def sec_timeless(self, raw):
        self._clause(raw, "timeless")

    def sec_post(self, raw):
        self._clause(raw, "post")

    def sec_pre(self, raw):
        self._clause(raw, "pre")


def parse_program(text: str):
    """Parse and validate an LPS program."""
    from .program import build_program

    return build_program(Parser(text).program())


def parse_formula(text: str):
    p = Parser(text)
    f = p.formula()
    if p.c.tok.kind != "eof":
        p.c.fail(f"unexpected '{p.c.tok}' after formula")
    return f


def parse_term(text: str):
    p = Parser(text)
    t = p.term()
    if p.c.tok.kind != "eof":
        p.c.fail(f"unexpected '{p.c.tok}' after term")
    return t


def parse_atom(text: str) -> Atom:
    f = parse_formula(text)
    if not isinstance(f, Atom):
        raise LPSSyntaxError(f"expected an atom, got {text!r}")
    return f


# ---------------------------------------------------------------- scripts

@dataclass(frozen=True)
class EventScript:
    """Unstamped ground events keyed by cycle; cycle i events run from i-1 to i."""

    events: tuple = ()  # sorted (cycle, tuple of atoms)

    @property
    def table(self) -> dict:
        return dict(self.events)

    def ext(self, i: int) -> tuple:
        return tuple(Atom(a.pred, a.args + (i - 1, i)) for a in self.table.get(i, ()))

    def unstamped(self, i: int) -> tuple:
        return self.table.get(i, ())

    @property
    def last_cycle(self) -> int:
        return max((i for i, _ in self.events), default=0)


def _parse_script(text: str) -> dict:
    p = Parser(text)
    c = p.c
    out: dict = {}
    while c.tok.kind != "eof":
        c.expect("@")
        i = int(c.expect_kind("int").text)
        c.expect(":")
        items = out.setdefault(i, [])
        while c.tok.kind == "name":
            for t in p.members():
                items.append((Atom(t.functor, t.args), c.toks[c.i - 1]))
            c.accept(",")
        c.accept(".")
    return out


def parse_event_script(text: str, program=None) -> EventScript:
    """Parse ``@i: e1, e2`` lines; events must be simple events of ``program`` when given."""
    raw = _parse_script(text)
    table = {}
    for i, items in sorted(raw.items()):
        if i < 1:
            raise LPSSyntaxError(f"cycle numbers start at 1, got {i}")
        atoms = []
        for a, tok in items:
            if program is not None:
                sig = program.sigs.get(a.pred)
                if sig is None or sig.kind != "event":
                    raise UnknownEventPredicate(f"unknown event predicate {a.pred}", tok.line, tok.col)
                if sig.sorts is not None and len(sig.sorts) != len(a.args):
                    raise UnknownEventPredicate(
                        f"{a.pred} expects {len(sig.sorts)} arguments", tok.line, tok.col)
            atoms.append(a)
        table[i] = tuple(dict.fromkeys(atoms))
    return EventScript(tuple(sorted(table.items())))


def parse_choice_script(text: str) -> dict:
    """Arbitration choices: cycle -> list of unstamped actions to commit."""
    return {i: [a for a, _ in items] for i, items in _parse_script(text).items()}
