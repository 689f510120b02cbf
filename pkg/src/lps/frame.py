"""Model construction with frame axioms, used as an oracle against destructive updates."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import VocabularyMismatch
from .fol import Model
from .grounder import ground_program, predicate_levels, sem
from .sorts import Universe, make_universe
from .syntax import COMPOSITE, FLUENT, INTENSIONAL, Clause, Not, Program
from .terms import Atom, Fn, Var

SUCC = "succ"
META = ("initiated", "terminated")


def merged_program(program: Program, agents=None) -> Program:
    """One program whose logic clauses are the union over agents' instantiated copies."""
    from dataclasses import replace

    from .program import for_agent

    names = program.config.agents if agents is None else agents
    if not names:
        return program
    copies = [for_agent(program, n) for n in names]

    def union(attr):
        return tuple(dict.fromkeys(c for p in copies for c in getattr(p, attr)))

    return replace(program, l_int=union("l_int"), l_events=union("l_events"),
                   d_post=union("d_post"), d_pre=union("d_pre"),
                   reactive_rules=union("reactive_rules"), unfolded_rules=union("rules"),
                   initial_goals=union("initial_goals"))


def _universe(program: Program, horizon: int) -> Universe:
    return make_universe(program.sorts, horizon)


def _logic(program: Program) -> tuple:
    return tuple(program.l_int) + tuple(program.l_timeless) + tuple(program.l_events)


def stamped_states(states) -> frozenset:
    return frozenset(a for s in states for a in s.stamped())


def stamped_events(events) -> frozenset:
    return frozenset(a for ev in events for a in ev.events)


def run_model(program: Program, states, events, with_dpost: bool = True) -> Model:
    """perfect(L ∪ S* ∪ ev*), with D_post added when ``with_dpost``."""
    horizon = len(states) - 1
    clauses = _logic(program) + (tuple(program.d_post) if with_dpost else ())
    facts = stamped_states(states) | stamped_events(events)
    if not clauses:
        return Model(facts)
    return sem(clauses, facts, program.kinds, _universe(program, horizon))


# ---------------------------------------------------------------- the event theory

def _fluent_vars(program: Program, pred: str) -> tuple:
    sig = program.sigs[pred]
    sorts = sig.sorts or ()
    return tuple(Var(f"X{i}", s) for i, s in enumerate(sorts))


def et_clauses(program: Program) -> tuple:
    """The two event-theory clauses, written once per extensional fluent predicate."""
    out = []
    t1, t2 = Var("T1", "time"), Var("T2", "time")
    for pred in sorted(program.preds_of(FLUENT)):
        xs = _fluent_vars(program, pred)
        f = Fn(pred, xs)
        out.append(Clause(Atom(pred, xs + (t2,)), (Atom("initiated", (f, t1, t2)),)))
        out.append(Clause(Atom(pred, xs + (t2,)),
                          (Atom(pred, xs + (t1,)), Atom(SUCC, (t1, t2)),
                           Not(Atom("terminated", (f, t1, t2))))))
    return tuple(out)


@dataclass
class ETProgram:
    clauses: list
    horizon: int
    universe: Universe
    kinds: dict
    levels: dict = field(default_factory=dict)

    @property
    def width(self) -> int:
        return max(self.levels.values(), default=0) + 1

    def block(self, a: Atom) -> int:
        """Index of the time-ordered block holding ``a``; composites sit above every time point."""
        kind = self.kinds.get(a.pred)
        if a.pred in META:
            end = a.args[-1]
            return 3 * (end - 1) + 2 if end >= 1 else 0
        if kind == INTENSIONAL:
            return 3 * a.args[-1] + 1
        if kind == FLUENT:
            t = a.args[-1]
            return 3 * t if t >= 1 else 0
        if kind == COMPOSITE:
            return 3 * (self.horizon + 1) + 1
        return 0  # events, timeless facts, succ

    def stratum(self, a: Atom) -> int:
        return self.block(a) * self.width + self.levels.get(a.pred, 0)

    def frame_instances(self) -> list:
        return [c for c in self.clauses if len(c.body) == 3 and isinstance(c.body[1], Atom)
                and c.body[1].pred == SUCC]


def build_et_program(program: Program, s0, events, horizon: int | None = None) -> ETProgram:
    """Ground ET ∪ D_post ∪ L ∪ S0* ∪ ev*, including frame instances over non-consecutive times."""
    horizon = len(events) if horizon is None else horizon
    u = _universe(program, horizon)
    facts = set(s0.stamped()) | stamped_events(events)
    facts |= {Atom(SUCC, (i, i + 1)) for i in range(horizon)}
    et = et_clauses(program)
    rules = _logic(program) + tuple(program.d_post) + et
    ground = ground_program(rules, facts, u)
    possible = {c.head for c in ground} | facts
    # relevance grounding only yields frame instances between successive times;
    # the remaining instances are added so the reduct has something to remove
    extra = []
    for a in sorted(possible, key=str):
        if program.kind(a.pred) != FLUENT:
            continue
        xs, t2 = a.args[:-1], a.args[-1]
        if t2 == 0:
            continue  # nothing precedes t0, so no frame instance belongs to the bottom block
        f = Fn(a.pred, xs)
        for t1 in range(horizon + 1):
            if t1 + 1 != t2:
                extra.append(Clause(a, (Atom(a.pred, xs + (t1,)), Atom(SUCC, (t1, t2)),
                                        Not(Atom("terminated", (f, t1, t2))))))
    clauses = [Clause(a, ()) for a in sorted(facts, key=str)] + ground + extra
    kinds = dict(program.kinds)
    levels = predicate_levels(kinds, rules)
    return ETProgram(clauses, horizon, u, kinds, levels)


def et_model(etp: ETProgram) -> Model:
    from .strat import weakly_perfect_model

    m = weakly_perfect_model(etp.clauses, etp.stratum, etp.universe)
    return Model(a for a in m if a.pred != SUCC)


# ---------------------------------------------------------------- the comparison

@dataclass
class FrameReport:
    equal: bool
    missing: frozenset  # in the event-theory model only
    extra: frozenset  # in the run model only
    first_equal: bool | None = None

    def as_dict(self) -> dict:
        from .terms import fmt_atoms

        return {"equal": self.equal, "first_formulation_equal": self.first_equal,
                "only_in_et_model": fmt_atoms(self.missing),
                "only_in_run_model": fmt_atoms(self.extra)}


def _check_vocabulary(m: Model, program: Program | None):
    if program is None:
        return
    known = set(program.kinds) | set(META)
    unknown = sorted({a.pred for a in m} - known)
    if unknown:
        raise VocabularyMismatch(f"predicates outside the program vocabulary: {', '.join(unknown)}")


def frame_equivalence(run: Model, et: Model, program: Program | None = None,
                      base: Model | None = None, dpost_heads=None) -> FrameReport:
    """Compare the run model (with D_post) to the event-theory model.

    When ``base`` (the run model without D_post) is given, the formulation that removes
    every ground D_post head from the event-theory model is checked as well.
    """
    for m in (run, et) + ((base,) if base is not None else ()):
        _check_vocabulary(m, program)
    missing = et.atoms - run.atoms
    extra = run.atoms - et.atoms
    first = None
    if base is not None:
        heads = dpost_heads
        if heads is None:
            heads = {a for a in et.atoms | run.atoms if a.pred in META}
        first = base.atoms == et.atoms - frozenset(heads)
    return FrameReport(not missing and not extra, frozenset(missing), frozenset(extra), first)


def frame_check(program: Program, states, events) -> FrameReport:
    """Build both models for a run and compare them under both formulations."""
    horizon = len(states) - 1
    etp = build_et_program(program, states[0], events, horizon)
    et = et_model(etp)
    heads = {c.head for c in etp.clauses if c.head.pred in META}
    return frame_equivalence(run_model(program, states, events, True), et, program,
                             run_model(program, states, events, False), heads)
