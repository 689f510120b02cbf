"""Destructive state transitions and integrity checking."""

from __future__ import annotations

from dataclasses import dataclass

from .fol import Model, query
from .grounder import sem
from .sorts import Universe, make_universe
from .syntax import Clause, Program, stamp
from .terms import Atom, Fn, fmt_atoms

_UNIVERSES: dict = {}
_TIMELESS: dict = {}


@dataclass(frozen=True)
class State:
    """Extensional fluents without time stamps, current at time ``time``."""

    facts: frozenset = frozenset()
    index: int = 0
    time: int = 0

    def stamped(self) -> frozenset:
        return frozenset(stamp(a, self.time) for a in self.facts)

    def __str__(self) -> str:
        return "{" + ", ".join(fmt_atoms(self.facts)) + "}"


@dataclass(frozen=True)
class EventSet:
    """Simple events over ``interval``, kept with their two time stamps."""

    events: frozenset = frozenset()
    interval: tuple = (0, 1)

    @classmethod
    def of(cls, atoms, start: int, end: int) -> "EventSet":
        return cls(frozenset(stamp(a, start, end) for a in atoms), (start, end))

    def unstamped(self) -> frozenset:
        return frozenset(Atom(a.pred, a.args[:-2]) for a in self.events)

    def __iter__(self):
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)


def universe_for(program: Program, horizon: int | None = None) -> Universe:
    horizon = program.config.horizon if horizon is None else horizon
    key = (id(program), horizon)
    hit = _UNIVERSES.get(key)
    if hit is None or hit[0] is not program:
        hit = (program, make_universe(program.sorts, horizon))
        _UNIVERSES[key] = hit
    return hit[1]


def timeless_atoms(program: Program) -> frozenset:
    """The time-independent model of L_timeless, computed once per program."""
    hit = _TIMELESS.get(id(program))
    if hit is None or hit[0] is not program:
        u = universe_for(program).with_time(())
        atoms = sem(program.l_timeless, (), program.kinds, u).atoms if program.l_timeless else frozenset()
        hit = (program, atoms)
        _TIMELESS[id(program)] = hit
    return hit[1]


def current_model(program: Program, state: State, ev: EventSet | None = None,
                  extra_clauses=()) -> Model:
    """sem(L_int ∪ L_timeless ∪ S* ∪ ev*), optionally with further clauses such as D_post."""
    times = {state.time}
    if ev is not None:
        times.update(ev.interval)
    u = universe_for(program).with_time(sorted(times))
    facts = set(state.stamped()) | timeless_atoms(program)
    if ev is not None:
        facts |= ev.events
    clauses = tuple(program.l_int) + tuple(extra_clauses)
    if not clauses:
        return Model(facts)
    return sem(clauses, facts, program.kinds, u)


def compute_deltas(program: Program, s_prev: State, ev: EventSet) -> tuple[frozenset, frozenset]:
    """Fluents initiated and terminated by ``ev`` in the transition out of ``s_prev``."""
    if not ev.events or not program.d_post:
        return frozenset(), frozenset()
    m = current_model(program, s_prev, ev, program.d_post)
    initiated, terminated = set(), set()
    for name, out in (("initiated", initiated), ("terminated", terminated)):
        for a in m.by_pred(name):
            f = a.args[0]
            if isinstance(f, Fn) and tuple(a.args[1:]) == tuple(ev.interval):
                out.add(Atom(f.functor, f.args))
    return frozenset(initiated), frozenset(terminated)


def apply_transition(s_prev: State, initiated, terminated) -> State:
    """(S - terminated) ∪ initiated, one cycle later; initiation wins on overlap."""
    facts = (s_prev.facts - frozenset(terminated)) | frozenset(initiated)
    return State(facts, s_prev.index + 1, s_prev.time + 1)


def violations(program: Program, model: Model, universe: Universe):
    """Ground instances of D_pre bodies true in ``model``, as (clause, answer) pairs."""
    for c in program.d_pre:
        for ans in query(c.body, model, universe):
            yield c, ans


def check_integrity(program: Program, s_prev: State, ev: EventSet) -> tuple[bool, Clause | None]:
    """D_pre holds when no constraint body is true in sem(L_int ∪ L_timeless ∪ S* ∪ ev*)."""
    if not program.d_pre:
        return True, None
    m = current_model(program, s_prev, ev)
    u = universe_for(program).with_time(sorted({s_prev.time, *ev.interval}))
    for c, _ in violations(program, m, u):
        return False, c
    return True, None
