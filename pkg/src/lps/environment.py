"""The shared environment: arbitration of concurrent actions and the lockstep multi-agent loop."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .cycle import AgentState, CycleRecord, FALSE_STATUS, OPEN, run_cycle
from .errors import InconsistentExternalEvents, ScriptedChoiceError
from .parser import EventScript
from .program import for_agent
from .state import EventSet, State, apply_transition, check_integrity, compute_deltas
from .syntax import Program, stamp
from .terms import fmt_atoms

GREEDY, RANDOM, SCRIPTED = "greedy", "random", "scripted"


@dataclass
class ArbitrationPolicy:
    strategy: str = GREEDY
    seed: int = 0
    choices: dict = field(default_factory=dict)  # cycle -> unstamped actions, for SCRIPTED

    def __post_init__(self):
        if self.strategy not in (GREEDY, RANDOM, SCRIPTED):
            raise ValueError(f"unknown arbitration strategy {self.strategy!r}")
        self._rng = random.Random(self.seed)


@dataclass
class Arbitration:
    ev: EventSet
    accepted: tuple
    rejected: tuple
    scripted: bool = False

    def as_dict(self) -> dict:
        return {"accepted": fmt_atoms(self.accepted), "rejected": fmt_atoms(self.rejected),
                "scripted": self.scripted}


def _ok(program: Program, s_prev: State, events, interval) -> bool:
    return check_integrity(program, s_prev, EventSet(frozenset(events), interval))[0]


def arbitrate(candidates, ext, program: Program, s_prev: State,
              policy: ArbitrationPolicy | None = None, cycle: int | None = None) -> Arbitration:
    """ext ∪ acts for a subset acts of the submitted candidates that satisfies D_pre.

    ``candidates`` is one sequence of stamped actions per agent, in agent order.
    """
    policy = policy or ArbitrationPolicy()
    interval = (s_prev.time, s_prev.time + 1)
    ext = tuple(dict.fromkeys(ext))
    if not _ok(program, s_prev, ext, interval):
        raise InconsistentExternalEvents(
            f"external events at cycle {cycle} violate a precondition: {', '.join(fmt_atoms(ext))}")
    submitted = list(dict.fromkeys(a for acts in candidates for a in acts))
    if policy.strategy == SCRIPTED and cycle in policy.choices:
        chosen = [stamp(a, *interval) for a in policy.choices[cycle]]
        missing = [a for a in chosen if a not in submitted]
        if missing:
            raise ScriptedChoiceError(
                f"cycle {cycle}: scripted actions were never submitted: {', '.join(fmt_atoms(missing))}")
        if not _ok(program, s_prev, ext + tuple(chosen), interval):
            raise ScriptedChoiceError(f"cycle {cycle}: scripted actions violate a precondition")
        accepted = tuple(dict.fromkeys(chosen))
        rejected = tuple(a for a in submitted if a not in accepted)
        return Arbitration(EventSet(frozenset(ext + accepted), interval), accepted, rejected, True)
    order = list(submitted)
    if policy.strategy == RANDOM:
        policy._rng.shuffle(order)
    accepted, rejected = [], []
    for a in order:
        if _ok(program, s_prev, ext + tuple(accepted) + (a,), interval):
            accepted.append(a)
        else:
            rejected.append(a)
    return Arbitration(EventSet(frozenset(ext + tuple(accepted)), interval), tuple(accepted),
                       tuple(rejected))


@dataclass
class CycleResult:
    cycle: int
    time: int
    state: State
    events: EventSet
    agents: list  # (name, CycleRecord)
    arbitration: Arbitration

    def as_dict(self) -> dict:
        return {
            "cycle": self.cycle,
            "time": self.time,
            "state": fmt_atoms(self.state.facts),
            "events": fmt_atoms(self.events.events),
            "agents": [{"agent": "" if name is None else str(name), **rec.as_dict()}
                       for name, rec in self.agents],
            "arbitration": self.arbitration.as_dict(),
        }


@dataclass
class Trace:
    program: Program
    states: list  # S_0 .. S_n
    events: list  # ev_1 .. ev_n
    cycles: list = field(default_factory=list)
    agents: list = field(default_factory=list)
    stopped: str | None = None  # why the run ended early, if it did

    @property
    def horizon(self) -> int:
        return len(self.events)

    @property
    def goals(self) -> list:
        return [g for a in self.agents for g in a.goals]

    @property
    def all_true(self) -> bool:
        return all(g.status not in (OPEN, FALSE_STATUS) for g in self.goals)

    @property
    def failed(self) -> bool:
        return any(g.status == FALSE_STATUS for g in self.goals)


def make_agents(program: Program, agents=None, **options) -> list[AgentState]:
    """One agent per name, each running ``program`` with ``self`` bound to its name."""
    names = program.config.agents if agents is None else agents
    if not names:
        return [AgentState.create(program, None, **options)]
    return [AgentState.create(for_agent(program, n), n, **options) for n in names]


def run_system(program: Program, script: EventScript | None = None, horizon: int | None = None,
               policy: ArbitrationPolicy | None = None, agents=None, fail_stop: bool = False,
               **options) -> Trace:
    """Lockstep: arbitrate, transition, then every agent runs one cycle on the new state."""
    script = script or EventScript()
    horizon = program.config.horizon if horizon is None else horizon
    policy = policy or ArbitrationPolicy()
    if agents is None or not agents or not isinstance(agents[0], AgentState):
        agents = make_agents(program, agents or None, horizon=horizon, **options)
    state = State(program.initial_state, 0, 0)
    trace = Trace(program, [state], [], agents=agents)
    for i in range(1, horizon + 1):
        arb = arbitrate([a.candidates for a in agents], script.ext(i), program, state, policy, i)
        ev = arb.ev
        initiated, terminated = compute_deltas(program, state, ev)
        state = apply_transition(state, initiated, terminated)
        records = []
        for agent in agents:
            rec = CycleRecord()
            run_cycle(agent, state, ev, rec)
            records.append((agent.name, rec))
        trace.states.append(state)
        trace.events.append(ev)
        trace.cycles.append(CycleResult(i, state.time, state, ev, records, arb))
        if fail_stop and trace.failed:
            trace.stopped = f"goal tree false at cycle {i}"
            break
    return trace
