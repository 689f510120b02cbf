"""Command-line front end: run, check and frame."""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

from .cycle import FALSE_STATUS
from .environment import GREEDY, RANDOM, SCRIPTED, ArbitrationPolicy, make_agents, run_system
from .errors import LPSError
from .frame import frame_check, merged_program, run_model
from .parser import (EventScript, parse_atom, parse_choice_script, parse_event_script,
                     parse_program, parse_term)
from .state import EventSet, State
from .terms import Fn, fmt_atoms
from .verify import check_run

OK, ERROR, FAILED = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from None


def _load_program(path: str):
    try:
        return parse_program(_read(path))
    except LPSError as e:
        raise UsageError(e.located(path)) from None


def _split_files(files, trace: bool = False):
    programs = [f for f in files if f.endswith(".lps")]
    others = [f for f in files if not f.endswith(".lps")]
    if not programs:
        raise UsageError("no .lps program given")
    if trace:
        if len(others) != 1:
            raise UsageError("expected exactly one trace file")
        return programs, others[0]
    if len(others) > 1:
        raise UsageError("at most one event script may be given")
    return programs, others[0] if others else None


def _policy(spec: str, seed: int) -> ArbitrationPolicy:
    if spec == GREEDY:
        return ArbitrationPolicy(GREEDY, seed)
    if spec == RANDOM:
        return ArbitrationPolicy(RANDOM, seed)
    if spec.startswith(SCRIPTED + ":"):
        path = spec.split(":", 1)[1]
        try:
            return ArbitrationPolicy(SCRIPTED, seed, parse_choice_script(_read(path)))
        except LPSError as e:
            raise UsageError(e.located(path)) from None
    raise UsageError(f"unknown arbitration policy {spec!r}")


def _agent_names(program, count):
    names = program.config.agents
    if count is None:
        return None
    if not names:
        raise UsageError("--agents needs agent names in the program's config section")
    if count < 1 or count > len(names):
        raise UsageError(f"--agents must be between 1 and {len(names)}")
    return names[:count]


# ---------------------------------------------------------------- trace records

def _header(program, agents) -> dict:
    return {"cycle": 0, "time": 0, "state": fmt_atoms(program.initial_state), "events": [],
            "agents": [{"agent": "" if a.name is None else str(a.name)} for a in agents],
            "arbitration": None}


def _dump(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False)


def read_trace(path: str):
    """States S0..Sn, event sets ev1..evn and agent names from a trace file."""
    states, events, names = [], [], []
    for n, line in enumerate(_read(path).splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            i = rec["cycle"]
            facts = frozenset(parse_atom(a) for a in rec["state"])
            evs = frozenset(parse_atom(a) for a in rec["events"])
        except (ValueError, KeyError, TypeError, LPSError) as e:
            raise UsageError(f"{path}:{n}: malformed trace record ({e})") from None
        if i != len(states):
            raise UsageError(f"{path}:{n}: expected cycle {len(states)}, found {i}")
        states.append(State(facts, i, i))
        if i == 0:
            names = [a["agent"] for a in rec.get("agents", []) if a.get("agent")]
        else:
            events.append(EventSet(evs, (i - 1, i)))
    if not states:
        raise UsageError(f"{path}: empty trace")
    return states, events, [parse_term(n) for n in names]


def _combined(programs, names):
    """One program holding every agent's instantiated clauses, for model building."""
    base = programs[0]
    if len(programs) == 1:
        return merged_program(base, names or None)
    from dataclasses import replace

    parts = [merged_program(p) for p in programs]

    def union(attr):
        return tuple(dict.fromkeys(c for p in parts for c in getattr(p, attr)))

    return replace(base, l_int=union("l_int"), l_events=union("l_events"),
                   d_post=union("d_post"), d_pre=union("d_pre"),
                   reactive_rules=union("reactive_rules"), initial_goals=union("initial_goals"))


# ---------------------------------------------------------------- commands

def cmd_run(args, out) -> int:
    program_files, script_file = _split_files(args.files)
    programs = [_load_program(f) for f in program_files]
    program = programs[0]
    script = EventScript()
    if script_file:
        try:
            script = parse_event_script(_read(script_file), program)
        except LPSError as e:
            raise UsageError(e.located(script_file)) from None
    horizon = program.config.horizon if args.horizon is None else args.horizon
    options = dict(max_reductions=args.max_reductions, strategy=args.strategy, horizon=horizon,
                   seed=args.seed)
    if len(programs) == 1:
        agents = make_agents(program, _agent_names(program, args.agents), **options)
    else:
        agents = []
        for f, p in zip(program_files, programs):
            name = p.config.agents[0] if p.config.agents else Fn(Path(f).stem, ())
            agents += make_agents(p, (name,), **options)
    trace = run_system(program, script, horizon, _policy(args.arb, args.seed), agents,
                       fail_stop=args.fail_stop)
    out.write(_dump(_header(program, agents)) + "\n")
    for c in trace.cycles:
        out.write(_dump(c.as_dict()) + "\n")
    if args.emit_model:
        names = [a.name for a in agents if a.name is not None]
        model = run_model(_combined(programs, names), trace.states, trace.events, False)
        Path(args.emit_model).write_text("".join(a + "\n" for a in fmt_atoms(model.atoms)))
    if args.fail_stop and trace.failed:
        for a in agents:
            for g in a.goals:
                if g.status == FALSE_STATUS:
                    who = "" if a.name is None else f"{a.name}: "
                    print(f"goal tree false: {who}{g.root}", file=sys.stderr)
        return FAILED
    return OK


def _check_inputs(args):
    program_files, trace_file = _split_files(args.files, trace=True)
    programs = [_load_program(f) for f in program_files]
    states, events, names = read_trace(trace_file)
    return programs, _combined(programs, names), states, events


def cmd_check(args, out) -> int:
    _, program, states, events = _check_inputs(args)
    verdicts = check_run(program, states, events)
    for v in verdicts:
        line = f"{'true ' if v.holds else 'FALSE'} {v.kind}: {v.text}"
        if v.witness:
            line += "  [" + ", ".join(v.witness) + "]"
        out.write(line + "\n")
    return OK if all(v.holds for v in verdicts) else FAILED


def cmd_frame(args, out) -> int:
    _, program, states, events = _check_inputs(args)
    report = frame_check(program, states, events)
    out.write(json.dumps(report.as_dict(), ensure_ascii=False) + "\n")
    return OK if report.equal and report.first_equal is not False else FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lps", description="Run and check logic-based production systems.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run programs against an event script and print the trace")
    run.add_argument("files", nargs="+", help="one or more .lps programs and an optional .evs script")
    run.add_argument("--horizon", type=int)
    run.add_argument("--max-reductions", type=int)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--arb", default=GREEDY, help="greedy, random or scripted:FILE")
    run.add_argument("--fail-stop", action="store_true")
    run.add_argument("--strategy", choices=("dfs", "round-robin"), default="dfs")
    run.add_argument("--emit-model", metavar="PATH")
    run.add_argument("--agents", type=int, help="use the first N agents named in the config")
    run.add_argument("-o", "--output", metavar="PATH", help="write the trace here instead of stdout")
    run.set_defaults(func=cmd_run)

    for name, func, text in (("check", cmd_check, "evaluate rules, goals and constraints on a trace"),
                             ("frame", cmd_frame, "compare the trace model with the frame-axiom model")):
        p = sub.add_parser(name, help=text)
        p.add_argument("files", nargs="+", help=".lps programs followed by a trace file")
        p.add_argument("-o", "--output", metavar="PATH")
        p.set_defaults(func=func)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = io.StringIO()
    try:
        code = args.func(args, out)
        if args.output:
            Path(args.output).write_text(out.getvalue())
        else:
            sys.stdout.write(out.getvalue())
        return code
    except UsageError as e:
        print(f"lps: {e}", file=sys.stderr)
        return ERROR
    except LPSError as e:
        print(f"lps: {e.located()}", file=sys.stderr)
        return ERROR
    except OSError as e:
        print(f"lps: {e}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
