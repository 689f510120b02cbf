"""Truth of reactive rules, goals and constraints in the model of a completed run."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import VocabularyMismatch
from .fol import Model, query
from .frame import run_model
from .printer import fmt_conj, fmt_rule
from .sorts import make_universe
from .syntax import Program
from .terms import fmt_atoms


@dataclass(frozen=True)
class Verdict:
    kind: str  # rule, goal or constraint
    text: str
    holds: bool
    witness: tuple = ()  # a falsifying instance, as printed atoms and bindings

    def as_dict(self) -> dict:
        return {"kind": self.kind, "sentence": self.text, "true": self.holds,
                "counterexample": list(self.witness)}


def _bindings(s: dict) -> tuple:
    return tuple(f"{v.name} = {t}" for v, t in sorted(s.items(), key=lambda kv: kv[0].name))


def rule_verdict(rule, model: Model, universe) -> Verdict:
    """∀ antecedent → ∃ consequent, over the time points of the run."""
    for ans in query(rule.antecedent, model, universe):
        if not query(rule.consequent, model, universe, ans):
            return Verdict("rule", fmt_rule(rule), False, _bindings(ans))
    return Verdict("rule", fmt_rule(rule), True)


def goal_verdict(goal, model: Model, universe) -> Verdict:
    return Verdict("goal", fmt_conj(goal), bool(query(goal, model, universe)))


def constraint_verdicts(program: Program, model: Model, universe) -> list[Verdict]:
    out = []
    for c in program.d_pre:
        hits = query(c.body, model, universe)
        out.append(Verdict("constraint", f"false <- {fmt_conj(c.body)}", not hits,
                           _bindings(hits[0]) if hits else ()))
    return out


def check_vocabulary(program: Program, states, events) -> None:
    known = set(program.kinds)
    seen = {a.pred for s in states for a in s.facts} | {a.pred for ev in events for a in ev.events}
    unknown = sorted(seen - known)
    if unknown:
        raise VocabularyMismatch(f"trace mentions predicates the program does not declare: "
                                 f"{', '.join(unknown)}")


def check_run(program: Program, states, events) -> list[Verdict]:
    """Every reactive rule, initial goal and precondition constraint against perfect(L ∪ S* ∪ ev*).

    ``program`` should already hold every agent's instantiated rules and goals.
    """
    check_vocabulary(program, states, events)
    horizon = len(states) - 1
    model = run_model(program, states, events, with_dpost=False)
    universe = make_universe(program.sorts, horizon)
    out = [rule_verdict(r, model, universe) for r in program.reactive_rules]
    out += [goal_verdict(g, model, universe) for g in program.initial_goals]
    out += constraint_verdicts(program, model, universe)
    return out


def model_atoms(model: Model) -> list[str]:
    return fmt_atoms(model.atoms)
