"""FOL-stratification, reducts, minimal models and (weakly) perfect models of ground programs."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .errors import NotStratified, NotWeaklyStratified, PreconditionViolation
from .fol import Model, as_model, eval_builtin, eval_truth
from .sorts import Universe
from .syntax import BUILTINS, Clause, Exists, Forall, is_nonatomic, subst
from .terms import Atom

EMPTY = Universe()


@dataclass
class Stratification:
    """Ground atom -> stratum index. Unlisted atoms fall back to ``rule`` then ``default``."""

    levels: Mapping = field(default_factory=dict)
    rule: Callable[[Atom], int] | None = None
    default: int = 0

    def __call__(self, atom: Atom) -> int:
        lvl = self.levels.get(atom)
        if lvl is not None:
            return lvl
        if self.rule is not None:
            return self.rule(atom)
        return self.default

    def partition(self, clauses: Iterable[Clause]) -> dict:
        parts: dict = defaultdict(list)
        for c in clauses:
            parts[self(c.head)].append(c)
        return dict(sorted(parts.items()))


def _as_strat(s) -> Callable[[Atom], int]:
    if isinstance(s, Stratification) or callable(s):
        return s
    return Stratification(dict(s))


def condition_atoms(cond, universe: Universe = EMPTY) -> set:
    """Ground atomic subformulas of a ground condition, quantifiers expanded over their sorts."""
    if isinstance(cond, Atom):
        return {cond}
    if isinstance(cond, BUILTINS):
        return set()
    if isinstance(cond, (Forall, Exists)):
        out = set()
        for x in universe.members(cond.sort):
            out |= condition_atoms(subst(cond.body, {cond.var: x}), universe)
        return out
    out = set()
    for child in _children(cond):
        out |= condition_atoms(child, universe)
    return out


def _children(f):
    from .syntax import And, Implies, Not, Or

    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return f.parts
    if isinstance(f, Implies):
        return (f.lhs, f.rhs)
    return ()


def check_fol_stratification(clauses: Iterable[Clause], stratification,
                             universe: Universe = EMPTY) -> tuple[bool, Clause | None]:
    st = _as_strat(stratification)
    for c in clauses:
        h = st(c.head)
        for cond in c.body:
            if isinstance(cond, Atom):
                if st(cond) > h:
                    return False, c
            elif is_nonatomic(cond):
                if any(st(a) >= h for a in condition_atoms(cond, universe)):
                    return False, c
    return True, None


# ---------------------------------------------------------------- Horn fixpoints

def horn_fixpoint(clauses: Iterable[Clause]) -> set:
    """Least model of ground Horn clauses; each derived atom is propagated once."""
    clauses = list(clauses)
    watch: dict = defaultdict(list)
    missing = []
    queue = []
    for i, c in enumerate(clauses):
        body = set(c.body)
        missing.append(len(body))
        for a in body:
            watch[a].append(i)
        if not body:
            queue.append(c.head)
    true: set = set()
    while queue:
        a = queue.pop()
        if a in true:
            continue
        true.add(a)
        for i in watch.get(a, ()):
            missing[i] -= 1
            if missing[i] == 0:
                queue.append(clauses[i].head)
    return true


def naive_fixpoint(clauses: Iterable[Clause]) -> set:
    """Reference iteration of the immediate-consequence operator until nothing changes."""
    clauses = list(clauses)
    m: set = set()
    while True:
        nxt = {c.head for c in clauses if all(a in m for a in c.body)}
        if nxt <= m:
            return m
        m |= nxt


def _evaluate(cond, e: Model, universe: Universe) -> bool:
    if isinstance(cond, BUILTINS):
        return eval_builtin(cond)
    return eval_truth(cond, e, universe)


def reduct(clauses: Iterable[Clause], e, universe: Universe = EMPTY,
           evaluable: Callable | None = None) -> list[Clause]:
    """Evaluate conditions defined by ``e``: drop true ones, delete clauses with a false one.

    By default every non-atomic condition and built-in is evaluated in ``e``; atomic
    conditions are kept. The atoms of ``e`` are included as facts.
    """
    e = as_model(e)
    if evaluable is None:
        evaluable = lambda cond: not isinstance(cond, Atom)  # noqa: E731
    out = [Clause(a, ()) for a in sorted(e.atoms, key=str)]
    for c in clauses:
        body = []
        alive = True
        for cond in c.body:
            if evaluable(cond):
                if not _evaluate(cond, e, universe):
                    alive = False
                    break
            else:
                body.append(cond)
        if alive:
            out.append(Clause(c.head, tuple(body), c.loc))
    return out


def _check_defined(clauses, e: Model, universe, e_preds):
    heads = {c.head.pred for c in clauses}
    for c in clauses:
        for cond in c.body:
            if is_nonatomic(cond):
                for a in condition_atoms(cond, universe):
                    bad = (a.pred not in e_preds) if e_preds is not None else (a.pred in heads)
                    if bad:
                        raise PreconditionViolation(
                            f"condition in {c} mentions {a.pred}, which is not defined by E")


def minimal_model(clauses: Iterable[Clause], e=(), universe: Universe = EMPTY,
                  e_preds: set | None = None, naive: bool = False) -> Model:
    """Least model of clauses whose FOL conditions are evaluated in the extensional layer E."""
    clauses = list(clauses)
    e = as_model(e)
    _check_defined(clauses, e, universe, e_preds)
    horn = reduct(clauses, e, universe)
    for c in horn:
        if any(not isinstance(b, Atom) for b in c.body):
            raise PreconditionViolation(f"non-atomic condition survived the reduct: {c}")
    return Model(naive_fixpoint(horn) if naive else horn_fixpoint(horn))


def _strata_run(clauses, stratification, universe, weak: bool) -> Model:
    st = _as_strat(stratification)
    parts: dict = defaultdict(list)
    for c in clauses:
        parts[st(c.head)].append(c)
    m: set = set()
    for level in sorted(parts):
        lower = Model(m)

        def evaluable(cond, level=level):
            if isinstance(cond, BUILTINS):
                return True
            return all(st(a) < level for a in condition_atoms(cond, universe))

        reduced = []
        for c in parts[level]:
            body = []
            alive = True
            for cond in c.body:
                if evaluable(cond):
                    if not _evaluate(cond, lower, universe):
                        alive = False
                        break
                else:
                    body.append(cond)
            if not alive:
                continue
            for cond in body:
                if not isinstance(cond, Atom) or st(cond) > level:
                    if weak:
                        raise NotWeaklyStratified(level, c)
                    raise NotStratified(f"clause not stratified at stratum {level}: {c}", c)
            reduced.append(Clause(c.head, tuple(body)))
        m |= horn_fixpoint(reduced)
    return Model(m)


def perfect_model(clauses: Iterable[Clause], stratification, universe: Universe = EMPTY) -> Model:
    """Stratum-by-stratum minimal models of reducts against the model built so far."""
    clauses = list(clauses)
    ok, bad = check_fol_stratification(clauses, stratification, universe)
    if not ok:
        raise NotStratified(f"not FOL-stratified: {bad}", bad)
    return _strata_run(clauses, stratification, universe, weak=False)


def weakly_perfect_model(clauses: Iterable[Clause], stratification,
                         universe: Universe = EMPTY) -> Model:
    """Like perfect_model, but stratification is validated through each reduct."""
    return _strata_run(list(clauses), stratification, universe, weak=True)


def is_model(clauses: Iterable[Clause], m, universe: Universe = EMPTY) -> bool:
    """Every clause is true in ``m`` read as an interpretation."""
    m = as_model(m)
    for c in clauses:
        if all(_evaluate(b, m, universe) if not isinstance(b, Atom) else b in m for b in c.body):
            if c.head not in m:
                return False
    return True
