"""One agent's operational cycle: antecedent processing, goal trees and action selection."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .fol import Model, eval_builtin, query
from .state import EventSet, State, current_model, universe_for
from .syntax import (BUILTINS, COMPOSITE, EVENT, Cmp, Eq, Func, Program, ReactiveRule,
                     free_vars, rename_formula, subst)
from .temporal import FALSE, edges_of, feasible, is_ground_builtin, leq
from .terms import Atom, Var, compose, is_ground, term_vars, unify

OPEN, TRUE, FALSE_STATUS = "open", "true", "false"


# ---------------------------------------------------------------- conjunct shapes

def shape(cond, kinds: dict) -> tuple:
    """(role, time terms) where role is event, composite, state or builtin."""
    if isinstance(cond, Atom):
        kind = kinds.get(cond.pred)
        if kind == EVENT:
            return "event", cond.args[-2:]
        if kind == COMPOSITE:
            return "composite", cond.args[-2:]
        if kind in ("fluent", "intensional"):
            return "state", cond.args[-1:]
        return "state", ()
    if isinstance(cond, BUILTINS):
        return "builtin", ()
    times = sorted((v for v in free_vars(cond) if v.sort == "time"), key=lambda v: v.name)
    return "state", tuple(times)


def _time_edges(conds, kinds) -> list:
    return [e for c in conds for e in edges_of(c, kinds)]


def _later_bounds(conds, kinds, t: int) -> list:
    """Edges forcing every state condition to hold at t or later and every event to end at t or later."""
    out = []
    for c in conds:
        role, times = shape(c, kinds)
        if role == "state":
            for x in times:
                out += leq(t, x)
        elif role in ("event", "composite"):
            out += leq(t, times[1])
    return out


def satisfiable(conds, kinds, t: int) -> bool:
    """Could the conjunction still be made true at time t or later?"""
    for c in conds:
        if isinstance(c, BUILTINS) and is_ground_builtin(c) and not eval_builtin(c):
            return False
    edges = _time_edges(conds, kinds) + _later_bounds(conds, kinds, t)
    return feasible(edges, 0)


def simplify(conds) -> tuple | object:
    """Drop ground built-ins that hold; FALSE if one fails."""
    out = []
    for c in conds:
        if isinstance(c, BUILTINS) and is_ground_builtin(c):
            if not eval_builtin(c):
                return FALSE
            continue
        out.append(c)
    return tuple(dict.fromkeys(out))


def is_solved(conds, kinds) -> bool:
    """Only built-ins remain and they can be satisfied."""
    if any(not isinstance(c, BUILTINS) for c in conds):
        return False
    return feasible(_time_edges(conds, kinds), 0)


# ---------------------------------------------------------------- parsings

@dataclass(frozen=True)
class Parsing:
    early: tuple
    other: tuple
    sigma: dict = field(default_factory=dict, compare=False)

    def __hash__(self):
        return hash((self.early, self.other))


def _bind_times(early, kinds, t: int, mode: str) -> dict | None:
    sigma: dict = {}
    for c in early:
        role, times = shape(c, kinds)
        if role == "event":
            want = (t - 1, t) if mode == "now" else (t, t + 1)
        elif role == "state":
            want = (t,) * len(times)
        else:
            return None
        for x, v in zip(times, want):
            x = sigma.get(x, x) if isinstance(x, Var) else x
            if isinstance(x, Var):
                sigma[x] = v
            elif x != v:
                return None
    return sigma


def enumerate_parsings(conds, t_now: int, kinds: dict, mode: str = "now",
                       candidate=None) -> list[Parsing]:
    return list(iter_parsings(conds, t_now, kinds, mode, candidate))


def iter_parsings(conds, t_now: int, kinds: dict, mode: str = "now", candidate=None):
    """Every split into early and deferred conjuncts allowed at ``t_now``, largest first.

    In ``now`` mode early events end at t_now and early state conditions hold at t_now;
    in ``act`` mode early conjuncts are simple events occurring from t_now to t_now + 1.
    Deferred state conditions and events must be able to finish after t_now.
    """
    conds = tuple(conds)
    shapes = [shape(c, kinds) for c in conds]
    pool = []
    for i, (c, (role, _)) in enumerate(zip(conds, shapes)):
        if mode == "act":
            ok = role == "event" and is_ground(Atom(c.pred, c.args[:-2]))
        else:
            ok = role in ("event", "state")
        if ok and (candidate is None or candidate(c)):
            pool.append(i)
    if not pool:
        return
    base = _time_edges(conds, kinds)

    def pins(sigma):
        return [e for x, v in sigma.items() for e in leq(x, v) + leq(v, x)]

    # pinning a set of conjuncts only adds edges, so a pin that fails alone or
    # with one partner fails in every larger set
    alone = {}
    for i in pool:
        sigma = _bind_times((conds[i],), kinds, t_now, mode)
        if sigma is not None and feasible(base + pins(sigma), 0):
            alone[i] = sigma
    pool = list(alone)
    clash = set()
    for i, j in itertools.combinations(pool, 2):
        sigma = _bind_times((conds[i], conds[j]), kinds, t_now, mode)
        if sigma is None or not feasible(base + pins(sigma), 0):
            clash.add((i, j))
    later = {i: _later_bounds((c,), kinds, t_now + 1)
             for i, c in enumerate(conds) if shapes[i][0] != "builtin"}
    for size in range(len(pool), 0, -1):
        for chosen in itertools.combinations(pool, size):
            if clash and any(pair in clash for pair in itertools.combinations(chosen, 2)):
                continue
            early = tuple(conds[i] for i in chosen)
            sigma = _bind_times(early, kinds, t_now, mode)
            if sigma is None:
                continue
            edges = base + pins(sigma)
            for i, extra in later.items():
                if i not in chosen:
                    edges += extra
            if not feasible(edges, 0):
                continue
            other = tuple(c for i, c in enumerate(conds) if i not in chosen)
            if any(isinstance(c, BUILTINS) and is_ground_builtin(d) and not eval_builtin(d)
                   for c in other for d in (subst(c, sigma),)):
                continue
            yield Parsing(early, other, sigma)


def _join_builtins(early, other, sigma):
    """Move built-ins from ``other`` whose inputs the early conjuncts determine into the query."""
    bound = set(sigma)
    for c in early:
        bound |= free_vars(c)
    joined, rest = [], list(other)
    changed = True
    while changed:
        changed = False
        for c in list(rest):
            if not isinstance(c, BUILTINS):
                continue
            vs = free_vars(c) - bound
            take = False
            if not vs:
                take = True
            elif isinstance(c, Eq):
                lv, rv = set(term_vars(c.lhs)) - bound, set(term_vars(c.rhs)) - bound
                take = not lv or not rv
            elif isinstance(c, Func):
                take = not ((set(term_vars(c.a)) | set(term_vars(c.b))) - bound)
            elif isinstance(c, Cmp) and c.op == "succ":
                take = not (set(term_vars(c.lhs)) - bound) or not (set(term_vars(c.rhs)) - bound)
            if take:
                joined.append(c)
                rest.remove(c)
                bound |= free_vars(c)
                changed = True
    return tuple(joined), tuple(rest)


def _matches_model(c, kinds, model: Model, t: int) -> bool:
    """Cheap necessary test for ``c`` holding now: some atom of the model unifies with it."""
    if not isinstance(c, Atom):
        return True
    role, times = shape(c, kinds)
    want = (t - 1, t) if role == "event" else (t,) * len(times)
    for a in model.by_pred(c.pred):
        if a.args[len(a.args) - len(want):] == want or not want:
            if unify(c, a) is not None:
                return True
    return False


def early_answers(p: Parsing, model: Model, universe) -> list[tuple[dict, tuple]]:
    """Answers for the early part of a parsing, each with its simplified resolvent."""
    early = tuple(subst(c, p.sigma) for c in p.early)
    other = tuple(subst(c, p.sigma) for c in p.other)
    joined, rest = _join_builtins(early, other, p.sigma)
    out = []
    for ans in query(early + joined, model, universe):
        s = dict(p.sigma)
        s.update(ans)
        res = simplify(tuple(subst(c, ans) for c in rest))
        if res is FALSE:
            continue
        out.append((s, res))
    return out


# ---------------------------------------------------------------- goal trees

@dataclass
class Node:
    id: int
    conds: tuple
    binding: dict
    parent: int | None = None
    children: list = field(default_factory=list)
    expanded: bool = False
    dead: bool = False
    via: str = "root"

    def __str__(self) -> str:
        from .printer import fmt_conj

        return fmt_conj(self.conds) if self.conds else "true"


@dataclass
class GoalTree:
    id: int
    root: Node
    created: int
    origin: str = ""
    status: str = OPEN
    nodes: dict = field(default_factory=dict)
    solved_by: int | None = None

    def __post_init__(self):
        self.nodes.setdefault(self.root.id, self.root)

    def leaves(self) -> list[Node]:
        """Live leaves in depth-first pre-order, children in creation order."""
        out = []
        stack = [self.root]
        while stack:
            n = stack.pop()
            if n.children:
                stack.extend(self.nodes[c] for c in reversed(n.children))
            elif not n.dead:
                out.append(n)
        return out

    def root_instance(self) -> tuple:
        """The root conjunction under the bindings of the branch that reduced it to true."""
        if self.solved_by is None:
            return self.root.conds
        return tuple(subst(c, self.nodes[self.solved_by].binding) for c in self.root.conds)


@dataclass
class AgentState:
    name: object
    program: Program
    rules: list
    goals: list = field(default_factory=list)
    candidates: tuple = ()
    max_reductions: int = 64
    strategy: str = "dfs"
    horizon: int = 10
    seed: int = 0
    _ids: itertools.count = field(default_factory=lambda: itertools.count(1))
    _rename: itertools.count = field(default_factory=lambda: itertools.count(1))

    @classmethod
    def create(cls, program: Program, name=None, max_reductions=None, strategy="dfs",
               horizon=None, seed: int = 0) -> "AgentState":
        agent = cls(name=name, program=program, rules=list(program.rules),
                    max_reductions=program.config.max_reductions if max_reductions is None
                    else max_reductions,
                    strategy=strategy,
                    horizon=program.config.horizon if horizon is None else horizon, seed=seed)
        for g in program.initial_goals:
            agent.new_tree(g, {}, 0, "initial goal")
        return agent

    @property
    def kinds(self) -> dict:
        return self.program.kinds

    def next_id(self) -> int:
        return next(self._ids)

    def new_tree(self, conds, binding, cycle: int, origin: str) -> GoalTree:
        conds = simplify(conds)
        root = Node(self.next_id(), () if conds is FALSE else conds, dict(binding))
        tree = GoalTree(self.next_id(), root, cycle, origin)
        if conds is FALSE or not satisfiable(root.conds, self.kinds, cycle):
            root.dead = True
            tree.status = FALSE_STATUS
        elif is_solved(root.conds, self.kinds):
            tree.status = TRUE
            tree.solved_by = root.id
        self.goals.append(tree)
        return tree

    @property
    def open_trees(self) -> list:
        return [g for g in self.goals if g.status == OPEN]

    @property
    def failed(self) -> bool:
        return any(g.status == FALSE_STATUS for g in self.goals)


@dataclass
class CycleRecord:
    new_rules: list = field(default_factory=list)
    new_goals: list = field(default_factory=list)
    reductions: list = field(default_factory=list)
    status: list = field(default_factory=list)
    candidates: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"new_rules": self.new_rules, "new_goals": self.new_goals,
                "reductions": self.reductions, "status": self.status,
                "candidates": self.candidates}


# ---------------------------------------------------------------- step 1

def step1_process_antecedents(agent: AgentState, model: Model, ev: EventSet, t: int,
                              record: CycleRecord | None = None) -> None:
    kinds = agent.kinds
    universe = universe_for(agent.program, max(agent.horizon, t + 1))
    originals = set(agent.program.rules)
    # residues that can no longer be completed are dropped
    rules = [r for r in agent.rules if r in originals or satisfiable(r.antecedent, kinds, t)]
    known = set(rules)
    added = []
    for r in rules:
        cand = lambda c: _matches_model(c, kinds, model, t)  # noqa: E731
        for p in enumerate_parsings(r.antecedent, t, kinds, "now", cand):
            for s, rest in early_answers(p, model, universe):
                cons = tuple(subst(c, s) for c in r.consequent)
                if not any(not isinstance(c, BUILTINS) for c in rest):
                    # the whole antecedent holds: a new goal tree
                    cons = simplify(tuple(rest) + cons)
                    conds = () if cons is FALSE else cons
                    tree = agent.new_tree(conds if cons is not FALSE else (Cmp("<", 1, 0),),
                                          {}, t, str(r))
                    if record is not None:
                        record.new_goals.append({"tree": tree.id, "goal": str(tree.root)})
                    continue
                residue = ReactiveRule(rest, cons, r.loc)
                if residue in known or not satisfiable(rest, kinds, t + 1):
                    continue
                known.add(residue)
                added.append(residue)
                if record is not None:
                    record.new_rules.append(str(residue))
    agent.rules = rules + added


# ---------------------------------------------------------------- step 2

def _close(agent: AgentState, tree: GoalTree, node: Node, record):
    tree.status = TRUE
    tree.solved_by = node.id
    if record is not None:
        record.status.append({"tree": tree.id, "status": TRUE})


def _add_child(agent: AgentState, tree: GoalTree, parent: Node, conds, binding, via: str, t: int,
               record) -> Node:
    conds = simplify(conds)
    child = Node(agent.next_id(), () if conds is FALSE else conds, binding, parent.id, via=via)
    if conds is FALSE:
        child.dead = True
    tree.nodes[child.id] = child
    parent.children.append(child.id)
    if record is not None:
        record.reductions.append({"step": via, "tree": tree.id, "node": parent.id,
                                  "child": child.id, "goal": str(child)})
    if not child.dead and is_solved(child.conds, agent.kinds):
        _close(agent, tree, child, record)
    return child


def step22_reduce_early(agent: AgentState, tree: GoalTree, node: Node, model: Model,
                        ev: EventSet, t: int, record=None) -> Node | None:
    kinds = agent.kinds
    universe = universe_for(agent.program, max(agent.horizon, t + 1))
    cand = lambda c: _matches_model(c, kinds, model, t)  # noqa: E731
    for p in iter_parsings(node.conds, t, kinds, "now", cand):
        answers = early_answers(p, model, universe)
        if answers:
            s, rest = answers[0]
            return _add_child(agent, tree, node, rest, compose(node.binding, s), "2.2", t, record)
    return None


def _action_parsing(agent: AgentState, node: Node, t: int) -> Parsing | None:
    for p in iter_parsings(node.conds, t, agent.kinds, "act"):
        if all(is_ground(subst(c, p.sigma)) for c in p.early):
            return p
    return None


def step23_select_actions(agent: AgentState, node: Node, t: int) -> list[Atom]:
    """Ground simple actions of the first feasible action parsing, stamped (t, t + 1)."""
    p = _action_parsing(agent, node, t)
    return [] if p is None else [subst(c, p.sigma) for c in p.early]


def selectable_composite(node: Node, kinds: dict, acting=()) -> int | None:
    """Index of the composite step 2.1 reduces, or None.

    It is the leftmost composite with ground non-time arguments, unless a simple event
    to its left cannot happen in the coming interval (is not in ``acting``).
    """
    for i, c in enumerate(node.conds):
        if not isinstance(c, Atom):
            continue
        kind = kinds.get(c.pred)
        if kind == EVENT and c not in acting:
            return None
        if kind == COMPOSITE and is_ground(Atom(c.pred, c.args[:-2])):
            return i
    return None


def step21_reduce_composite(agent: AgentState, tree: GoalTree, node: Node, t: int,
                            record=None, acting=()) -> list[Node]:
    """One child per L_events clause whose head unifies with the selected composite."""
    idx = selectable_composite(node, agent.kinds, acting)
    if idx is None:
        return []
    target = node.conds[idx]
    node.expanded = True
    out = []
    for clause in agent.program.l_events:
        if clause.head.pred != target.pred:
            continue
        suffix = f"_{next(agent._rename)}"
        head = rename_formula(clause.head, suffix)
        body = rename_formula(clause.body, suffix)
        mgu = unify(target, head)
        if mgu is None:
            continue
        conds = tuple(subst(c, mgu) for c in node.conds[:idx] + body + node.conds[idx + 1:])
        out.append(_add_child(agent, tree, node, conds, compose(node.binding, mgu), "2.1", t, record))
        if tree.status != OPEN:
            break
    return out


def _settle(tree: GoalTree, record) -> None:
    """A tree with no live leaf left is false."""
    if tree.status == OPEN and not tree.leaves():
        tree.status = FALSE_STATUS
        if record is not None:
            record.status.append({"tree": tree.id, "status": FALSE_STATUS})


def run_cycle(agent: AgentState, state: State, ev: EventSet, record: CycleRecord | None = None,
              model: Model | None = None) -> tuple:
    """Steps 1 and 2 at time t_i; returns the candidate actions for the next interval."""
    t = state.time
    if model is None:
        model = current_model(agent.program, state, ev)
    step1_process_antecedents(agent, model, ev, t, record)

    budget = agent.max_reductions
    done: set = set()  # leaves with nothing further to do this cycle
    emitted: dict = {}  # leaf -> conjuncts it offered as actions this cycle
    candidates: list = []

    def step(tree: GoalTree) -> bool:
        nonlocal budget
        if tree.status != OPEN:
            return False
        for leaf in tree.leaves():
            if leaf.id in done:
                continue
            if budget <= 0:
                return False
            if not satisfiable(leaf.conds, agent.kinds, t):
                leaf.dead = True
                continue
            if step22_reduce_early(agent, tree, leaf, model, ev, t, record) is not None:
                budget -= 1
                return True
            if leaf.id not in emitted:
                p = _action_parsing(agent, leaf, t)
                emitted[leaf.id] = p.early if p is not None else ()
                if p is not None:
                    acts = [subst(c, p.sigma) for c in p.early]
                    budget -= 1
                    for a in acts:
                        if a not in candidates:
                            candidates.append(a)
                    if record is not None:
                        record.reductions.append({"step": "2.3", "tree": tree.id, "node": leaf.id,
                                                  "actions": [str(a) for a in acts]})
                    return True
            if not leaf.expanded and step21_reduce_composite(agent, tree, leaf, t, record,
                                                             emitted[leaf.id]):
                budget -= 1
                return True
            done.add(leaf.id)
        _settle(tree, record)
        return False

    trees = agent.goals
    if agent.strategy == "round-robin":
        progress = True
        while progress and budget > 0:
            progress = False
            for tree in list(trees):
                if step(tree):
                    progress = True
    else:
        for tree in list(trees):
            while budget > 0 and step(tree):
                pass
    for tree in agent.goals:
        if tree.status == OPEN:
            # leaves the budget never reached still die once their deadlines pass
            for leaf in tree.leaves():
                if leaf.id not in done and not satisfiable(leaf.conds, agent.kinds, t):
                    leaf.dead = True
            _settle(tree, record)
    agent.candidates = tuple(candidates)
    if record is not None:
        record.candidates = [str(a) for a in candidates]
    return agent.candidates


def shuffle_candidates(candidates, seed: int) -> list:
    out = list(candidates)
    random.Random(seed).shuffle(out)
    return out
