import pytest
from hypothesis import given, settings, strategies as st

from lps import Atom, Fn, SortDecl, Var, make_universe, minimal_model, perfect_model, weakly_perfect_model
from lps import parse_atom
from lps.errors import NotStratified, NotWeaklyStratified, PreconditionViolation
from lps.sorts import ground_instances
from lps.state import State, timeless_atoms
from lps.strat import (Stratification, check_fol_stratification, horn_fixpoint, is_model,
                       naive_fixpoint, reduct)
from lps.syntax import Clause, Exists, Forall, Implies, Not

from conftest import corpus_run, program
from oracles import (ELEMS, U2, Z, even_program, even_strata, exhaustive_minimal, least_ranks,
                     numeral, parity_oracle, reference_model)


def atom(name, *args):
    return Atom(name, tuple(args))


p, q = atom("p"), atom("q")


# ---------------------------------------------------------------- stratification checks

def test_stratified_chain():
    ok, bad = check_fol_stratification([Clause(p, (q,))], {q: 0, p: 1})
    assert ok and bad is None


def test_self_negation_never_stratified():
    c = Clause(p, (Not(p),))
    for lvl in range(3):
        assert check_fol_stratification([c], {p: lvl}) == (False, c)


def test_subset_clause():
    sets = [Fn("s1"), Fn("s2")]
    elems = [Fn("x"), Fn("y")]
    u = make_universe([SortDecl("elem", tuple(elems))], 0)
    z = Var("Z", "elem")
    clauses = [Clause(atom("subset", a, b_), (Forall(z, "elem", Implies(atom("in", z, a), atom("in", z, b_))),))
               for a in sets for b_ in sets]
    strat = Stratification(rule=lambda x: 1 if x.pred == "subset" else 0)
    assert check_fol_stratification(clauses, strat, u)[0]


# ---------------------------------------------------------------- minimal models

def test_minimal_empty():
    assert minimal_model([]).atoms == frozenset()


def test_minimal_chain():
    assert minimal_model([Clause(q), Clause(p, (q,))]).atoms == {p, q}


def test_minimal_dining_post():
    dining = program("dining")
    u = make_universe(dining.sorts, 4).with_time([3, 4])
    ground = [g for c in dining.d_post for g in ground_instances(c, u)]
    ev = {parse_atom("pickup-forks(fork(0), philosopher(0), fork(1), 3, 4)"),
          parse_atom("pickup-forks(fork(2), philosopher(2), fork(3), 3, 4)")}
    e = State(dining.initial_state, 3, 3).stamped() | ev | timeless_atoms(dining)
    derived = minimal_model(ground, e, u).atoms - e
    assert derived == {parse_atom(f"terminated(available(fork({i})), 3, 4)") for i in range(4)}


def test_minimal_rejects_undefined_condition():
    with pytest.raises(PreconditionViolation):
        minimal_model([Clause(p, (Not(q),)), Clause(q)])


# ---------------------------------------------------------------- reducts

B = make_universe([SortDecl("blocks", (Fn("a"), Fn("b")))], 0)
X = Var("X", "blocks")
CLEAR_B = Clause(parse_atom("clear(b, 0)"), (Not(Exists(X, "blocks", Atom("on", (X, Fn("b"), 0)))),))


def test_reduct_keeps_horn():
    c = Clause(p, (q,))
    assert reduct([c], []) == [c]


def test_reduct_deletes_false_condition():
    e = [parse_atom("on(a, b, 0)")]
    assert reduct([CLEAR_B], e, B) == [Clause(e[0])]


def test_reduct_strips_true_condition():
    assert reduct([CLEAR_B], [], B) == [Clause(parse_atom("clear(b, 0)"))]


# ---------------------------------------------------------------- perfect models

def test_perfect_horn_equals_minimal():
    cs = [Clause(q), Clause(p, (q,)), Clause(atom("r"), (atom("s"),))]
    assert perfect_model(cs, {}).atoms == minimal_model(cs).atoms


def test_perfect_blocks_clear():
    blocks = program("blocks")
    u = make_universe(blocks.sorts, 0)
    ground = [g for c in blocks.l_int for g in ground_instances(c, u)]
    facts = [Clause(parse_atom("on(a, b, 0)"))]
    m = perfect_model(ground + facts, Stratification(rule=lambda x: 1 if x.pred == "clear" else 0), u)
    clear = {str(x) for x in m.atoms if x.pred == "clear"}
    assert {"clear(table, 0)", "clear(a, 0)"} <= clear
    assert "clear(b, 0)" not in clear


def test_perfect_dialogue_sentences():
    from lps.frame import merged_program, run_model

    tr = corpus_run("dialogue")
    m = run_model(merged_program(tr.program), tr.states, tr.events, False)
    assert {parse_atom("sentence(you, 1, 5)"), parse_atom("sentence(me, 6, 10)")} <= m.atoms


def test_perfect_rejects_unstratified():
    with pytest.raises(NotStratified):
        perfect_model([Clause(p, (Not(p),))], {p: 0})


# ---------------------------------------------------------------- even/succ

def test_even_not_statically_stratified():
    ok, bad = check_fol_stratification(even_program(), even_strata)
    assert not ok
    with pytest.raises(NotStratified):
        perfect_model(even_program(), even_strata)


def test_even_weakly_stratified():
    m = weakly_perfect_model(even_program(), even_strata)
    evens = {a for a in m.atoms if a.pred == "even"}
    assert evens == parity_oracle(4)


def test_even_flat_strata_without_succ():
    flat = lambda a: 0 if a.pred == "succ" else 1  # noqa: E731
    m = weakly_perfect_model(even_program(with_succ=False), flat)
    assert m.atoms == {atom("even", numeral(0))}


def test_even_flat_strata_with_succ_fails():
    flat = lambda a: 0 if a.pred == "succ" else 1  # noqa: E731
    with pytest.raises(NotWeaklyStratified):
        weakly_perfect_model(even_program(), flat)


def test_weak_agrees_on_stratified():
    cs = [Clause(q), Clause(p, (Not(atom("r")),)), Clause(atom("s"), (p, Not(q)))]
    strat = {q: 0, atom("r"): 0, p: 1, atom("s"): 2}
    assert weakly_perfect_model(cs, strat).atoms == perfect_model(cs, strat).atoms


# ---------------------------------------------------------------- Horn oracle

@st.composite
def horn_programs(draw):
    n = draw(st.integers(1, 12))
    idx = st.integers(0, n - 1)
    clauses = draw(st.lists(st.tuples(idx, st.lists(idx, max_size=3, unique=True)), max_size=14))
    return n, clauses


@settings(max_examples=250)
@given(horn_programs())
def test_horn_least_model_oracle(prog):
    n, clauses = prog
    names = [atom(f"a{i}") for i in range(n)]
    cs = [Clause(names[h], tuple(names[b] for b in body)) for h, body in clauses]
    minimal = exhaustive_minimal(n, clauses)
    assert len(minimal) == 1
    want = {names[i] for i in range(n) if minimal[0] >> i & 1}
    assert minimal_model(cs).atoms == want
    assert naive_fixpoint(cs) == horn_fixpoint(cs) == want


# ---------------------------------------------------------------- random stratified programs

@st.composite
def stratified_programs(draw):
    """Ground programs over predicates at fixed levels; FOL conditions only look strictly down."""
    levels = draw(st.lists(st.integers(0, 3), min_size=2, max_size=5))
    preds = [(f"p{i}", lvl) for i, lvl in enumerate(levels)]
    ground = [Atom(n, (x,)) for n, _ in preds for x in ELEMS]
    level = {n: lvl for n, lvl in preds}
    clauses = []
    for _ in range(draw(st.integers(1, 10))):
        head = draw(st.sampled_from(ground))
        h = level[head.pred]
        body = []
        same = [a for a in ground if level[a.pred] <= h]
        below = [n for n, lvl in preds if lvl < h]
        for _ in range(draw(st.integers(0, 3))):
            kind = draw(st.sampled_from(["pos", "neg", "exists", "forall"] if below else ["pos"]))
            if kind == "pos":
                body.append(draw(st.sampled_from(same)))
            else:
                pred = draw(st.sampled_from(below))
                if kind == "neg":
                    body.append(Not(Atom(pred, (draw(st.sampled_from(ELEMS)),))))
                elif kind == "exists":
                    body.append(Exists(Z, "e", Not(Atom(pred, (Z,)))))
                else:
                    body.append(Forall(Z, "e", Atom(pred, (Z,))))
        clauses.append(Clause(head, tuple(body)))
    return clauses, level, ground


@settings(max_examples=80)
@given(stratified_programs())
def test_stratification_independence(prog):
    clauses, level, ground = prog
    by_pred = Stratification(rule=lambda a: 2 * level[a.pred] + 1)
    ranks = Stratification(least_ranks(clauses, ground))
    assert any(by_pred(a) != ranks(a) for a in ground)
    for s in (by_pred, ranks):
        assert check_fol_stratification(clauses, s, U2)[0]
    m1 = perfect_model(clauses, by_pred, U2)
    m2 = perfect_model(clauses, ranks, U2)
    assert m1.atoms == m2.atoms
    assert is_model(clauses, m1, U2)
    assert m1.atoms == reference_model(clauses, level)
    assert weakly_perfect_model(clauses, ranks, U2).atoms == m1.atoms
