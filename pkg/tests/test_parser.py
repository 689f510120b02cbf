import pytest
from hypothesis import given, strategies as st

from lps import Atom, Fn, corpus_text, parse_atom, parse_event_script, parse_program
from lps.errors import (KindViolation, LPSSyntaxError, TimeArgViolation, UnfoldDepthExceeded,
                        UnknownEventPredicate)
from lps.printer import print_program
from lps.syntax import Exists, Forall, Not

from conftest import CORPUS, program


def philosopher(i):
    return Fn("philosopher", (i,))


def test_dining_components(dining):
    assert len(dining.reactive_rules) == 1
    assert len(dining.l_events) == 1
    assert len(dining.l_timeless) == 5
    assert len(dining.d_post) == 2
    assert len(dining.d_pre) == 2
    assert len(dining.initial_state) == 5


def test_empty_program():
    p = parse_program("")
    assert not (p.sorts or p.reactive_rules or p.l_int or p.l_events or p.l_timeless
                or p.d_post or p.d_pre or p.initial_state or p.initial_goals)


def test_consequent_before_antecedent():
    with pytest.raises(TimeArgViolation):
        parse_program("declare { event p. event q. }\nreactive { p(T1, T2) -> q(T3, T4) & T3 < T1. }")


def test_fluent_used_as_intensional():
    with pytest.raises(KindViolation):
        parse_program("declare { fluent p. event e. }\nintensional { p(T) <- e(T, T). }")


def test_wrong_time_arity_located():
    with pytest.raises(TimeArgViolation) as e:
        parse_program("declare { fluent p. event e. }\nreactive { p(T1, T2) -> e(T2, T3). }")
    assert e.value.located("x.lps").startswith("x.lps:2:")


def test_syntax_error_located():
    with pytest.raises(LPSSyntaxError) as e:
        parse_program("declare { fluent p. }\ninitial { p(1 }")
    assert e.value.located("f.lps").startswith("f.lps:2:")


def test_user_temporal_clauses_rejected():
    with pytest.raises(LPSSyntaxError):
        parse_program("temp { succ(1, 2). }")


def test_recursive_antecedent_composite():
    src = ("declare { composite c. event e. }\n"
           "events { c(T1, T3) <- c(T1, T2) & e(T2, T3). }\n"
           "reactive { c(T1, T2) -> e(T2, T3). }")
    with pytest.raises(UnfoldDepthExceeded):
        parse_program(src)


def test_feedback_action_rejected():
    src = "sorts { x = {a}. }\ndeclare { fluent p(x). event e(x). }\nreactive { p(a, T) -> e(Y, T, T2). }"
    with pytest.raises(KindViolation):
        parse_program(src)


def test_action_bound_by_condition_accepted():
    src = ("sorts { x = {a}. }\ndeclare { fluent p(x). event e(x). }\n"
           "reactive { p(a, T) -> p(Y, T) & e(Y, T, T2). }")
    assert len(parse_program(src).reactive_rules) == 1


def test_holds_and_plain_forms_agree():
    plain = parse_program("declare { fluent p. event e. }\npre { false <- e(T1, T2) & p(T1). }")
    meta = parse_program("declare { fluent p. event e. }\npre { false <- happens(e, T1, T2) & holds(p, T1). }")
    assert plain.d_pre == meta.d_pre


# ---------------------------------------------------------------- event scripts

def test_script_dining(dining):
    s = parse_event_script(corpus_text("dining.evs"), dining)
    assert set(s.ext(1)) == {Atom("time-to-eat", (philosopher(i), 0, 1)) for i in range(5)}


def test_script_empty():
    s = parse_event_script("")
    assert all(s.ext(i) == () for i in range(1, 5))


def test_script_stamps(blocks):
    s = parse_event_script("@4: request(on(a, b)).", blocks)
    assert s.ext(4) == (parse_atom("request(on(a, b), 3, 4)"),)


def test_script_unknown_predicate(blocks):
    with pytest.raises(UnknownEventPredicate):
        parse_event_script("@1: zap(a).", blocks)
    with pytest.raises(UnknownEventPredicate):
        parse_event_script("@1: on(a, b).", blocks)  # a fluent, not an event


# ---------------------------------------------------------------- printing

@pytest.mark.parametrize("name", CORPUS)
def test_corpus_round_trip(name):
    p = program(name)
    assert parse_program(print_program(p)) == p


def test_empty_round_trip():
    assert parse_program(print_program(parse_program(""))) == parse_program("")


def test_quantifiers_survive():
    p = parse_program(
        "sorts { b = {x, y}. }\ndeclare { fluent on(b, b). intensional tidy. }\n"
        "intensional { tidy(T) <- forall X:b (exists Y:b on(X, Y, T) -> ~on(Y, X, T)). }")
    q = parse_program(print_program(p))
    body = q.l_int[0].body[0]
    assert isinstance(body, Forall) and q == p


ATOMS = ["p(a, T)", "p(b, T)", "q(T)", "r(a)", "p(X, T)"]


def _formula(depth):
    leaf = st.sampled_from(ATOMS[:4])
    if depth == 0:
        return leaf
    sub = _formula(depth - 1)
    return st.one_of(
        leaf,
        st.builds(lambda f: f"~{f}", sub),
        st.builds(lambda f, g, op: f"({f} {op} {g})", sub, sub, st.sampled_from(["&", "|", "->"])),
        st.builds(lambda q, f: f"{q} X:s ({f} & p(X, T))", st.sampled_from(["forall", "exists"]), sub),
    )


@given(st.lists(_formula(3), min_size=1, max_size=3))
def test_random_round_trip(bodies):
    clauses = "\n".join(f"  h{i}(T) <- q(T) & {b}." for i, b in enumerate(bodies))
    src = ("sorts { s = {a, b}. }\n"
           "declare { fluent p(s). fluent q. timeless r(s). "
           + " ".join(f"intensional h{i}." for i in range(len(bodies))) + " }\n"
           f"intensional {{\n{clauses}\n}}\n")
    p = parse_program(src)
    assert parse_program(print_program(p)) == p


def test_precedence_not_binds_tightest():
    p = parse_program("declare { fluent p. fluent q. intensional h. }\nintensional { h(T) <- ~p(T) & q(T). }")
    assert isinstance(p.l_int[0].body[0], Not)
    assert len(p.l_int[0].body) == 2


def test_exists_structure():
    p = parse_program("sorts { s = {a}. }\ndeclare { fluent p(s). intensional h. }\n"
                      "intensional { h(T) <- exists X:s p(X, T). }")
    assert isinstance(p.l_int[0].body[0], Exists)
