"""Acceptance criteria 1-8. Each test prints one PASS/FAIL line; run directly for a plain report."""

import functools
import random
import sys
import time

import pytest

from lps import (Atom, ArbitrationPolicy, Fn, check_integrity, check_run, corpus_text, frame_check,
                 minimal_model, parse_atom, parse_choice_script, parse_event_script,
                 parse_program, perfect_model, run_system, weakly_perfect_model)
from lps.cycle import TRUE
from lps.frame import merged_program, run_model
from lps.strat import Stratification, check_fol_stratification, is_model
from lps.syntax import Clause, Exists, Forall, Not

from oracles import (ELEMS, U2, Z, even_program, even_strata, exhaustive_minimal, least_ranks,
                     numeral, parity_oracle, reference_model)

RESULTS: dict = {}
CORPUS = ("dining", "blocks", "emergency", "dialogue")


def report(n, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title}" + (f" -- {detail}" if detail else "")
    RESULTS[n] = line
    print(line)
    return ok


def atoms(*texts):
    return frozenset(parse_atom(t) for t in texts)


def _policy(name):
    try:
        return ArbitrationPolicy("scripted", choices=parse_choice_script(corpus_text(f"{name}.arb")))
    except FileNotFoundError:
        return ArbitrationPolicy()


@functools.lru_cache(maxsize=None)
def corpus_trace(name, scripted=True):
    p = parse_program(corpus_text(f"{name}.lps"))
    script = parse_event_script(corpus_text(f"{name}.evs"), p)
    t0 = time.perf_counter()
    tr = run_system(p, script, None, _policy(name) if scripted else ArbitrationPolicy())
    return tr, script, time.perf_counter() - t0


# ---------------------------------------------------------------- 1: dining trace

def _reference_dining():
    forks = lambda *ids: atoms(*(f"available(fork({i}))" for i in ids))  # noqa: E731
    all5 = forks(0, 1, 2, 3, 4)
    states = [all5, all5, all5, all5, forks(4), forks(4), all5, forks(0), forks(0), all5,
              forks(1, 2, 3), forks(1, 2, 3), all5]

    def ph(pred, *ps):
        return [f"{pred}(philosopher({i}))" for i in ps]

    def fk(pred, *ps):
        return [f"{pred}(fork({i}), philosopher({i}), fork({(i + 1) % 5}))" for i in ps]

    events = [ph("time-to-eat", 0, 1, 2, 3, 4), [], ph("think", 0, 1, 2, 3, 4),
              fk("pickup-forks", 0, 2), ph("eat", 0, 2), fk("putdown-forks", 0, 2),
              fk("pickup-forks", 1, 3), ph("eat", 1, 3), fk("putdown-forks", 1, 3),
              fk("pickup-forks", 4), ph("eat", 4), fk("putdown-forks", 4)]
    stamped = [frozenset(parse_atom(f"{e[:-1]}, {i}, {i + 1})") for e in evs) for i, evs in enumerate(events)]
    return states, stamped


DINE = atoms("dine(philosopher(0), 2, 6)", "dine(philosopher(1), 2, 9)", "dine(philosopher(2), 2, 6)",
             "dine(philosopher(3), 2, 9)", "dine(philosopher(4), 2, 12)")


def check_dining():
    tr, _, secs = corpus_trace("dining")
    want_s, want_ev = _reference_dining()
    got_s = [s.facts for s in tr.states]
    got_ev = [ev.events for ev in tr.events]
    model = run_model(merged_program(tr.program), tr.states, tr.events, False)
    dine = frozenset(a for a in model.atoms if a.pred == "dine")
    ok = got_s == want_s and got_ev == want_ev and dine == DINE and secs < 1
    return ok, f"{len(got_s)} states, {len(dine)} dine atoms, {secs:.2f}s"


# ---------------------------------------------------------------- 2: dialogue

LISTED = ("noun(you, 1, 2)", "noun-phrase(you, 1, 2)", "verb(you, 2, 3)", "noun-phrase(you, 3, 5)",
          "adjective(you, 3, 4)", "noun-phrase(you, 3, 4)", "noun(you, 4, 5)", "verb-phrase(you, 2, 5)",
          "sentence(you, 1, 3)", "sentence(you, 1, 5)", "adjective(me, 6, 7)", "noun-phrase(me, 6, 8)",
          "noun(me, 7, 8)", "noun-phrase(me, 7, 8)", "verb(me, 8, 9)", "noun-phrase(me, 9, 10)",
          "noun(me, 9, 10)", "verb-phrase(me, 8, 10)", "sentence(me, 7, 9)", "sentence(me, 7, 10)",
          "sentence(me, 6, 10)")


def check_dialogue():
    tr, script, secs = corpus_trace("dialogue")
    inputs = [a for i in range(1, len(tr.events) + 1) for a in script.ext(i)]
    said = sorted((a for ev in tr.events for a in ev.events if a.args[0] == Fn("me")), key=lambda a: a.args[-1])
    words = [str(a.args[1]) for a in said]
    model = run_model(merged_program(tr.program), tr.states, tr.events, False)
    missing = atoms(*LISTED) - model.atoms
    last_input = max(a.args[-1] for a in inputs)
    ok = (len(inputs) == 4 and words == ["my", "name", "is", "fariba"]
          and said[0].args[-2] - last_input <= 3 and not missing and secs < 1)
    gap = f"missing {', '.join(sorted(map(str, missing)))}" if missing else "every listed atom present"
    return ok, f"reply '{' '.join(words)}' from t={said[0].args[-2]}, {gap}, {secs:.2f}s"


# ---------------------------------------------------------------- random systems for 3, 4 and 8

def random_system(rng):
    """≤3 extensional fluents, ≤2 simple events, ≤2 post clauses, horizon ≤ 6."""
    nf, ne = rng.randint(1, 3), rng.randint(1, 2)
    fluents, events = [f"f{i}" for i in range(nf)], [f"e{i}" for i in range(ne)]
    arity = {n: rng.randint(0, 1) for n in fluents + events}

    def use(name, var):
        return f"{name}({var})" if arity[name] else name

    def timed(name, var, times):
        return f"{name}({var}, {times})" if arity[name] else f"{name}({times})"

    def var_for(*names):
        return "X" if all(arity[n] for n in names) else "a"

    post = []
    for _ in range(rng.randint(0, 2)):
        f, e = rng.choice(fluents), rng.choice(events)
        v = var_for(f, e)
        body = f"happens({use(e, v)}, T1, T2)"
        g = rng.choice(fluents)
        cond = rng.choice(["", "holds", "not"])
        if cond:
            body += f" & {'~' if cond == 'not' else ''}holds({use(g, v if arity[g] else 'a')}, T1)"
        post.append(f"  {rng.choice(['initiated', 'terminated'])}({use(f, v)}, T1, T2) <- {body}.")
    pre, rules = [], []
    if ne == 2:
        e0, e1 = events
        v = var_for(e0, e1)
        rules.append(f"  {timed(e0, v, 'T1, T2')} -> {timed(e1, v, 'T3, T4')} & T2 =< T3.")
        if rng.random() < 0.5:
            g = rng.choice(fluents)
            pre.append(f"  false <- happens({use(e1, 'a')}, T1, T2) & holds({use(g, 'a')}, T1).")
    decl = " ".join([f"fluent {f}{'(x)' if arity[f] else ''}." for f in fluents]
                    + [f"event {e}{'(x)' if arity[e] else ''}." for e in events])
    init = " ".join(use(f, rng.choice("ab")) + "." for f in fluents if rng.random() < 0.5)
    src = (f"sorts {{ x = {{a, b}}. }}\ndeclare {{ {decl} }}\ninitial {{ {init} }}\n"
           f"post {{\n{chr(10).join(post)}\n}}\npre {{\n{chr(10).join(pre)}\n}}\n"
           f"reactive {{\n{chr(10).join(rules)}\n}}\n")
    horizon = rng.randint(0, 6)
    lines = []
    names = [use(e, c) for e in events[:1] for c in ("ab" if arity[e] else "a")]
    for i in range(1, horizon + 1):
        evs = rng.sample(names, rng.randint(0, len(names)))
        if evs:
            lines.append(f"@{i}: {', '.join(evs)}.")
    return src, "\n".join(lines), horizon


@functools.lru_cache(maxsize=None)
def random_runs(n=120, seed=2024):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        src, script_text, horizon = random_system(rng)
        p = parse_program(src)
        script = parse_event_script(script_text, p)
        out.append((src, run_system(p, script, horizon), script))
    return out


def all_runs():
    """Every run of criteria 1-3 as (label, trace, script)."""
    runs = [("dining", *corpus_trace("dining")[:2]), ("dialogue", *corpus_trace("dialogue")[:2])]
    runs += [(f"{n} (greedy)", *corpus_trace(n, scripted=False)[:2]) for n in CORPUS]
    runs += [(f"random #{i}", tr, script) for i, (_, tr, script) in enumerate(random_runs())]
    return runs


# ---------------------------------------------------------------- 3: frame theorem

def check_frame():
    t0 = time.perf_counter()
    bad = []
    for label, tr, _ in all_runs():
        r = frame_check(merged_program(tr.program), tr.states, tr.events)
        if not (r.equal and r.first_equal):
            bad.append(label)
    secs = time.perf_counter() - t0
    n_random = len(random_runs())
    return not bad and n_random >= 100 and secs < 60, f"{n_random} random + corpus, {len(bad)} unequal, {secs:.1f}s"


# ---------------------------------------------------------------- 4: soundness

def check_soundness():
    checked, false = 0, []
    for label, tr, _ in all_runs():
        if not tr.goals and not tr.program.reactive_rules:
            continue
        if any(g.status != TRUE for g in tr.goals):
            continue
        checked += 1
        verdicts = check_run(merged_program(tr.program), tr.states, tr.events)
        false += [(label, v.text) for v in verdicts if v.kind in ("rule", "goal") and not v.holds]
    return checked >= 4 and not false, f"{checked} fully closed runs checked, {len(false)} false sentences"


# ---------------------------------------------------------------- 5: stratification independence

def random_stratified(rng):
    levels = [rng.randint(0, 3) for _ in range(rng.randint(2, 5))]
    preds = [(f"p{i}", lvl) for i, lvl in enumerate(levels)]
    level = dict(preds)
    ground = [Atom(n, (x,)) for n, _ in preds for x in ELEMS]
    clauses = []
    for _ in range(rng.randint(1, 10)):
        head = rng.choice(ground)
        h = level[head.pred]
        below = [n for n, lvl in preds if lvl < h]
        body = []
        for _ in range(rng.randint(0, 3)):
            kind = rng.choice(["pos", "neg", "exists", "forall"] if below else ["pos"])
            if kind == "pos":
                body.append(rng.choice([a for a in ground if level[a.pred] <= h]))
            elif kind == "neg":
                body.append(Not(Atom(rng.choice(below), (rng.choice(ELEMS),))))
            elif kind == "exists":
                body.append(Exists(Z, "e", Not(Atom(rng.choice(below), (Z,)))))
            else:
                body.append(Forall(Z, "e", Atom(rng.choice(below), (Z,))))
        clauses.append(Clause(head, tuple(body)))
    return clauses, level, ground


def check_independence(n=60):
    rng = random.Random(7)
    agree = 0
    for _ in range(n):
        clauses, level, ground = random_stratified(rng)
        s1 = Stratification(rule=lambda a, level=level: 2 * level[a.pred] + 1)
        s2 = Stratification(least_ranks(clauses, ground))
        valid = all(check_fol_stratification(clauses, s, U2)[0] for s in (s1, s2))
        distinct = any(s1(a) != s2(a) for a in ground)
        m1, m2 = perfect_model(clauses, s1, U2), perfect_model(clauses, s2, U2)
        if valid and distinct and m1.atoms == m2.atoms == reference_model(clauses, level) \
                and is_model(clauses, m1, U2):
            agree += 1
    return agree == n >= 50, f"{agree}/{n} programs agree under two stratifications"


# ---------------------------------------------------------------- 6: minimal-model oracle

def check_minimal(n=250):
    rng = random.Random(11)
    agree = 0
    for _ in range(n):
        size = rng.randint(1, 12)
        raw = [(rng.randrange(size), rng.sample(range(size), rng.randint(0, min(3, size))))
               for _ in range(rng.randint(0, 14))]
        names = [Atom(f"a{i}") for i in range(size)]
        cs = [Clause(names[h], tuple(names[b] for b in body)) for h, body in raw]
        minimal = exhaustive_minimal(size, raw)
        want = {names[i] for i in range(size) if minimal[0] >> i & 1}
        if len(minimal) == 1 and minimal_model(cs).atoms == want:
            agree += 1
    return agree == n >= 200, f"{agree}/{n} Horn programs match exhaustive search"


# ---------------------------------------------------------------- 7: even/succ

def check_even():
    prog = even_program(4)
    loop = Clause(Atom("even", (numeral(2),)), (Atom("succ", (numeral(2), numeral(2))), Not(Atom("even", (numeral(2),)))))
    static = check_fol_stratification(prog, even_strata)[0]
    # the X = Y instance puts even(Y) under its own negation, so no stratification exists
    impossible = loop in prog
    m = weakly_perfect_model(prog, even_strata)
    evens = frozenset(a for a in m.atoms if a.pred == "even")
    ok = not static and impossible and evens == parity_oracle(4)
    return ok, f"static check {'passes' if static else 'fails'}, even atoms {sorted(map(str, evens))}"


# ---------------------------------------------------------------- 8: integrity always

def check_integrity_always():
    bad, cycles = [], 0
    for label, tr, script in all_runs():
        for i, ev in enumerate(tr.events):
            cycles += 1
            if not check_integrity(tr.program, tr.states[i], ev)[0] or not set(script.ext(i + 1)) <= ev.events:
                bad.append((label, i + 1))
    return not bad, f"{cycles} committed event sets re-checked, {len(bad)} violations"


CRITERIA = {
    1: ("dining-philosophers trace reproduction", check_dining),
    2: ("dialogue model and reply", check_dialogue),
    3: ("frame theorem on corpus and random programs", check_frame),
    4: ("soundness of closed runs", check_soundness),
    5: ("stratification independence", check_independence),
    6: ("minimal-model oracle", check_minimal),
    7: ("weak stratification of even/succ", check_even),
    8: ("integrity always holds", check_integrity_always),
}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    title, check = CRITERIA[n]
    ok, detail = check()
    assert report(n, title, ok, detail), RESULTS[n]


if __name__ == "__main__":
    results = [report(n, title, *check()) for n, (title, check) in sorted(CRITERIA.items())]
    sys.exit(0 if all(results) else 1)
