"""Independent reference computations the engines are checked against."""

from lps import Atom, Fn, SortDecl, Var, make_universe
from lps.fol import Model, eval_truth
from lps.strat import condition_atoms
from lps.syntax import Clause, Not

ELEMS = (Fn("u"), Fn("v"))
U2 = make_universe([SortDecl("e", ELEMS)], 0)
Z = Var("Z", "e")


def exhaustive_minimal(n, clauses):
    """Every ⊆-minimal model of propositional Horn clauses over atoms 0..n-1, by brute force.

    ``clauses`` are (head, body indices) pairs; interpretations are bitmasks.
    """
    enc = [(1 << h, sum(1 << b for b in body)) for h, body in clauses]
    models = [m for m in range(1 << n) if all(m & h or (m & bm) != bm for h, bm in enc)]
    minimal = []
    for m in sorted(models, key=lambda x: bin(x).count("1")):
        if not any(k & m == k for k in minimal):
            minimal.append(m)
    return minimal


def least_ranks(clauses, ground, universe=U2):
    """The lowest stratification: rank(head) ≥ rank(positive) and > rank(atoms under FOL)."""
    rank = {a: 0 for a in ground}
    changed = True
    while changed:
        changed = False
        for c in clauses:
            need = 0
            for cond in c.body:
                if isinstance(cond, Atom):
                    need = max(need, rank[cond])
                else:
                    need = max([need] + [rank[a] + 1 for a in condition_atoms(cond, universe)])
            if need > rank[c.head]:
                rank[c.head] = need
                changed = True
    return rank


def reference_model(clauses, level, universe=U2):
    """Predicate-level evaluation: naive fixpoint per level, conditions read off lower levels."""
    m = set()
    for lvl in sorted(set(level.values())):
        part = [c for c in clauses if level[c.head.pred] == lvl]
        while True:
            lower = Model({a for a in m if level[a.pred] < lvl})
            new = {c.head for c in part
                   if all((b in m) if isinstance(b, Atom) else eval_truth(b, lower, universe)
                          for b in c.body)}
            if new <= m:
                break
            m |= new
    return m


def numeral(n):
    t = Fn("0")
    for _ in range(n):
        t = Fn("s", (t,))
    return t


def depth(t):
    return 0 if not t.args else 1 + depth(t.args[0])


def even_program(n=4, with_succ=True):
    """even(0). even(Y) <- succ(X, Y) & ~even(X), grounded over 0 .. s^n(0)."""
    terms = [numeral(i) for i in range(n + 1)]
    facts = [Clause(Atom("even", (numeral(0),)))]
    if with_succ:
        facts += [Clause(Atom("succ", (terms[i], terms[i + 1]))) for i in range(n)]
    rules = [Clause(Atom("even", (y,)), (Atom("succ", (x, y)), Not(Atom("even", (x,)))))
             for x in terms for y in terms]
    return facts + rules


def even_strata(a):
    return 0 if a.pred == "succ" else depth(a.args[0]) + 1


def parity_oracle(n=4):
    """Even numerals up to s^n(0) by direct search: k is even iff k - 2 is even."""
    even = {0}
    for k in range(2, n + 1):
        if k - 2 in even:
            even.add(k)
    return {Atom("even", (numeral(k),)) for k in even}
