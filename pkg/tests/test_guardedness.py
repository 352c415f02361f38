import pytest

from coalp.cotree import Budget
from coalp.guardedness import (
    GUARDED,
    UNGUARDED,
    check_program,
    gc1_clause,
    gc1_pair,
    gc2_program,
    gc3_clause,
    gc3_program,
)
from coalp.terms import Clause, Program, Substitution, Var, apply, term_vars

from helpers import atom, corpus, parse_program


def clause(text: str) -> Clause:
    return parse_program(text).clause(1)


def test_gc1_stream_is_guarded_by_cons():
    v = gc1_clause(clause("stream([X|Y]) :- bit(X), stream(Y)."))
    assert v and "[.|.]" in v.detail


def test_gc1_comember_has_no_symbol():
    assert not gc1_clause(clause("comember(X,S) :- drop(X,S,S1), comember(X,S1)."))


def test_gc1_badstream_not_reduced():
    assert not gc1_clause(clause("badstream([X|Y]) :- badstream([X|Y])."))


def test_gc1_vacuous_cases():
    assert gc1_clause(clause("bit(0)."))
    assert gc1_clause(clause("taken(N,X) :- from(0,Y), take(N,Y,X)."))


def test_gc1_one_symbol_must_serve_every_call():
    # f drops for the first call only, g for the second only
    assert not gc1_clause(clause("p(f(X),g(Y)) :- p(X,g(Y)), p(f(X),Y)."))
    assert gc1_clause(clause("p(f(X),g(Y)) :- p(X,g(Y)), p(X,Y)."))


def test_gc1_counts_constants():
    assert gc1_clause(clause("p(a,X) :- p(X,X)."))


def test_gc1_ignores_other_clauses_order():
    p = corpus("bitlist")
    q = corpus("bitlist_swapped")
    verdicts = {str(c.head): bool(gc1_clause(c)) for c in p.clauses}
    assert verdicts == {str(c.head): bool(gc1_clause(c)) for c in q.clauses}


def test_gc1_pair_examples():
    assert gc1_pair(atom("stream([0|[X1|Y2]])"), atom("stream(Y2)"))
    looped = atom("stream2prime([s(0)|Y],[s(Y1)|Z1])")
    v = gc1_pair(looped, looped)
    assert not v and v.evidence.ancestor == v.evidence.descendant and not v.evidence.guarded
    assert not gc1_pair(atom("p(X)"), atom("p(X)"))


@pytest.mark.parametrize("text", ["p(X)", "p(a)", "q(f(X),[Y])", "r(s(s(0)),Z)"])
def test_gc1_pair_reflexive_failure(text):
    a = atom(text)
    assert not gc1_pair(a, a)


def test_gc1_pair_requires_same_predicate():
    with pytest.raises(ValueError):
        gc1_pair(atom("p(X)"), atom("q(X)"))


def test_gc2_examples():
    assert gc2_program(corpus("bitstream"))
    assert gc2_program(corpus("stream2prime"))
    assert not gc2_program(corpus("gc"))


def test_gc2_budget_exceeded_is_failure():
    p = parse_program("p(X) :- q(X). q(X) :- q(f(X)).")
    v = gc2_program(p, Budget(50, 100))
    assert not v


def test_gc3_stream2prime_identical_loop():
    p = corpus("stream2prime")
    v = gc3_clause(p, p.clause(1))
    assert not v
    ev = v.evidence
    assert ev.ancestor == ev.descendant
    canon = Substitution({v: Var(f"V{i}") for i, v in enumerate(term_vars(ev.ancestor))})
    assert str(apply(canon, ev.ancestor)) == "stream2prime([s(0)|V0],[s(V1)|V2])"


def test_gc3_passes_guarded_programs():
    for name in ("guardedgc", "takefirstn", "bitstream", "gcomember"):
        assert gc3_program(corpus(name)), name


def test_gc3_inconclusive_is_failure():
    p = corpus("bitstream")
    v = gc3_clause(p, p.clause(3), step_limit=0)
    assert not v and v.detail.startswith("inconclusive")


EXPECTED = {
    "bitstream": GUARDED,
    "bitlist": GUARDED,
    "bitlist_swapped": GUARDED,
    "badstream": UNGUARDED,
    "takefirstn": GUARDED,
    "gc": UNGUARDED,
    "guardedgc": GUARDED,
    "comember": UNGUARDED,
    "gcomember": GUARDED,
    "stream2prime": UNGUARDED,
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_verdict_matrix(name):
    report = check_program(corpus(name))
    assert report.verdict == EXPECTED[name]
    assert (report.verdict == GUARDED) == (not report.failures)


def test_comember_fails_at_gc1_clause_3():
    report = check_program(corpus("comember"))
    (f,) = report.failures
    assert f.check == "GC1" and f.subject.startswith("clause 3")


def test_stream2prime_fails_only_at_gc3():
    report = check_program(corpus("stream2prime"))
    assert {f.check for f in report.failures} == {"GC3"}
    assert any(line.startswith("GC2") for line in report.lines)


def test_report_rendering():
    text = check_program(corpus("bitstream")).render().splitlines()
    assert text[0] == "GC1 bit(0): pass — no recursive call"
    assert text[-2] == "verdict: guarded"
    assert text[-1].startswith("gc-time: ")


def test_renaming_does_not_change_outcome():
    p = corpus("takefirstn")
    renamed = Program(
        tuple(Clause(apply(Substitution({v: Var(v.name + "q") for v in term_vars(c)}), c.head),
                     tuple(apply(Substitution({v: Var(v.name + "q") for v in term_vars(c)}), b) for b in c.body),
                     c.index) for c in p.clauses),
        p.coinductive,
    )
    assert check_program(renamed).verdict == check_program(p).verdict
