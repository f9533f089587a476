import random

import pytest
from hypothesis import given, settings, strategies as st

from artifact import kleene
from artifact.kleene import (
    CKA_AXIOMS, KA_AXIOMS, MIL_AXIOMS, STAR_AXIOMS, aptc_star_lts, check_cka_axiom, check_ka_axiom,
    check_mil_axiom, check_star_axiom, is_n_free, mil_bisim, mil_chart, random_regex, random_tca,
    regex_diff, regex_equiv, regex_leq, tca_equiv_bounded, tca_language, tca_leq_bounded, words,
)
from artifact.equivalence import step_bisim
from artifact.syntax import Signature, parse_term

from oracles import gfp_bisim, language

P = parse_term
SIG = Signature.make(actions="abcd", gamma=[("a", "b", "c")])
NOSIG = Signature.make(actions="abcd")


def test_regex_examples():
    assert regex_equiv(P("1 + a.a*"), P("a*"))
    assert regex_equiv(P("a.(b+c)"), P("a.b+a.c"))
    assert regex_equiv(P("a.0"), P("0"))
    assert regex_leq(P("a"), P("a*")) and not regex_leq(P("a*"), P("a"))
    assert regex_diff(P("a*"), P("1+a")) == "aa"


def test_mil_chart_examples():
    l = mil_chart(P("a*"))
    assert l.n == 2 and l.terminating == {0, 1}
    l = mil_chart(P("0"))
    assert l.n == 1 and not l.trans and not l.terminating
    l = mil_chart(P("1"))
    assert l.n == 1 and l.terminating == {0}


def test_mil_examples():
    assert mil_bisim(P("(1+a)*"), P("a*"))
    assert not mil_bisim(P("a.(b+c)"), P("a.b+a.c"))
    assert not mil_bisim(P("a.0"), P("0"))


def test_mil_agrees_with_gfp_oracle():
    for x, y in [("(1+a)*", "a*"), ("a.(b+c)", "a.b+a.c"), ("(a+b)*", "(a*.b*)*")]:
        assert mil_bisim(P(x), P(y)) == gfp_bisim(mil_chart(P(x)), mil_chart(P(y)))


def test_language_examples():
    assert tca_language(P("a||b")).lines() == ["a || b"]
    assert tca_language(P("a^"), star_bound=2).lines() == ["1", "a", "a || a"]
    assert sorted(tca_language(P("a&b"), SIG).lines()) == ["a || b", "c"]


def test_bounded_equivalence_examples():
    assert tca_equiv_bounded(P("a&b"), P("a||b+a|b"), SIG).equal
    assert tca_equiv_bounded(P("a||b"), P("b||a")).equal
    lhs, rhs = P("(a||b).(c&d)"), P("(a.c)||(b.d)")
    assert not tca_equiv_bounded(lhs, rhs, NOSIG).equal
    assert tca_leq_bounded(lhs, rhs, NOSIG)


def test_star_verdict_reports_bound():
    v = tca_equiv_bounded(P("a*"), P("1 + a.a*"))
    assert v.equal and not v.exact and str(v) == "equal-up-to-bound"


def test_aptc_star_lts_examples():
    l = aptc_star_lts(P("a*"))
    assert l.n == 2 and l.terminating == {0, 1}
    l = aptc_star_lts(P("a||b"))
    assert l.trans == [(0, ("a", "b"), 1)] and l.terminating == {1}
    l = aptc_star_lts(P("a&b"), SIG)
    assert {lab for s, lab, _ in l.trans if s == 0} == {("a",), ("b",), ("a", "b"), ("c",)}


def test_named_cka_checks():
    assert check_cka_axiom("A12", {"x": "a"}, NOSIG, 4).ok
    assert check_cka_axiom("C4", None, SIG, 4).ok
    assert check_cka_axiom("P11", {"x": "a"}, NOSIG, 3).ok


@pytest.mark.xfail(strict=True, reason="communication in z & h has no counterpart on the right (see ledger)")
def test_exchange_law_with_communication():
    assert check_cka_axiom("P6", {"x": "1", "y": "1", "z": "a", "h": "b"}, SIG, 4).ok


def test_exchange_law_without_communication():
    assert check_cka_axiom("P6", None, NOSIG, 4, random.Random(1), 50, ("a", "b")).ok


@pytest.mark.parametrize("ax", list(KA_AXIOMS))
def test_ka_axioms(ax):
    assert check_ka_axiom(ax, random.Random(ax), 100).ok


@pytest.mark.parametrize("ax", list(MIL_AXIOMS))
def test_mil_axioms(ax):
    assert check_mil_axiom(ax, random.Random(ax), 50).ok


@pytest.mark.parametrize("ax", [a for a in CKA_AXIOMS if a != "P6"])
def test_cka_axioms(ax):
    assert check_cka_axiom(ax, None, SIG, 4, random.Random(ax), 30).ok


STAR_FAIL = {"P1", "P6", "P11", "P13"}


@pytest.mark.parametrize("ax", [a for a in STAR_AXIOMS if a not in STAR_FAIL])
def test_star_axioms_lts(ax):
    assert check_star_axiom(ax, SIG, random.Random(ax), 20).ok


@pytest.mark.parametrize("ax", sorted(STAR_FAIL))
@pytest.mark.xfail(strict=True, reason="lock-step || against interleaving & and single-step dagger (see ledger)")
def test_star_axioms_lts_known_failures(ax):
    assert check_star_axiom(ax, SIG, random.Random(ax), 20).ok


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6))
def test_words_match_backtracking_oracle(seed):
    r = random_regex(random.Random(seed), depth=3)
    assert {"".join(w) for w in words(r, 6)} == language(r, "ab", 6)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6))
def test_regex_equiv_matches_enumeration(seed):
    rng = random.Random(seed)
    r1, r2 = random_regex(rng, depth=2), random_regex(rng, depth=2)
    if regex_equiv(r1, r2):
        assert language(r1, "ab", 6) == language(r2, "ab", 6)
    else:
        w = regex_diff(r1, r2)
        from oracles import matches
        assert matches(r1, w) != matches(r2, w)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_mil_finer_than_language(seed):
    rng = random.Random(seed)
    r1, r2 = random_regex(rng, depth=2), random_regex(rng, depth=2)
    if mil_bisim(r1, r2):
        assert regex_equiv(r1, r2)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_languages_are_n_free(seed):
    t = random_tca(random.Random(seed), depth=2)
    assert all(is_n_free(p) for p in tca_language(t, SIG, 4).pomsets)
