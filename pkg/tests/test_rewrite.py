import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from artifact import gen
from artifact.rewrite import (
    BudgetExceeded, RewriteError, apply_rule, is_basic, normalize, normalize_random, prove_equal,
)
from artifact.syntax import Signature, ac_equal, parse_term, render_term

from oracles import rewrite_closure

P = parse_term
SIG = Signature.make(actions="abc", gamma=[("a", "b", "c")], order=["a", "b", "c"])


def nf(text, sig=None):
    return normalize(P(text, sig), sig)[0]


@pytest.mark.parametrize("src,want,sig", [
    ("(a+b).c", "a.c + b.c", None),
    ("a + 0", "a", None),
    ("a & b", "a lm b + b lm a + c", SIG),
    ("theta(a)", "a", None),
    ("encap{a}(a.b)", "0", None),
])
def test_normalize_examples(src, want, sig):
    assert ac_equal(nf(src, sig), P(want, sig))


@pytest.mark.parametrize("src,sig", [("a & b", SIG), ("encap{a}(a.b)", None), ("(a+b)||c", SIG)])
def test_brute_force_rewriter_has_one_normal_form(src, sig):
    forms = rewrite_closure(P(src, sig), sig)
    assert len(forms) == 1
    assert ac_equal(forms.pop(), nf(src, sig))


def test_trace_records_rule_and_position():
    _, steps = normalize(P("(a+b).c"), trace=True)
    assert [s.rule.name for s in steps] == ["RA4"]
    assert steps[0].line().startswith("RA4 @ ")


def test_is_basic_examples():
    assert is_basic(P("a.(b+c)"), "BATC")
    assert not is_basic(P("(a+b).c"), "BATC")
    assert is_basic(P("a lm b"), "APTC")


def test_prove_equal_examples():
    assert prove_equal(P("a.1"), P("a"))
    assert not prove_equal(P("a.(b+c)"), P("a.b+a.c"))


@pytest.mark.xfail(strict=True, reason="theta distributes over the normalised merge; the "
                   "H-shape equation only holds up to pomset bisimulation (see ledger)")
def test_prove_equal_h_shape():
    sig = Signature.make(actions=[f"a{i}" for i in range(1, 7)], conflict=[("a2", "a5")])
    lhs = P("theta((a1.a2.a3) || (a4.a5.a6))", sig)
    rhs = P("(a1.a2.a3) || a4 + a1 || (a4.a5.a6)", sig)
    assert prove_equal(lhs, rhs, sig)


def test_apply_rule_examples():
    assert ac_equal(apply_rule(P("a & b"), "RP1"), P("a || b + a | b"))
    assert render_term(apply_rule(P("[g] . [!g]"), "RG1")) == "0"
    with pytest.raises(RewriteError) as e:
        apply_rule(P("a+b"), "RA3")
    assert e.value.kind == "no-match"


def test_apply_rule_at_position():
    t = apply_rule(P("d . ((a+b).c)"), "RA4", "1")
    assert ac_equal(t, P("d . (a.c + b.c)"))


def test_budget():
    with pytest.raises(BudgetExceeded):
        normalize(P("(a+b).(a+b).(a+b).(a+b)"), trace=True, budget=2)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_normal_forms_are_basic_and_strategy_independent(seed):
    rng = random.Random(seed)
    sig = gen.random_sig(rng)
    t = gen.random_term(rng, depth=4)
    n, _ = normalize(t, sig)
    assert is_basic(n, "APTC")
    assert ac_equal(n, normalize_random(t, sig, random.Random(seed + 1)))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_normalize_matches_exhaustive_rewriting(seed):
    rng = random.Random(seed)
    sig = gen.random_sig(rng)
    t = gen.random_term(rng, depth=2, ops=gen.APTC_OPS)
    try:
        forms = rewrite_closure(t, sig, limit=1500)
    except RuntimeError:
        assume(False)
    assert len(forms) == 1
    assert ac_equal(forms.pop(), normalize(t, sig)[0])
