import random

from hypothesis import given, settings, strategies as st

from artifact import gen
from artifact.equivalence import (
    branching_bisim, brute_force_bisim, brute_force_hhp, hhp_bisim, hp_bisim, minimize,
    pomset_bisim, pes_step_bisim, rooted_branching_step_bisim, satisfies, step_bisim,
    weak_step_bisim,
)
from artifact.sos import StepLTS, build_lts
from artifact.structures import PES, pes_compose, term_to_pes
from artifact.syntax import Signature, parse_term

from oracles import gfp_bisim

P = parse_term
SIG = Signature.make(actions="abc", gamma=[("a", "b", "c")])


def lts(text, sig=None):
    return build_lts(P(text, sig), sig)


def pes(text):
    return term_to_pes(P(text))


def test_step_examples():
    assert step_bisim(lts("a+a"), lts("a")).related
    assert not step_bisim(lts("a||b"), lts("a.b+b.a")).related


def test_witness_formula_separates():
    l1, l2 = lts("a||b"), lts("a.b+b.a")
    v = step_bisim(l1, l2)
    assert satisfies(l1, v.witness) and not satisfies(l2, v.witness)
    assert v.describe().startswith("distinguished by")


def test_rooted_branching_examples():
    assert rooted_branching_step_bisim(lts("a.tau"), lts("a")).related
    assert rooted_branching_step_bisim(lts("a.(tau.(b+c)+b)"), lts("a.(b+c)")).related
    assert not rooted_branching_step_bisim(lts("tau.a"), lts("a")).related
    # the unrooted relations accept the initial tau
    assert branching_bisim(lts("tau.a"), lts("a")).related
    assert weak_step_bisim(lts("tau.a"), lts("a")).related


def test_brute_force_examples():
    l = lts("a.b+c")
    assert brute_force_bisim(l, l).related
    stop = StepLTS.from_edges(1, [], {0})
    dead = StepLTS.from_edges(1, [])
    assert not brute_force_bisim(stop, dead).related


def test_pomset_examples():
    assert pomset_bisim(PES.make([("x", "a"), ("y", "b")], [("x", "y")]), pes("a.b")).related
    assert not pomset_bisim(pes("a||b"), pes_compose(pes("a.b"), pes("b.a"), "choice")).related


def test_history_preserving_examples():
    e = pes("a.(b+c) || c")
    assert hp_bisim(e, e).related and hhp_bisim(e, e).related
    assert not hp_bisim(pes("a.(b+c)"), pes("a.b+a.c")).related


def test_hhp_strictly_finer_than_hp():
    # the classic absorption pair
    l = pes("a||(b+c) + (a+c)||b")
    r = pes("a||(b+c) + (a+c)||b + a||b")
    assert hp_bisim(l, r).related
    assert not hhp_bisim(l, r).related


def test_minimize_merges_duplicates():
    assert minimize(lts("a+a")).n == 2


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(1, 4))
def test_step_bisim_matches_gfp_oracle(seed, n1, n2):
    rng = random.Random(seed)
    l1, l2 = gen.random_lts(rng, n1), gen.random_lts(rng, n2)
    assert step_bisim(l1, l2).related == gfp_bisim(l1, l2)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_minimize_preserves_bisimilarity(seed):
    rng = random.Random(seed)
    l = gen.random_lts(rng, 5)
    m = minimize(l)
    assert m.n <= l.n and gfp_bisim(l, m)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_hhp_matches_exhaustive_relation_search(seed):
    rng = random.Random(seed)
    e1 = gen.random_pes(rng, rng.randint(1, 4))
    e2 = gen.pes_variant(rng, e1)
    assert hhp_bisim(e1, e2).related == brute_force_hhp(e1, e2).related


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_hierarchy(seed):
    rng = random.Random(seed)
    e1 = gen.random_pes(rng, rng.randint(1, 5))
    e2 = gen.pes_variant(rng, e1)
    if hhp_bisim(e1, e2).related:
        assert hp_bisim(e1, e2).related
    if hp_bisim(e1, e2).related:
        assert pomset_bisim(e1, e2).related
    if pomset_bisim(e1, e2).related:
        assert pes_step_bisim(e1, e2).related
