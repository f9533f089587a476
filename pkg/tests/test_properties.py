"""Cross-module properties on random terms."""

import random

from hypothesis import given, settings, strategies as st

from artifact import gen
from artifact.equivalence import minimize, rooted_branching_step_bisim, step_bisim
from artifact.rewrite import normalize
from artifact.sos import build_lts
from artifact.syntax import Abstr, Encap, ac_canon, parse_term, render_term

seeds = st.integers(0, 10**6)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_normal_form_is_step_bisimilar(seed):
    # conflict-free signatures only: the unless side conditions are not
    # compositional (see ledger)
    rng = random.Random(seed)
    sig = gen.random_sig(rng, gamma=rng.random() < 0.5)
    t = gen.random_term(rng, depth=3)
    assert step_bisim(build_lts(t, sig), build_lts(normalize(t, sig)[0], sig)).related


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_encapsulation_and_abstraction_commute_with_normalisation(seed):
    rng = random.Random(seed)
    sig = gen.random_sig(rng)
    t = gen.random_term(rng, depth=3, ops=gen.BATC_OPS + (gen.Par,))
    h = frozenset({rng.choice(gen.ACTIONS)})
    e = Encap(h, t)
    assert step_bisim(build_lts(e, sig), build_lts(normalize(e, sig)[0], sig)).related
    a = Abstr(h, t)
    assert rooted_branching_step_bisim(build_lts(a, sig), build_lts(normalize(a, sig, tau_laws=True)[0], sig)).related


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_canonical_order_does_not_change_behaviour(seed):
    rng = random.Random(seed)
    sig = gen.random_sig(rng)
    t = gen.random_term(rng, depth=4)
    assert step_bisim(build_lts(t, sig), build_lts(ac_canon(t), sig)).related


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_lts_construction_is_deterministic(seed):
    t = gen.random_term(random.Random(seed), depth=4)
    assert build_lts(t).trans == build_lts(parse_term(render_term(t))).trans


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_minimisation_is_idempotent(seed):
    t = gen.random_term(random.Random(seed), depth=4)
    m = minimize(build_lts(t))
    assert minimize(m).n == m.n
