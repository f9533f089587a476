import random

import pytest
from hypothesis import given, settings, strategies as st

from artifact import gen
from artifact.sos import (
    TICK, DataEnv, SosError, StateBoundExceeded, UnguardedRecursion, build_lts, cfar_transform,
    check_aip, check_guardedness, compute_clusters, derive_steps, derive_steps_guarded, terminates,
)
from artifact.equivalence import step_bisim
from artifact.syntax import Proj, RecConst, Signature, parse_spec, parse_term, render_term
from artifact.structures import pes_to_lts, term_to_pes

P = parse_term
SIG = Signature.make(actions="abc", gamma=[("a", "b", "c")])
ENV = DataEnv(["s0", "s1"], {"g": {"s0": False, "s1": True}}, {"a": {"s0": "s1", "s1": "s1"}})


def test_choice_steps():
    assert derive_steps(P("a+b")) == {(("a",), TICK), (("b",), TICK)}


def test_parallel_is_one_joint_step():
    assert derive_steps(P("a||b")) == {(("a", "b"), TICK)}


def test_communication_steps():
    assert derive_steps(P("a|b"), SIG) == {(("c",), TICK)}
    assert derive_steps(P("a|b")) == set()


def test_projection_truncates():
    [(lab, succ)] = derive_steps(P("pi[1](a.b)"))
    assert lab == ("a",)
    assert derive_steps(succ) == set()


def test_constants():
    assert terminates(P("1")) and not terminates(P("0"))
    assert derive_steps(P("0")) == derive_steps(P("1")) == set()


def test_guarded_steps():
    t = P("[g] . a")
    assert derive_steps_guarded(t, "s1", None, ENV) == {(("a",), TICK, "s1")}
    assert derive_steps_guarded(t, "s0", None, ENV) == set()
    for s in ENV.states:
        assert terminates(P("[g] + [!g]"), None, ENV, s)


def test_build_lts_examples():
    l = build_lts(P("rec X where { X = a . X }"))
    assert l.n == 1 and l.trans == [(0, ("a",), 0)]
    l = build_lts(P("rec X where { X = (a lm b) . X + c }"))
    assert l.n == 2 and (0, ("a", "b"), 0) in l.trans and l.terminating == {1}
    l = build_lts(P("hide{a}(a.b)"))
    assert [lab for _, lab, _ in l.trans] == [("tau",), ("b",)]


def test_state_bound():
    with pytest.raises(StateBoundExceeded):
        build_lts(P("rec X where { X = a . (X . b) }"), max_states=20)


def test_star_has_no_chapter3_rules():
    with pytest.raises(SosError):
        derive_steps(P("a*"))


@pytest.mark.parametrize("spec,want", [
    ("X = a . X + b", True),
    ("X = tau . X", False),
    ("X = 1 . Y, Y = 1 . X", False),
])
def test_guardedness(spec, want):
    assert check_guardedness(parse_spec(spec)) is want


def test_unguarded_raises():
    with pytest.raises(UnguardedRecursion):
        derive_steps(P("rec X where { X = 1 . X }"))


def test_clusters():
    [c] = compute_clusters(parse_spec("X = a . Y + b, Y = a . X"), {"a"})
    assert c.vars == {"X", "Y"} and [render_term(e) for e in c.exits] == ["b"]
    [c] = compute_clusters(parse_spec("X = a . X"), {"a"})
    assert c.vars == {"X"} and c.exits == [] and c.proper
    [c] = compute_clusters(parse_spec("X = b . X"), {"a"})
    assert not c.proper and [render_term(e) for e in c.exits] == ["b . X"]


def test_cfar_examples():
    assert render_term(cfar_transform(parse_spec("X = a . Y + b, Y = a . X"), {"a"}, "X")) == "tau . hide{a}(b)"
    assert render_term(cfar_transform(parse_spec("X = a . X"), {"a"}, "X")) == "tau . hide{a}(0)"


def test_aip_examples():
    assert str(check_aip(P("a.b"), P("a.b"), max_n=3)) == "equal-up-to-3"
    assert str(check_aip(P("a.b"), P("a.c"))) == "distinguished-at-2"
    assert str(check_aip(P("a||b"), P("a.b+b.a"))) == "distinguished-at-1"


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_rdp_unfolding_has_same_steps(seed):
    rng = random.Random(seed)
    spec = gen.random_linear_spec(rng, multi=True)
    for n in spec.names:
        assert derive_steps(RecConst(n, spec)) == derive_steps(gen.unfold_once(spec, n))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_sos_agrees_with_denotation_without_parallel(seed):
    # the event-structure denotation and the lock-step SOS only coincide on the
    # fragment without true concurrency operators (see ledger)
    rng = random.Random(seed)
    t = gen.random_term(rng, depth=3, ops=gen.BATC_OPS, constants=False)
    assert step_bisim(build_lts(t), pes_to_lts(term_to_pes(t))).related


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_projection_depth(seed):
    rng = random.Random(seed)
    t = gen.random_term(rng, depth=3)
    l = build_lts(Proj(1, t), SIG)
    assert all(not derive_steps(l.states[v], SIG) for _, _, v in l.trans if l.states[v] is not TICK)
