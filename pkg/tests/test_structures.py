import json
import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from artifact import gen
from artifact.equivalence import pomset_bisim
from artifact.structures import (
    PES, PetriNet, StructureError, configurations, detect_shapes, pes_compose, pn_compose,
    single, structurize_pes, structurize_pn, term_to_pes,
)
from artifact.rewrite import prove_equal
from artifact.syntax import Signature, ac_equal, parse_term, render_term

from conftest import data
from oracles import powerset_configurations

P = parse_term


def test_compose_modes():
    a, b = single("a", "x"), single("b", "y")
    s = pes_compose(a, b, "seq")
    assert s.before(s.events[0], s.events[1])
    c = pes_compose(a, b, "choice")
    assert c.conflicts(*c.events)
    p = pes_compose(a, b, "par")
    assert p.concurrent(*p.events)


def test_shapes():
    n = PES.make([("a", "a"), ("b", "b"), ("c", "c"), ("d", "d")], [("a", "b"), ("c", "d"), ("a", "d")])
    assert detect_shapes(n).lines() == ["N-shape (a, b, c, d)"]
    v = PES.make([("a", "a"), ("b", "b"), ("c", "c")], [("a", "b")], [("b", "c")])
    assert detect_shapes(v).lines() == ["V-shape (a, b, c)"]
    assert detect_shapes(term_to_pes(P("a.b"))).structured


@pytest.mark.parametrize("f,want", [
    ("v_shape.json", "a . b + a || c"),
    ("h_shape.json", "(a1 . a2 . a3) || a4 + a1 || (a4 . a5 . a6)"),
    ("n_shape.json", "c . g . b"),
])
def test_structurize_goldens(f, want):
    sig = Signature.load(data("n_sig.json"))
    assert ac_equal(structurize_pes(PES.load(data(f)), sig), P(want))


def test_n_shape_needs_gamma():
    with pytest.raises(StructureError):
        structurize_pes(PES.load(data("n_shape.json")), Signature.make(actions="abcd"))


def test_denotation_examples():
    e = term_to_pes(P("a.b"))
    assert len(e.events) == 2 and e.before(*e.events)
    e = term_to_pes(P("a||b"))
    assert len(e.events) == 2 and e.concurrent(*e.events)


def test_choice_then_seq_configurations():
    # five configurations: empty, one branch, one branch followed by c
    confs = term_to_pes(P("(a+b).c")).configurations()
    assert sorted(len(c) for c in confs) == [0, 1, 1, 2, 2]


@pytest.mark.xfail(strict=True, reason="c is copied per branch of the choice, giving 4 events (see ledger)")
def test_choice_then_seq_shares_the_tail_event():
    assert len(term_to_pes(P("(a+b).c")).events) == 3


def test_configuration_graph():
    confs, edges = configurations(PES.make([("a", "a"), ("b", "b")], [("a", "b")]))
    assert confs == [frozenset(), frozenset({"a"}), frozenset({"a", "b"})]
    assert (frozenset(), frozenset({"a", "b"}), frozenset({"a", "b"})) in edges
    confs, _ = configurations(PES.make([("a", "a"), ("b", "b")], conflict=[("a", "b")]))
    assert len(confs) == 3
    assert len(PES.make([("a", "a"), ("b", "b"), ("c", "c")]).configurations()) == 8


def test_pes_json_roundtrip(tmp_path):
    e = PES.load(data("h_shape.json"))
    p = tmp_path / "e.json"
    p.write_text(json.dumps(e.to_dict()))
    assert pomset_bisim(PES.load(p), e).related


def test_petri_structurize_join_guard():
    net = PetriNet.make(["i1", "i2", "phi", "psi"], [("ta", "a"), ("tb", "b"), ("tc", "c")],
                        [("i1", "ta"), ("ta", "phi"), ("i2", "tc"), ("tc", "psi"),
                         ("phi", "tb"), ("psi", "tb")])
    assert "[phi || psi] . b" in render_term(structurize_pn(net))


def test_petri_structurize_merges_communication():
    net = PetriNet.make(["i1", "i2", "psi"], [("ta", "a"), ("tb", "b"), ("td", "d")],
                        [("i1", "ta"), ("i2", "tb"), ("ta", "psi"), ("tb", "psi"), ("psi", "td")])
    sig = Signature.make(actions="abcd", gamma=[("a", "b", "c")])
    assert render_term(structurize_pn(net, sig)) == "([i1 || i2] . c) . [psi] . d"


def test_petri_chain():
    net = PetriNet.make(["phi", "psi"], [("ta", "a"), ("tb", "b")],
                        [("phi", "ta"), ("ta", "psi"), ("psi", "tb")])
    assert prove_equal(structurize_pn(net), P("[phi] . a . [psi] . b"))


def test_petri_conc_adds_flows_verbatim():
    net = PetriNet.make(["phi", "psi"], [("ta", "a"), ("tb", "b")],
                        [("phi", "ta"), ("ta", "psi"), ("psi", "tb")])
    both = pn_compose(net, net, "conc", [("ta", "psi")])
    assert ("lta", "rpsi") in both.flow
    with pytest.raises(StructureError):
        pn_compose(net, net, "conc", [("nope", "psi")])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_configurations_match_powerset(seed):
    rng = random.Random(seed)
    e = gen.random_pes(rng, rng.randint(0, 6))
    assert set(e.configurations()) == powerset_configurations(e)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_structurize_inverts_denotation(seed):
    rng = random.Random(seed)
    t = gen.random_term(rng, depth=3, ops=(gen.Alt, gen.Seq, gen.Par), constants=False)
    e = term_to_pes(t)
    assume(len(e.events) <= 10)
    try:
        back = structurize_pes(e)
    except StructureError:
        # tails copied under a choice inside a parallel prefix; see the xfail below
        assume(False)
    assert pomset_bisim(e, term_to_pes(back)).related


@pytest.mark.xfail(strict=True, raises=StructureError,
                   reason="sequence split needs one prefix below every later event (see ledger)")
def test_structurize_copied_tail():
    structurize_pes(term_to_pes(P("((b + a) || c) . c")))
