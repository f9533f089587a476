"""The thirteen acceptance criteria, each at its stated sample size and time limit.

Every test records one PASS/FAIL line, printed in the terminal summary.
Criteria that the implementation cannot meet fail honestly; the reasons are
in the decision ledger.
"""

import random
import time

from artifact import audit, gen, kleene
from artifact.equivalence import (
    brute_force_bisim, hhp_bisim, hp_bisim, pomset_bisim, pes_step_bisim,
    rooted_branching_step_bisim, step_bisim,
)
from artifact.rewrite import is_basic, normalize, normalize_random
from artifact.sos import build_lts, cfar_transform, check_aip, derive_steps
from artifact.structures import PES, merge_communications, structurize_pes, term_to_pes
from artifact.syntax import Abstr, RecConst, Seq, Signature, TAU, ac_equal, parse_term

from conftest import ACCEPTANCE_LINES, data

SEED = 20240601


def record(n, ok, seconds, limit, detail=""):
    within = seconds < limit
    status = "PASS" if ok and within else "FAIL"
    msg = f"CRITERION {n}: {status} ({seconds:.1f}s, limit {limit}s)"
    if not within:
        msg += " over time"
    if detail:
        msg += f" {detail}"
    ACCEPTANCE_LINES.append(msg)
    print(msg)
    assert ok, detail
    assert within, f"took {seconds:.1f}s"


def failing(rep):
    return [o.axiom for o in rep.outcomes if not o.ok] + [n for n, ok in rep.controls if not ok]


def test_criterion_01_axiom_soundness():
    t = time.perf_counter()
    rep = audit.run_table(["BATC", "APTC", "ENCAP", "PROJ"], SEED, 200, pes=True, suite="c1")
    bad = failing(rep)
    pes_n = sum(o.pes_checked for o in rep.outcomes)
    record(1, not bad, time.perf_counter() - t, 180,
           f"{len(rep.outcomes)} axioms, {pes_n} instances also checked on event structures"
           + (f"; failing: {', '.join(bad)}" if bad else ""))


def test_criterion_02_tau_laws():
    t = time.perf_counter()
    rep = audit.run_suite("tau", SEED, 200)
    bad = failing(rep)
    record(2, not bad, time.perf_counter() - t, 120, f"failing: {', '.join(bad)}" if bad else "")


def test_criterion_03_elimination_confluence():
    t = time.perf_counter()
    rng = random.Random(SEED)
    not_basic = disagree = 0
    for i in range(1000):
        sig = gen.random_sig(rng, gamma=rng.random() < 0.5)
        term = gen.random_term(rng, depth=rng.randint(1, 6), p_leaf=0.35)
        nf, _ = normalize(term, sig)
        if not is_basic(nf, "APTC"):
            not_basic += 1
        other = normalize_random(term, sig, random.Random(i))
        if not ac_equal(nf, other):
            disagree += 1
    record(3, not_basic == 0 and disagree == 0, time.perf_counter() - t, 120,
           f"not basic {not_basic}, strategy disagreements {disagree}")


MILNER_SIGS = {
    "gamma-undefined": Signature.make(actions=["a", "b", "c", "d"]),
    "gamma-defined": Signature.make(actions=["a", "b", "c", "d"],
                                    gamma=[("a", "b", "d"), ("a", "c", "d"), ("b", "c", "d"),
                                           ("a", "a", "d"), ("b", "b", "d"), ("c", "c", "d")]),
}


def milner_failures():
    bad = []
    for name, sig in MILNER_SIGS.items():
        for x in "abc":
            for y in "abc":
                lhs = parse_term(f"{x} & {y}")
                rhs = parse_term(f"{x} . {y} + {y} . {x} + {x} || {y} + {x} | {y}")
                l1 = kleene.aptc_star_lts(lhs, sig)
                l2 = kleene.aptc_star_lts(rhs, sig)
                if not step_bisim(l1, l2).related:
                    bad.append(f"{x}&{y}/{name}")
    return bad


def test_criterion_04_milner_expansion():
    t = time.perf_counter()
    bad = milner_failures()
    record(4, not bad, time.perf_counter() - t, 1, f"18 cases, failing: {bad}" if bad else "18 cases")


def test_criterion_05_structurization_goldens():
    t = time.perf_counter()
    sig = Signature.load(data("n_sig.json"))
    goldens = {
        "v_shape.json": "a . b + a || c",
        "h_shape.json": "(a1 . a2 . a3) || a4 + a1 || (a4 . a5 . a6)",
        "n_shape.json": "c . g . b",
    }
    notes = []
    ok = True
    for f, want in goldens.items():
        pes = PES.load(data(f))
        got = structurize_pes(pes, sig)
        same = ac_equal(got, parse_term(want))
        bis = pomset_bisim(pes, term_to_pes(got, sig)).related
        note = f"{f.split('_')[0]}: golden {'ok' if same else 'MISMATCH'}, pomset vs original {'ok' if bis else 'NO'}"
        merged, pairs = merge_communications(pes, sig)
        if pairs:
            # informational: the communication-merged PES is what the term denotes
            ok_m = pomset_bisim(merged, term_to_pes(got, sig)).related
            note += f" (vs gamma-merged {'ok' if ok_m else 'NO'})"
        notes.append(note)
        ok &= same and bis
    record(5, ok, time.perf_counter() - t, 1, "; ".join(notes))


def test_criterion_06_oracle_agreement():
    t = time.perf_counter()
    bad = 0
    n_pairs = 0
    for l1, l2 in gen.all_small_pairs(3):
        n_pairs += 1
        if step_bisim(l1, l2).related != brute_force_bisim(l1, l2).related:
            bad += 1
    rng = random.Random(SEED)
    for _ in range(10_000):
        l1, l2 = gen.random_lts(rng, 4), gen.random_lts(rng, 4)
        n_pairs += 1
        if step_bisim(l1, l2).related != brute_force_bisim(l1, l2).related:
            bad += 1
    record(6, bad == 0, time.perf_counter() - t, 120, f"{n_pairs} pairs, {bad} disagreements")


def test_criterion_07_hierarchy():
    t = time.perf_counter()
    rng = random.Random(SEED)
    violations = 0
    counts = {"hhp": 0, "hp": 0, "pomset": 0, "step": 0}
    for _ in range(500):
        e1 = gen.random_pes(rng, rng.randint(1, 6))
        e2 = gen.pes_variant(rng, e1) if rng.random() < 0.7 else gen.random_pes(rng, rng.randint(1, 6))
        v = {"hhp": hhp_bisim(e1, e2).related, "hp": hp_bisim(e1, e2).related,
             "pomset": pomset_bisim(e1, e2).related, "step": pes_step_bisim(e1, e2).related}
        for k in counts:
            counts[k] += v[k]
        if (v["hhp"] and not v["hp"]) or (v["hp"] and not v["pomset"]) or (v["pomset"] and not v["step"]):
            violations += 1
    record(7, violations == 0, time.perf_counter() - t, 120,
           f"{violations} violations; related counts {counts}")


def _aip_pair(rng):
    if rng.random() < 0.5:
        x = gen.random_term(rng, depth=3, ops=(gen.Alt, gen.Seq, gen.Par))
        y = x if rng.random() < 0.3 else gen.mutate(rng, x)
        return x, y
    spec = gen.random_linear_spec(rng, nvars=2)
    x = RecConst("X0", spec)
    if rng.random() < 0.5:
        return x, RecConst("X0_0", gen.doubled_spec(spec))
    other = gen.random_linear_spec(rng, nvars=2)
    return x, RecConst("X0", other)


def test_criterion_08_aip():
    t = time.perf_counter()
    rng = random.Random(SEED)
    bad = related = 0
    for _ in range(200):
        x, y = _aip_pair(rng)
        sb = step_bisim(build_lts(x), build_lts(y)).related
        related += sb
        if check_aip(x, y).equal != sb:
            bad += 1
    record(8, bad == 0, time.perf_counter() - t, 120, f"{bad} disagreements, {related} related pairs")


def test_criterion_09_recursion():
    t = time.perf_counter()
    rng = random.Random(SEED)
    bad = 0
    for _ in range(100):
        spec = gen.random_linear_spec(rng, nvars=rng.randint(1, 4), multi=True)
        for n in spec.names:
            if derive_steps(RecConst(n, spec)) != derive_steps(gen.unfold_once(spec, n)):
                bad += 1
    probe = parse_term("rec X where { X = a . X }")
    probe2 = parse_term("rec Y where { Y = a . Z, Z = a . Y }")
    rsp = step_bisim(build_lts(probe), build_lts(probe2)).related
    rsp_random = 0
    for _ in range(20):
        spec = gen.random_linear_spec(rng, nvars=3)
        rsp_random += step_bisim(build_lts(RecConst("X1", spec)),
                                 build_lts(RecConst("X1_1", gen.doubled_spec(spec)))).related
    record(9, bad == 0 and rsp and rsp_random == 20, time.perf_counter() - t, 60,
           f"RDP mismatches {bad}, RSP probe {'ok' if rsp else 'NO'}, doubled specs {rsp_random}/20")


def test_criterion_10_cfar():
    t = time.perf_counter()
    rng = random.Random(SEED)
    bad = []
    for i in range(50):
        spec = gen.random_clustered_spec(rng, nvars=rng.randint(1, 3))
        hide = frozenset({"a"})
        var = rng.choice([n for n in spec.names if n != "S"])
        lhs = Seq(TAU, Abstr(hide, RecConst(var, spec)))
        rhs = cfar_transform(spec, hide, var)
        if not rooted_branching_step_bisim(build_lts(lhs), build_lts(rhs)).related:
            bad.append(i)
    record(10, not bad, time.perf_counter() - t, 60, f"{len(bad)} of 50 specs differ")


def test_criterion_11_guards():
    t = time.perf_counter()
    rep = audit.run_suite("guards", SEED, 200)
    bad = failing(rep)
    record(11, not bad, time.perf_counter() - t, 60, f"failing: {bad}" if bad else "3 environments")


def test_criterion_12_ka_mil():
    t = time.perf_counter()
    rng = random.Random(SEED)
    bad_ax = [ax for ax in kleene.KA_AXIOMS
              if not kleene.check_ka_axiom(ax, random.Random(f"{SEED}{ax}"), 200).ok]
    disagree = 0
    for _ in range(10_000):
        r1 = kleene.random_regex(rng, depth=3)
        r2 = kleene.random_regex(rng, depth=3) if rng.random() < 0.5 else gen.mutate(rng, r1, ("a", "b"))
        if kleene.regex_equiv(r1, r2) != (kleene.words(r1, 8) == kleene.words(r2, 8)):
            disagree += 1
    mil = {ax: kleene.check_mil_axiom(ax, random.Random(f"{SEED}{ax}"), 100).ok for ax in kleene.MIL_AXIOMS}
    # A12 is the fixpoint rule; the criterion asks for A1-A11 only
    bad_mil = [ax for ax, ok in mil.items() if not ok and ax != "A12"]
    P = parse_term
    splits = all(kleene.regex_equiv(P(a), P(b)) and not kleene.mil_bisim(P(a), P(b))
                 for a, b in (("a . (b + c)", "a . b + a . c"), ("a . 0", "0")))
    ok = not bad_ax and not disagree and not bad_mil and splits
    record(12, ok, time.perf_counter() - t, 180,
           f"KA failing {bad_ax}, enumeration disagreements {disagree}, Mil failing {bad_mil}, "
           f"Mil A12 {'ok' if mil['A12'] else 'NO'}, KA-only pairs split {'ok' if splits else 'NO'}")


CKA_SIG = Signature.make(actions=["a", "b", "c"], gamma=[("a", "b", "c")])


def test_criterion_13_cka():
    t = time.perf_counter()
    bad = []
    bounded = 0
    for ax in kleene.CKA_AXIOMS:
        r = kleene.check_cka_axiom(ax, None, CKA_SIG, 4, random.Random(f"{SEED}{ax}"), 200)
        bounded += r.bounded
        if not r.ok:
            bad.append(f"{ax} ({r.detail})")
    inc, strict = audit.exchange_law()
    ok = not bad and inc and strict
    record(13, ok, time.perf_counter() - t, 120,
           f"{len(kleene.CKA_AXIOMS)} axioms, {bounded} verdicts bounded; exchange inclusion "
           f"{'ok' if inc else 'NO'}, strict {'ok' if strict else 'NO'}"
           + (f"; failing: {'; '.join(bad)}" if bad else ""))
