"""Soundness audits: sample axiom instances and compare both sides semantically."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from . import gen
from .equivalence import hhp_bisim, hp_bisim, pomset_bisim, rooted_branching_step_bisim, step_bisim
from .sos import SosError, build_lts
from .structures import StructureError, term_to_pes
from .syntax import (
    ONE, TAU, ZERO, Abstr, Act, Alt, Comm, Conc, Encap, LeftMerge, Par, Proj, Seq, Signature,
    Theta, Unless, render_term,
)


class V:
    """Instantiation namespace handed to the axiom lambdas."""

    def __init__(self, **kw):
        self.__dict__.update(kw)


def _chain(names):
    t = Act(names[-1])
    for a in reversed(names[:-1]):
        t = LeftMerge(Act(a), t)
    return t


BATC = {
    "A1": lambda v: (Alt(v.x, v.y), Alt(v.y, v.x)),
    "A2": lambda v: (Alt(Alt(v.x, v.y), v.z), Alt(v.x, Alt(v.y, v.z))),
    "A3": lambda v: (Alt(v.x, v.x), v.x),
    "A4": lambda v: (Seq(Alt(v.x, v.y), v.z), Alt(Seq(v.x, v.z), Seq(v.y, v.z))),
    "A5": lambda v: (Seq(Seq(v.x, v.y), v.z), Seq(v.x, Seq(v.y, v.z))),
    "A6": lambda v: (Alt(v.x, ZERO), v.x),
    "A7": lambda v: (Seq(ZERO, v.x), ZERO),
    "A8": lambda v: (Seq(ONE, v.x), v.x),
    "A9": lambda v: (Seq(v.x, ONE), v.x),
}

PARALLEL = {
    "P1": lambda v: (Conc(v.x, v.y), Alt(Par(v.x, v.y), Comm(v.x, v.y))),
    "P2": lambda v: (Par(v.x, v.y), Alt(LeftMerge(v.x, v.y), LeftMerge(v.y, v.x))),
    "P3": lambda v: (LeftMerge(v.a1, Seq(v.a2, v.y)), Seq(LeftMerge(v.a1, v.a2), v.y)),
    "P4": lambda v: (LeftMerge(Seq(v.a1, v.x), v.a2), Seq(LeftMerge(v.a1, v.a2), v.x)),
    "P5": lambda v: (LeftMerge(Seq(v.a1, v.x), Seq(v.a2, v.y)), Seq(LeftMerge(v.a1, v.a2), Conc(v.x, v.y))),
    "P6": lambda v: (LeftMerge(Alt(v.x, v.y), v.z), Alt(LeftMerge(v.x, v.z), LeftMerge(v.y, v.z))),
    "P7": lambda v: (LeftMerge(ZERO, v.x), ZERO),
    "P8": lambda v: (LeftMerge(ONE, v.x), v.x),
    "P9": lambda v: (LeftMerge(v.x, ONE), v.x),
    "C10": lambda v: (Comm(v.a1, v.a2), v.g),
    "C11": lambda v: (Comm(v.a1, Seq(v.a2, v.y)), Seq(v.g, v.y)),
    "C12": lambda v: (Comm(Seq(v.a1, v.x), v.a2), Seq(v.g, v.x)),
    "C13": lambda v: (Comm(Seq(v.a1, v.x), Seq(v.a2, v.y)), Seq(v.g, Conc(v.x, v.y))),
    "C14": lambda v: (Comm(Alt(v.x, v.y), v.z), Alt(Comm(v.x, v.z), Comm(v.y, v.z))),
    "C15": lambda v: (Comm(v.x, Alt(v.y, v.z)), Alt(Comm(v.x, v.y), Comm(v.x, v.z))),
    "C16": lambda v: (Comm(ZERO, v.x), ZERO),
    "C17": lambda v: (Comm(v.x, ZERO), ZERO),
    "C18": lambda v: (Comm(ONE, v.x), ZERO),
    "C19": lambda v: (Comm(v.x, ONE), ZERO),
    "CE20": lambda v: (Theta(v.a), v.a),
    "CE21": lambda v: (Theta(ZERO), ZERO),
    "CE22": lambda v: (Theta(Alt(v.x, v.y)), Alt(Theta(v.x), Theta(v.y))),
    "CE23": lambda v: (Theta(Seq(v.x, v.y)), Seq(Theta(v.x), Theta(v.y))),
    "CE24": lambda v: (Theta(LeftMerge(v.x, v.y)),
                       Alt(LeftMerge(Unless(Theta(v.x), v.y), v.y), LeftMerge(Unless(Theta(v.y), v.x), v.x))),
    "CE25": lambda v: (Theta(Comm(v.x, v.y)),
                       Alt(Comm(Unless(Theta(v.x), v.y), v.y), Comm(Unless(Theta(v.y), v.x), v.x))),
    "U26": lambda v: (Unless(v.c1, v.c2), ONE),
    "U27": lambda v: (Unless(v.c3, v.c2), v.c3),
    "U28": lambda v: (Unless(v.c1, v.c3), ONE),
    "U29": lambda v: (Unless(v.c3, v.c1), ONE),
    "U30": lambda v: (Unless(v.a, ZERO), v.a),
    "U31": lambda v: (Unless(ZERO, v.a), ZERO),
    "U32": lambda v: (Unless(v.a, ONE), v.a),
    "U33": lambda v: (Unless(ONE, v.a), ONE),
    "U34": lambda v: (Unless(Alt(v.x, v.y), v.z), Alt(Unless(v.x, v.z), Unless(v.y, v.z))),
    "U35": lambda v: (Unless(Seq(v.x, v.y), v.z), Seq(Unless(v.x, v.z), Unless(v.y, v.z))),
    "U36": lambda v: (Unless(LeftMerge(v.x, v.y), v.z), LeftMerge(Unless(v.x, v.z), Unless(v.y, v.z))),
    "U37": lambda v: (Unless(Comm(v.x, v.y), v.z), Comm(Unless(v.x, v.z), Unless(v.y, v.z))),
    "U38": lambda v: (Unless(v.x, Alt(v.y, v.z)), Unless(Unless(v.x, v.y), v.z)),
    "U39": lambda v: (Unless(v.x, Seq(v.y, v.z)), Unless(Unless(v.x, v.y), v.z)),
    "U40": lambda v: (Unless(v.x, LeftMerge(v.y, v.z)), Unless(Unless(v.x, v.y), v.z)),
    "U41": lambda v: (Unless(v.x, Comm(v.y, v.z)), Unless(Unless(v.x, v.y), v.z)),
}

ENCAP = {
    "D1": lambda v: (Encap(v.H, v.out), v.out),
    "D2": lambda v: (Encap(v.H, v.inn), ZERO),
    "D3": lambda v: (Encap(v.H, ZERO), ZERO),
    "D4": lambda v: (Encap(v.H, ONE), ONE),
    "D5": lambda v: (Encap(v.H, Alt(v.x, v.y)), Alt(Encap(v.H, v.x), Encap(v.H, v.y))),
    "D6": lambda v: (Encap(v.H, Seq(v.x, v.y)), Seq(Encap(v.H, v.x), Encap(v.H, v.y))),
    "D7": lambda v: (Encap(v.H, LeftMerge(v.x, v.y)), LeftMerge(Encap(v.H, v.x), Encap(v.H, v.y))),
}

PROJ = {
    "PR1": lambda v: (Proj(v.n, Alt(v.x, v.y)), Alt(Proj(v.n, v.x), Proj(v.n, v.y))),
    "PR2": lambda v: (Proj(v.n, LeftMerge(v.x, v.y)), LeftMerge(Proj(v.n, v.x), Proj(v.n, v.y))),
    "PR3": lambda v: (Proj(v.n + 1, v.chain), v.chain),
    "PR4": lambda v: (Proj(v.n + 1, Seq(v.chain, v.x)), Seq(v.chain, Proj(v.n, v.x))),
    "PR5": lambda v: (Proj(0, v.x), ZERO),
    "PR6": lambda v: (Proj(v.n, ZERO), ZERO),
    "PR7": lambda v: (Proj(v.n, ONE), ONE),
}

TAU_AX = {
    "B1": lambda v: (Seq(v.x, TAU), v.x),
    "B2": lambda v: (Seq(v.a, Alt(Seq(TAU, Alt(v.x, v.y)), v.x)), Seq(v.a, Alt(v.x, v.y))),
    "B3": lambda v: (LeftMerge(v.x, TAU), v.x),
    "TI1": lambda v: (Abstr(v.I, v.out), v.out),
    "TI2": lambda v: (Abstr(v.I, v.inn), TAU),
    "TI3": lambda v: (Abstr(v.I, ZERO), ZERO),
    "TI4": lambda v: (Abstr(v.I, ONE), ONE),
    "TI5": lambda v: (Abstr(v.I, Alt(v.x, v.y)), Alt(Abstr(v.I, v.x), Abstr(v.I, v.y))),
    "TI6": lambda v: (Abstr(v.I, Seq(v.x, v.y)), Seq(Abstr(v.I, v.x), Abstr(v.I, v.y))),
    "TI7": lambda v: (Abstr(v.I, LeftMerge(v.x, v.y)), LeftMerge(Abstr(v.I, v.x), Abstr(v.I, v.y))),
}

TABLES = {"BATC": BATC, "APTC": PARALLEL, "ENCAP": ENCAP, "PROJ": PROJ, "TAU": TAU_AX}


def _needs(axiom):
    """Which action side conditions the instance sampler must satisfy."""
    if axiom in ("P3", "P4", "P5"):
        return "leq"
    if axiom.startswith("C1") and axiom[1:].isdigit() and int(axiom[1:]) <= 13:
        return "gamma"
    if axiom in ("U26", "U27", "U28", "U29"):
        return "conflict"
    return None


def sample_instance(axiom: str, table: dict, rng: random.Random, sig: Signature,
                    depth=2, ops=gen.APTC_OPS, tau=False):
    """Return (lhs, rhs) or None when the signature cannot meet the side condition."""
    acts = list(sig.actions) or list(gen.ACTIONS)

    def term():
        return gen.random_term(rng, acts, depth, ops, tau=tau)

    v = V(x=term(), y=term(), z=term(), a=Act(rng.choice(acts)), n=rng.randint(0, 2))
    need = _needs(axiom)
    if need == "leq":
        pairs = [(p, q) for p in acts for q in acts if sig.leq(p, q)]
        a1, a2 = rng.choice(pairs)
        v.a1, v.a2 = Act(a1), Act(a2)
    elif need == "gamma":
        # half the time a communicating pair, otherwise any pair (gamma may be undefined: 0)
        pairs = [(p, q) for p in acts for q in acts if sig.comm(p, q) is not None]
        if not pairs or rng.random() < 0.5:
            pairs = [(p, q) for p in acts for q in acts]
        a1, a2 = rng.choice(pairs)
        g = sig.comm(a1, a2)
        v.a1, v.a2, v.g = Act(a1), Act(a2), (ZERO if g is None else Act(g))
    elif need == "conflict":
        pairs = sorted(tuple(sorted(p)) for p in sig.conflict) if sig.conflict else []
        if not pairs:
            return None
        c1, c2 = rng.choice(pairs)
        if rng.random() < 0.5:
            c1, c2 = c2, c1
        if axiom == "U27":
            cands = [c for c in acts if sig.leq(c, c1)]
        elif axiom in ("U28", "U29"):
            cands = [c for c in acts if sig.leq(c2, c)]
        else:
            cands = acts
        v.c1, v.c2, v.c3 = Act(c1), Act(c2), Act(rng.choice(cands))
    if axiom in ("D1", "D2", "TI1", "TI2"):
        k = rng.randint(1, len(acts) - 1)
        hs = frozenset(rng.sample(acts, k))
        v.H = v.I = hs
        v.inn = Act(rng.choice(sorted(hs)))
        v.out = Act(rng.choice([c for c in acts if c not in hs]))
    else:
        v.H = v.I = frozenset(rng.sample(acts, rng.randint(0, len(acts))))
    v.chain = _chain([rng.choice(acts) for _ in range(rng.randint(1, 3))])
    return table[axiom](v)


@dataclass
class Outcome:
    axiom: str
    ok: bool
    checked: int
    pes_checked: int = 0
    counterexample: tuple | None = None
    note: str = ""

    def line(self):
        tag = "ok" if self.ok else "FAIL"
        extra = f", {self.pes_checked} with event structures" if self.pes_checked else ""
        s = f"{self.axiom}: {tag} ({self.checked} instances{extra})"
        if self.note:
            s += f" {self.note}"
        if self.counterexample:
            l, r, why = self.counterexample
            s += f"\n    lhs: {render_term(l)}\n    rhs: {render_term(r)}\n    why: {why}"
        return s


@dataclass
class Report:
    suite: str
    seed: int
    samples: int
    outcomes: list = field(default_factory=list)
    controls: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self):
        return all(o.ok for o in self.outcomes) and all(ok for _, ok in self.controls)

    def lines(self):
        out = [f"suite {self.suite} seed {self.seed} samples {self.samples}"]
        out += [o.line() for o in self.outcomes]
        out += [f"control {name}: {'ok' if ok else 'FAIL'}" for name, ok in self.controls]
        out.append(f"{'PASS' if self.ok else 'FAIL'} in {self.seconds:.1f}s")
        return out

    def to_dict(self):
        return {
            "command": "audit", "suite": self.suite, "seed": self.seed, "samples": self.samples,
            "ok": self.ok, "seconds": round(self.seconds, 3),
            "axioms": [{"axiom": o.axiom, "ok": o.ok, "checked": o.checked, "pes_checked": o.pes_checked,
                        "counterexample": None if not o.counterexample else
                        {"lhs": render_term(o.counterexample[0]), "rhs": render_term(o.counterexample[1]),
                         "why": o.counterexample[2]}}
                       for o in self.outcomes],
            "controls": [{"name": n, "ok": ok} for n, ok in self.controls],
        }


def _pes_check(lhs, rhs, sig, max_events):
    try:
        e1, e2 = term_to_pes(lhs, sig), term_to_pes(rhs, sig)
    except StructureError:
        return None
    if len(e1.events) > max_events or len(e2.events) > max_events:
        return None
    for name, rel in (("pomset", pomset_bisim), ("hp", hp_bisim), ("hhp", hhp_bisim)):
        if not rel(e1, e2).related:
            return name
    return ""


def check_axiom(axiom: str, table: dict, rng: random.Random, sigs, samples: int,
                relation="step", pes=False, max_events=8, depth=2, ops=gen.APTC_OPS, tau=False) -> Outcome:
    rel = step_bisim if relation == "step" else rooted_branching_step_bisim
    checked = pes_checked = 0
    for i in range(samples):
        sig = sigs[i % len(sigs)]
        inst = sample_instance(axiom, table, rng, sig, depth, ops, tau)
        if inst is None:
            continue
        lhs, rhs = inst
        try:
            l1, l2 = build_lts(lhs, sig), build_lts(rhs, sig)
        except SosError as exc:
            return Outcome(axiom, False, checked, pes_checked, (lhs, rhs, f"error: {exc}"))
        checked += 1
        v = rel(l1, l2)
        if not v.related:
            return Outcome(axiom, False, checked, pes_checked, (lhs, rhs, v.describe()))
        if pes:
            bad = _pes_check(lhs, rhs, sig, max_events)
            if bad:
                return Outcome(axiom, False, checked, pes_checked, (lhs, rhs, f"not {bad}-bisimilar"))
            if bad is not None:
                pes_checked += 1
    return Outcome(axiom, True, checked, pes_checked)


def audit_signatures(rng: random.Random):
    """Three-action signatures with and without gamma and conflict entries."""
    return [
        Signature.make(actions=list(gen.ACTIONS)),
        Signature.make(actions=list(gen.ACTIONS), gamma=[("a", "b", "c")]),
        Signature.make(actions=list(gen.ACTIONS), gamma=[("a", "b", "c")], conflict=[("a", "b")],
                       order=["a", "b", "c"]),
        Signature.make(actions=list(gen.ACTIONS), conflict=[("b", "c")]),
    ]


def run_table(tables, seed=0, samples=200, relation="step", pes=False, suite="", tau=False,
              skip=()) -> Report:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    sigs = audit_signatures(rng)
    rep = Report(suite, seed, samples)
    for tname in tables:
        tbl = TABLES[tname]
        for ax in tbl:
            if ax in skip:
                continue
            sub = random.Random(f"{seed}-{tname}-{ax}")
            rep.outcomes.append(check_axiom(ax, tbl, sub, sigs, samples, relation, pes, tau=tau))
    rep.seconds = time.perf_counter() - t0
    return rep


def run_suite(suite: str, seed: int = 0, samples: int = 200) -> Report:
    from . import guards, kleene
    from .syntax import parse_term
    if suite == "batc":
        return run_table(["BATC"], seed, samples, pes=True, suite=suite)
    if suite == "aptc":
        return run_table(["APTC", "ENCAP", "PROJ"], seed, samples, pes=True, suite=suite)
    if suite == "tau":
        rep = run_table(["TAU"], seed, samples, relation="rbstep", suite=suite, tau=True)
        l1, l2 = build_lts(parse_term("tau . a")), build_lts(parse_term("a"))
        rep.controls.append(("tau . a distinguished from a",
                             not rooted_branching_step_bisim(l1, l2).related))
        return rep
    t0 = time.perf_counter()
    rep = Report(suite, seed, samples)
    rng = random.Random(seed)
    if suite == "guards":
        for k in range(3):
            env = guards.random_env(random.Random(f"{seed}-env-{k}"))
            for ax in guards.GUARD_AXIOMS:
                if ax in guards.SOUNDNESS_EXCLUDED:
                    continue
                ok, cex = guards.check_guard_axiom(ax, env, samples=max(1, samples // 10),
                                                   rng=random.Random(f"{seed}-{k}-{ax}"))
                rep.outcomes.append(Outcome(f"{ax}@env{k}", ok, max(1, samples // 10), 0,
                                            None if ok else (cex[0], cex[1], "not step-bisimilar from every state")))
            rep.controls.append((f"wp coherence env{k}", guards.wp_coherent(env)))
    elif suite == "ka":
        for ax in kleene.KA_AXIOMS:
            r = kleene.check_ka_axiom(ax, random.Random(f"{seed}-{ax}"), samples)
            rep.outcomes.append(Outcome(ax, r.ok, r.samples, note=r.detail))
    elif suite == "mil":
        for ax in kleene.MIL_AXIOMS:
            r = kleene.check_mil_axiom(ax, random.Random(f"{seed}-{ax}"), max(1, samples // 2))
            rep.outcomes.append(Outcome(ax, r.ok, r.samples, note=r.detail))
        P = parse_term
        for a, b in (("a . (b + c)", "a . b + a . c"), ("a . 0", "0")):
            rep.controls.append((f"{a} vs {b}: language-equal, not bisimilar",
                                 kleene.regex_equiv(P(a), P(b)) and not kleene.mil_bisim(P(a), P(b))))
    elif suite == "cka":
        for ax in kleene.CKA_AXIOMS:
            r = kleene.check_cka_axiom(ax, None, None, 4, random.Random(f"{seed}-{ax}"), max(1, samples // 4))
            rep.outcomes.append(Outcome(ax, r.ok, r.samples, note=("(bounded) " if r.bounded else "") + r.detail))
        inc, strict = exchange_law()
        rep.controls.append(("exchange law inclusion", inc))
        rep.controls.append(("exchange law strict", strict))
    elif suite == "star":
        for ax in kleene.STAR_AXIOMS:
            r = kleene.check_star_axiom(ax, None, random.Random(f"{seed}-{ax}"), max(1, samples // 4))
            rep.outcomes.append(Outcome(ax, r.ok, r.samples, note=r.detail))
    else:
        raise ValueError(f"unknown suite {suite}")
    rep.seconds = time.perf_counter() - t0
    return rep


def exchange_law(sig=None):
    """(inclusion, strictness) for (a||b).(c&d) against (a.c)||(b.d)."""
    from .kleene import tca_leq_bounded
    from .syntax import parse_term
    sig = sig or Signature.make(actions=["a", "b", "c", "d"])
    l, r = parse_term("(a || b) . (c & d)"), parse_term("(a . c) || (b . d)")
    return tca_leq_bounded(l, r, sig, 4), not tca_leq_bounded(r, l, sig, 4)


SUITES = ("batc", "aptc", "tau", "guards", "ka", "mil", "cka", "star")
