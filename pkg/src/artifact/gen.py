"""Seeded random generators for terms, signatures, LTSs, event structures and
recursive specifications."""

from __future__ import annotations

import itertools
import random

from .sos import StepLTS
from .structures import PES, StructureError
from .syntax import (
    ONE, TAU, ZERO, Act, Alt, Comm, Conc, LeftMerge, Par, RecConst, RecSpec, Seq,
    Signature, Term, Var, alt, seq,
)

ACTIONS = ("a", "b", "c")

BATC_OPS = (Alt, Seq)
APTC_OPS = (Alt, Seq, Par, LeftMerge, Comm, Conc)


def random_sig(rng: random.Random, actions=ACTIONS, gamma=True, conflict=False, order=False) -> Signature:
    acts = list(actions)
    gam = []
    if gamma:
        a, b = rng.sample(acts, 2)
        gam.append((a, b, rng.choice(acts)))
    con = []
    if conflict:
        a, b = rng.sample(acts, 2)
        con.append((a, b))
    ordr = None
    if order:
        ordr = list(acts)
        rng.shuffle(ordr)
    return Signature.make(actions=acts, gamma=gam, conflict=con, order=ordr)


def random_term(rng: random.Random, actions=ACTIONS, depth=3, ops=APTC_OPS,
                p_leaf=0.3, constants=True, tau=False) -> Term:
    if depth <= 0 or rng.random() < p_leaf:
        r = rng.random()
        if constants and r < 0.08:
            return ZERO
        if constants and r < 0.16:
            return ONE
        if tau and r < 0.26:
            return TAU
        return Act(rng.choice(actions))
    op = rng.choice(ops)
    return op(random_term(rng, actions, depth - 1, ops, p_leaf, constants, tau),
              random_term(rng, actions, depth - 1, ops, p_leaf, constants, tau))


def mutate(rng: random.Random, t: Term, actions=ACTIONS) -> Term:
    """Small random edit, used to get near-miss pairs."""
    kids = t.children
    if not kids or rng.random() < 0.3:
        k = rng.randrange(3)
        if k == 0:
            return Act(rng.choice(actions))
        if k == 1:
            return Alt(t, Act(rng.choice(actions)))
        return Seq(t, Act(rng.choice(actions)))
    i = rng.randrange(len(kids))
    new = list(kids)
    new[i] = mutate(rng, kids[i], actions)
    return t.with_children(new)


# ------------------------------------------------------------------ LTS


def random_lts(rng: random.Random, n: int, labels=("a", "b"), p_edge=0.3, p_term=0.3) -> StepLTS:
    edges = [(u, (l,), v) for u in range(n) for l in labels for v in range(n) if rng.random() < p_edge]
    term = {u for u in range(n) if rng.random() < p_term}
    return StepLTS.from_edges(n, edges, term)


def all_small_pairs(max_total=3, labels=("a", "b")):
    """Every pair of LTSs whose sizes sum to at most ``max_total``.

    Each LTS has single-action labels; state 0 is initial.
    """
    def all_lts(n):
        slots = [(u, (l,), v) for u in range(n) for l in labels for v in range(n)]
        for mask in range(1 << len(slots)):
            edges = [s for i, s in enumerate(slots) if mask >> i & 1]
            for tm in range(1 << n):
                yield StepLTS.from_edges(n, edges, {u for u in range(n) if tm >> u & 1})

    sizes = [(i, j) for i in range(1, max_total) for j in range(1, max_total) if i + j <= max_total]
    cache = {n: list(all_lts(n)) for n in range(1, max_total)}
    for i, j in sizes:
        for l1 in cache[i]:
            for l2 in cache[j]:
                yield l1, l2


# ------------------------------------------------------------------ PES


def random_pes(rng: random.Random, n: int, labels=("a", "b"), p_causal=0.3, p_conflict=0.2) -> PES:
    evs = [(f"e{i}", rng.choice(labels)) for i in range(n)]
    caus = [(f"e{i}", f"e{j}") for i in range(n) for j in range(i + 1, n) if rng.random() < p_causal]
    out = PES.make(evs, caus)
    conf = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p_conflict:
                # heredity may push the new conflict onto a causal pair; skip those
                try:
                    out = PES.make(evs, caus, conf + [(f"e{i}", f"e{j}")])
                    conf.append((f"e{i}", f"e{j}"))
                except StructureError:
                    pass
    return out


def pes_variant(rng: random.Random, pes: PES, labels=("a", "b")) -> PES:
    """A copy of ``pes`` with renamed events and occasionally one edit."""
    ids = list(pes.events)
    perm = ids[:]
    rng.shuffle(perm)
    ren = {e: f"f{perm.index(e)}" for e in ids}
    out = pes.mapped(ren)
    if rng.random() < 0.5 and ids:
        k = rng.randrange(3)
        evs = [(e, out.label[e]) for e in out.events]
        caus = list(out.causality_pairs())
        conf = [tuple(sorted(p)) for p in out.conflict]
        if k == 0:
            e = rng.choice(list(out.events))
            evs = [(x, rng.choice(labels) if x == e else l) for x, l in evs]
        elif k == 1 and caus:
            caus.pop(rng.randrange(len(caus)))
        elif len(evs) >= 2:
            a, b = rng.sample([x for x, _ in evs], 2)
            if not out.before(a, b) and not out.before(b, a):
                conf.append((a, b))
        conf = [p for p in set(conf) if not out.before(*p) and not out.before(p[1], p[0])]
        try:
            out = PES.make(evs, caus, conf)
        except StructureError:
            pass
    return out


# ------------------------------------------------------------ recursion


def random_linear_spec(rng: random.Random, nvars=3, actions=ACTIONS, max_summands=3, p_exit=0.3,
                       multi=False) -> RecSpec:
    """A guarded linear specification: every summand is a prefix or a prefix . Var."""
    names = [f"X{i}" for i in range(nvars)]
    eqs = []
    for n in names:
        parts = []
        for _ in range(rng.randint(1, max_summands)):
            pre = Act(rng.choice(actions))
            if multi and rng.random() < 0.3:
                pre = LeftMerge(pre, Act(rng.choice(actions)))
            if rng.random() < p_exit:
                parts.append(pre)
            else:
                parts.append(Seq(pre, Var(rng.choice(names))))
        eqs.append((n, alt(*parts)))
    return RecSpec.of(eqs)


def doubled_spec(spec: RecSpec) -> RecSpec:
    """Each variable split into two copies that alternate; shares the solution."""
    def ren(t, side):
        if isinstance(t, Var):
            return Var(f"{t.name}_{1 - side}")
        kids = t.children
        return t.with_children([ren(k, side) for k in kids]) if kids else t

    eqs = []
    for n in spec.names:
        for side in (0, 1):
            eqs.append((f"{n}_{side}", ren(spec.rhs(n), side)))
    return RecSpec.of(eqs)


def random_clustered_spec(rng: random.Random, hide=("a",), visible=("b", "c"), nvars=3) -> RecSpec:
    """A linear spec whose hidden-action edges form a cycle through all variables,
    plus visible exits (some leaving to an extra sink variable)."""
    names = [f"X{i}" for i in range(nvars)]
    eqs = []
    for i, n in enumerate(names):
        parts = [Seq(Act(rng.choice(hide)), Var(names[(i + 1) % nvars]))]
        for _ in range(rng.randint(0, 2)):
            k = rng.random()
            if k < 0.4:
                parts.append(Act(rng.choice(visible)))
            elif k < 0.8:
                parts.append(Seq(Act(rng.choice(visible)), Var("S")))
            else:
                parts.append(Seq(Act(rng.choice(hide)), Var(rng.choice(names))))
        eqs.append((n, alt(*parts)))
    eqs.append(("S", alt(Act(rng.choice(visible)), Seq(Act(rng.choice(visible)), Var("S")))))
    return RecSpec.of(eqs)


def unfold_once(spec: RecSpec, name: str) -> Term:
    from .syntax import substitute
    return substitute(spec.rhs(name), {n: RecConst(n, spec) for n in spec.names})
