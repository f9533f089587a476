"""Guard evaluation over finite data environments and the guard axiom suite."""

from __future__ import annotations

import random

from .syntax import (
    ONE, ZERO, Act, Alt, Atom, Comm, Encap, GAlt, GOne, GPar, GSeq, GZero, Guard,
    Neg, Par, Seq, Signature, Term, alt, seq,
)
from .sos import DataEnv, build_lts


def eval_guard(g, s, env: DataEnv) -> bool:
    if isinstance(g, GOne):
        return True
    if isinstance(g, GZero):
        return False
    if isinstance(g, Atom):
        return env.test_atom(g.name, s)
    if isinstance(g, Neg):
        return not eval_guard(g.body, s, env)
    if isinstance(g, GAlt):
        return eval_guard(g.left, s, env) or eval_guard(g.right, s, env)
    # sequential and parallel guards are both tested at the current state
    if isinstance(g, (GSeq, GPar)):
        return eval_guard(g.left, s, env) and eval_guard(g.right, s, env)
    raise TypeError(f"not a guard: {g!r}")


def truth_set(g, env: DataEnv) -> frozenset:
    return frozenset(s for s in env.states if eval_guard(g, s, env))


def wp(e: str, g, env: DataEnv) -> frozenset:
    """States from which performing e leads to a state satisfying g."""
    return frozenset(s for s in env.states if eval_guard(g, env.effect(e, s), env))


def with_atom(env: DataEnv, name: str, states) -> DataEnv:
    """A copy of env with one extra atom true exactly on ``states``."""
    tests = dict(env.tests)
    tests[name] = {s: s in states for s in env.states}
    return DataEnv(list(env.states), tests, env.effects)


def random_env(rng: random.Random, atoms=("p", "q"), actions=("a", "b", "c"), max_states=4) -> DataEnv:
    n = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n)]
    tests = {p: {s: rng.random() < 0.5 for s in states} for p in atoms}
    effects = {a: {s: rng.choice(states) for s in states} for a in actions}
    return DataEnv(states, tests, effects)


def random_guard(rng: random.Random, atoms=("p", "q"), depth=2):
    if depth == 0 or rng.random() < 0.4:
        r = rng.random()
        if r < 0.1:
            return GOne()
        if r < 0.15:
            return GZero()
        return Atom(rng.choice(atoms))
    k = rng.randrange(4)
    if k == 0:
        return Neg(random_guard(rng, atoms, depth - 1))
    cls = (GAlt, GSeq, GPar)[k - 1]
    return cls(random_guard(rng, atoms, depth - 1), random_guard(rng, atoms, depth - 1))


def random_guarded_term(rng: random.Random, atoms=("p", "q"), actions=("a", "b", "c"), depth=2) -> Term:
    if depth == 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.15:
            return ONE
        if r < 0.25:
            return ZERO
        if r < 0.45:
            return Guard(random_guard(rng, atoms, 1))
        return Act(rng.choice(actions))
    k = rng.randrange(4)
    l = random_guarded_term(rng, atoms, actions, depth - 1)
    r = random_guarded_term(rng, atoms, actions, depth - 1)
    return (Alt, Seq, Seq, Par)[k](l, r)


def _instance(axiom: str, rng, env: DataEnv, sig: Signature, atoms, actions):
    """Return (lhs, rhs, env) for one sampled instance, or None if the side
    condition of a conditional axiom cannot be met in this environment."""
    phi = random_guard(rng, atoms)
    psi = random_guard(rng, atoms)
    x = random_guarded_term(rng, atoms, actions)
    y = random_guarded_term(rng, atoms, actions)
    P, Q = Guard(phi), Guard(psi)
    nP = Guard(Neg(phi))
    g = {
        "G1": lambda: (Seq(P, nP), ZERO),
        "G2": lambda: (Alt(P, nP), ONE),
        "G3": lambda: (Alt(P, ZERO), ZERO),
        "G4": lambda: (Seq(P, Alt(x, y)), Alt(Seq(P, x), Seq(P, y))),
        "G5": lambda: (Seq(P, Seq(x, y)), Seq(Seq(P, x), y)),
        "G6": lambda: (Seq(Guard(GAlt(phi, psi)), x), Alt(Seq(P, x), Seq(Q, x))),
        "G7": lambda: (Seq(Guard(GSeq(phi, psi)), x), Seq(P, Seq(Q, x))),
        "G12": lambda: (Seq(P, Par(x, y)), Par(Seq(P, x), Seq(P, y))),
        "G13": lambda: (Seq(P, Comm(x, y)), Comm(Seq(P, x), Seq(P, y))),
        "G14": lambda: (Par(P, ZERO), ZERO),
        "G15": lambda: (Par(ZERO, P), ZERO),
        "G16": lambda: (Comm(P, ZERO), ZERO),
        "G17": lambda: (Comm(ZERO, P), ZERO),
        "G18": lambda: (Par(P, ONE), P),
        "G19": lambda: (Par(ONE, P), P),
        "G20": lambda: (Comm(P, ONE), ZERO),
        "G21": lambda: (Comm(ONE, P), ZERO),
        "G22": lambda: (Par(P, nP), ZERO),
        "G23": lambda: (Encap(frozenset(actions[:1]), P), P),
    }
    if axiom in g:
        l, r = g[axiom]()
        return l, r, env
    if axiom == "G8":
        # a guard valid in every state: phi + !phi shapes or a sampled tautology
        for _ in range(50):
            if truth_set(phi, env) == frozenset(env.states):
                return P, ONE, env
            phi = random_guard(rng, atoms)
            P = Guard(phi)
        phi = GAlt(phi, Neg(phi))
        return Guard(phi), ONE, env
    if axiom in ("G9", "G24"):
        for _ in range(200):
            n = rng.randint(2, 3)
            gs = [random_guard(rng, atoms) for _ in range(n)]
            common = frozenset(env.states)
            for h in gs:
                common &= truth_set(h, env)
            if not common:
                lhs = seq(*(Guard(h) for h in gs)) if axiom == "G9" else _par(gs)
                return lhs, ZERO, env
        return None
    if axiom in ("G10", "G11"):
        e = rng.choice(actions)
        pre = wp(e, phi, env)
        env2 = with_atom(env, "_wp", pre)
        w = Guard(Atom("_wp"))
        if axiom == "G10":
            return Seq(w, Seq(Act(e), P)), Seq(w, Act(e)), env2
        nw = Guard(Neg(Atom("_wp")))
        return Seq(nw, Seq(Act(e), nP)), Seq(nw, Act(e)), env2
    raise KeyError(f"unknown guard axiom {axiom}")


def _par(gs):
    out = Guard(gs[-1])
    for h in reversed(gs[:-1]):
        out = Par(Guard(h), out)
    return out


GUARD_AXIOMS = [f"G{i}" for i in range(1, 25)]
# G3 contradicts x + 0 = x and is kept out of the soundness suite
SOUNDNESS_EXCLUDED = {"G3"}


def equal_from_every_state(lhs, rhs, env, sig=None) -> bool:
    from .equivalence import step_bisim
    for s in env.states:
        l1 = build_lts(lhs, sig, env, s)
        l2 = build_lts(rhs, sig, env, s)
        if not step_bisim(l1, l2).related:
            return False
    return True


def check_guard_axiom(axiom: str, env: DataEnv, samples: int = 20, rng=None,
                      sig: Signature | None = None, atoms=("p", "q"), actions=("a", "b", "c")):
    """Compare both sides of sampled instances from every data state.

    Returns (ok, counterexample) where the counterexample is (lhs, rhs) or None.
    """
    rng = rng or random.Random(0)
    sig = sig or Signature.make(actions=actions, gamma=[("a", "b", "c")])
    for _ in range(samples):
        inst = _instance(axiom, rng, env, sig, atoms, actions)
        if inst is None:
            continue
        lhs, rhs, env2 = inst
        if not equal_from_every_state(lhs, rhs, env2, sig):
            return False, (lhs, rhs)
    return True, None


def wp_coherent(env: DataEnv, atoms=("p", "q"), actions=("a", "b", "c"), depth=1) -> bool:
    """From s in wp(e,g), e.[g] terminates after e; otherwise it deadlocks after e."""
    guards = _all_guards(atoms, depth)
    for e in actions:
        for g in guards:
            pre = wp(e, g, env)
            t = Seq(Act(e), Guard(g))
            for s in env.states:
                lts = build_lts(t, None, env, s)
                after = [b for a, lab, b in lts.trans if a == 0]
                ends = all(b in lts.terminating for b in after)
                if (s in pre) != (bool(after) and ends):
                    return False
    return True


def _all_guards(atoms, depth):
    base = [GOne(), GZero()] + [Atom(a) for a in atoms]
    out = list(base)
    if depth > 0:
        out += [Neg(b) for b in base]
        out += [cls(l, r) for cls in (GAlt, GSeq, GPar) for l in base for r in base]
    return out
