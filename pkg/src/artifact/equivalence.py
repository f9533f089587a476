"""Bisimulation checkers for step systems and prime event structures."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .sos import StepLTS, render_label

try:
    from ._refine import refine as _refine
    KERNEL = "cython"
except ImportError:  # pragma: no cover - depends on the build
    from ._refine_py import refine as _refine
    KERNEL = "python"


@dataclass
class Verdict:
    related: bool
    witness: object = None
    info: dict = field(default_factory=dict)

    def __bool__(self):
        return self.related

    def describe(self) -> str:
        if self.related:
            return "related"
        if isinstance(self.witness, tuple) and self.witness and self.witness[0] in _FORMULA_HEADS:
            return "distinguished by " + render_formula(self.witness)
        if self.witness is None:
            return "distinguished"
        return f"distinguished: {self.witness}"


# ------------------------------------------------------------ disjoint union


def union(l1: StepLTS, l2: StepLTS):
    """Disjoint union; returns (n, edges, terminating, root1, root2)."""
    off = l1.n
    edges = list(l1.trans) + [(a + off, lab, b + off) for a, lab, b in l2.trans]
    term = set(l1.terminating) | {u + off for u in l2.terminating}
    return l1.n + l2.n, edges, term, l1.initial, l2.initial + off


def _encode(edges):
    labs = {}
    src, lab, dst = [], [], []
    for a, l, b in edges:
        src.append(a)
        lab.append(labs.setdefault(l, len(labs)))
        dst.append(b)
    return src, lab, dst, labs


def strong_partition(n, edges, term):
    src, lab, dst, labs = _encode(edges)
    init = [1 if u in term else 0 for u in range(n)]
    return _refine(n, src, lab, dst, init)


# ------------------------------------------------------------ HML witness

_FORMULA_HEADS = {"tt", "term", "not", "and", "dia"}


def render_formula(f) -> str:
    head = f[0]
    if head == "tt":
        return "tt"
    if head == "term":
        return "↓"
    if head == "not":
        return "¬" + render_formula(f[1])
    if head == "and":
        if not f[1]:
            return "tt"
        return "(" + " ∧ ".join(render_formula(g) for g in f[1]) + ")" if len(f[1]) > 1 else render_formula(f[1][0])
    if head == "dia":
        return f"<{render_label(f[1])}>" + render_formula(f[2])
    raise ValueError(head)


def sat(succ, term, u, f) -> bool:
    head = f[0]
    if head == "tt":
        return True
    if head == "term":
        return u in term
    if head == "not":
        return not sat(succ, term, u, f[1])
    if head == "and":
        return all(sat(succ, term, u, g) for g in f[1])
    if head == "dia":
        return any(l == f[1] and sat(succ, term, v, f[2]) for l, v in succ[u])
    raise ValueError(head)


def satisfies(lts: StepLTS, f, state=None) -> bool:
    return sat(lts.succ(), lts.terminating, lts.initial if state is None else state, f)


def _witness(history, succ, term, u, v):
    """A formula true at u and false at v; u and v must be split in ``history``."""
    r = next(i for i, h in enumerate(history) if h[u] != h[v])
    if r == 0:
        return ("term",) if u in term else ("not", ("term",))
    prev = history[r - 1]
    su = {(l, prev[x]) for l, x in succ[u]}
    sv = {(l, prev[x]) for l, x in succ[v]}
    missing = su - sv
    if missing:
        l, blk = min(missing)
        u1 = next(x for lab, x in succ[u] if lab == l and prev[x] == blk)
        conj = []
        for lab, y in succ[v]:
            if lab == l:
                g = _witness(history, succ, term, u1, y)
                if g not in conj:
                    conj.append(g)
        return ("dia", l, ("and", conj))
    return ("not", _witness(history, succ, term, v, u))


def step_bisim(l1: StepLTS, l2: StepLTS) -> Verdict:
    n, edges, term, r1, r2 = union(l1, l2)
    history = strong_partition(n, edges, term)
    final = history[-1]
    if final[r1] == final[r2]:
        return Verdict(True, info={"blocks": len(set(final))})
    succ = [[] for _ in range(n)]
    for a, lab, b in edges:
        succ[a].append((lab, b))
    f = _witness(history, succ, term, r1, r2)
    return Verdict(False, f)


def minimize(lts: StepLTS) -> StepLTS:
    """Quotient by strong step bisimilarity."""
    final = strong_partition(lts.n, lts.trans, lts.terminating)[-1]
    k = len(set(final))
    trans = sorted({(final[a], lab, final[b]) for a, lab, b in lts.trans})
    names = [None] * k
    for u in range(lts.n):
        if names[final[u]] is None:
            names[final[u]] = lts.state_name(u)
    return StepLTS(list(range(k)), trans, final[lts.initial],
                   {final[u] for u in lts.terminating}, names=names)


# --------------------------------------------------------- weak variants


def _silent(lab) -> bool:
    return all(a == "tau" for a in lab)


def _visible(lab):
    v = tuple(a for a in lab if a != "tau")
    return v if v else ("tau",)


def _strip(edges):
    return [(a, _visible(l), b) for a, l, b in edges]


def branching_partition(n, edges, term):
    """Greatest branching step bisimulation by signature refinement."""
    edges = _strip(edges)
    succ = [[] for _ in range(n)]
    for a, lab, b in edges:
        succ[a].append((lab, b))
    # termination enters through the signatures: a state may reach a
    # terminating state silently, so an initial split would be too fine
    block = [0] * n
    while True:
        sigs = [None] * n
        # inert closure: silent edges inside the current block
        for u in range(n):
            seen = {u}
            stack = [u]
            sig = set()
            while stack:
                x = stack.pop()
                if x in term:
                    sig.add(("✓",))
                for lab, y in succ[x]:
                    if lab == ("tau",) and block[y] == block[u]:
                        if y not in seen:
                            seen.add(y)
                            stack.append(y)
                    else:
                        sig.add((lab, block[y]))
            sigs[u] = (block[u], frozenset(sig))
        nxt = _renum(sigs)
        if len(set(nxt)) == len(set(block)):
            return nxt
        block = nxt


def _renum(xs):
    seen = {}
    return [seen.setdefault(x, len(seen)) for x in xs]


def branching_bisim(l1: StepLTS, l2: StepLTS) -> Verdict:
    n, edges, term, r1, r2 = union(l1, l2)
    part = branching_partition(n, edges, term)
    return Verdict(part[r1] == part[r2])


def rooted_branching_step_bisim(l1: StepLTS, l2: StepLTS) -> Verdict:
    n, edges, term, r1, r2 = union(l1, l2)
    part = branching_partition(n, edges, term)
    succ = [[] for _ in range(n)]
    for a, lab, b in _strip(edges):
        succ[a].append((lab, b))
    if (r1 in term) != (r2 in term):
        return Verdict(False, "root termination differs")
    m1 = {(lab, part[b]) for lab, b in succ[r1]}
    m2 = {(lab, part[b]) for lab, b in succ[r2]}
    if m1 != m2:
        diff = sorted(m1 ^ m2)[0]
        side = "left" if diff in m1 else "right"
        return Verdict(False, f"initial step {render_label(diff[0])} of the {side} side is unmatched")
    return Verdict(True)


def saturate(lts: StepLTS) -> StepLTS:
    """Weak step relation: steps padded with silent moves on both sides."""
    n = lts.n
    succ = lts.succ()
    clos = []
    for u in range(n):
        seen = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            for lab, y in succ[x]:
                if _silent(lab) and y not in seen:
                    seen.add(y)
                    stack.append(y)
        clos.append(seen)
    trans = set()
    for u in range(n):
        for x in clos[u]:
            trans.add((u, ("tau",), x))
            for lab, y in succ[x]:
                if not _silent(lab):
                    for z in clos[y]:
                        trans.add((u, _visible(lab), z))
    term = {u for u in range(n) if clos[u] & set(lts.terminating)}
    return StepLTS(list(lts.states), sorted(trans), lts.initial, term)


def weak_step_bisim(l1: StepLTS, l2: StepLTS) -> Verdict:
    return step_bisim(saturate(l1), saturate(l2))


# ------------------------------------------------------ brute-force oracle


def brute_force_bisim(l1: StepLTS, l2: StepLTS, kind: str = "step", bound: int = 6) -> Verdict:
    """Greatest fixpoint by pruning the full relation on the product."""
    if l1.n > bound or l2.n > bound:
        raise ValueError(f"brute force is limited to {bound} states")
    n, edges, term, r1, r2 = union(l1, l2)
    if kind in ("branching", "rbstep"):
        edges = _strip(edges)
    succ = [[] for _ in range(n)]
    for a, lab, b in edges:
        succ[a].append((lab, b))
    if kind == "weak":
        sat1, sat2 = saturate(l1), saturate(l2)
        return brute_force_bisim(sat1, sat2, "step", bound)
    rel = {(p, q) for p in range(n) for q in range(n)}

    def silent_reach(q):
        seen = {q}
        stack = [q]
        while stack:
            x = stack.pop()
            for lab, y in succ[x]:
                if lab == ("tau",) and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    reach = [silent_reach(q) for q in range(n)]

    def ok_step(p, q):
        if (p in term) != (q in term):
            return False
        for lab, p1 in succ[p]:
            if not any(l == lab and (p1, q1) in rel for l, q1 in succ[q]):
                return False
        return True

    def ok_branching(p, q):
        if p in term and not any((p, q2) in rel and q2 in term for q2 in reach[q]):
            return False
        for lab, p1 in succ[p]:
            if lab == ("tau",) and (p1, q) in rel:
                continue
            found = False
            for q2 in reach[q]:
                if (p, q2) not in rel:
                    continue
                if any(l == lab and (p1, q1) in rel for l, q1 in succ[q2]):
                    found = True
                    break
            if not found:
                return False
        return True

    check = ok_step if kind == "step" else ok_branching
    changed = True
    while changed:
        changed = False
        for p, q in sorted(rel):
            if (p, q) in rel and not (check(p, q) and check(q, p)):
                rel.discard((p, q))
                rel.discard((q, p))
                changed = True
    if kind != "rbstep":
        return Verdict((r1, r2) in rel)
    if (r1 in term) != (r2 in term):
        return Verdict(False)
    for a, b in ((r1, r2), (r2, r1)):
        for lab, p1 in succ[a]:
            if not any(l == lab and (p1, q1) in rel for l, q1 in succ[b]):
                return Verdict(False)
    return Verdict(True)


RELATIONS = {
    "step": step_bisim,
    "bstep": branching_bisim,
    "rbstep": rooted_branching_step_bisim,
    "wstep": weak_step_bisim,
}


# ------------------------------------------------------ labelled posets


def poset_code(events, labels, before) -> tuple:
    """Canonical code of a labelled poset, invariant under isomorphism.

    Events are first ordered by an iterated invariant (label, predecessor and
    successor invariants); ties are broken by trying every ordering of each
    tie class and keeping the least adjacency code.
    """
    events = list(events)
    if not events:
        return ()
    inv = {e: (labels[e],) for e in events}
    for _ in range(len(events)):
        new = {}
        for e in events:
            pre = sorted(inv[x] for x in events if before(x, e))
            post = sorted(inv[x] for x in events if before(e, x))
            new[e] = (labels[e], tuple(pre), tuple(post))
        ranks = {v: i for i, v in enumerate(sorted(set(new.values())))}
        new = {e: (labels[e], ranks[new[e]]) for e in events}
        if len(set(new.values())) == len(set(inv.values())):
            inv = new
            break
        inv = new
    groups = {}
    for e in events:
        groups.setdefault(inv[e], []).append(e)
    keys = sorted(groups)
    best = None
    for combo in itertools.product(*(itertools.permutations(groups[k]) for k in keys)):
        order = [e for part in combo for e in part]
        pos = {e: i for i, e in enumerate(order)}
        code = (tuple(labels[e] for e in order),
                tuple(sorted((pos[x], pos[y]) for x in order for y in order if before(x, y))))
        if best is None or code < best:
            best = code
    return best


# --------------------------------------------------------- PES relations


def _cfg_data(pes, max_events):
    if len(pes.events) > max_events:
        raise ValueError(f"PES exceeds the event bound of {max_events}")
    return pes.configurations()


def pomset_transitions(pes, configs=None, steps_only=False):
    """Map each configuration to its list of (code, target) pomset moves."""
    configs = configs if configs is not None else pes.configurations()
    cset = set(configs)
    out = {}
    for c in configs:
        moves = []
        for d in configs:
            if len(d) > len(c) and c < d:
                x = d - c
                if steps_only and any(pes.before(a, b) for a in x for b in x):
                    continue
                code = poset_code(x, pes.label, pes.before)
                moves.append((code, d))
        out[c] = moves
    return out


def pomset_bisim(e1, e2, max_events: int = 12, steps_only: bool = False) -> Verdict:
    t1 = pomset_transitions(e1, _cfg_data(e1, max_events), steps_only)
    t2 = pomset_transitions(e2, _cfg_data(e2, max_events), steps_only)
    rel = {(c, d) for c in t1 for d in t2 if e1.is_terminal(c) == e2.is_terminal(d)}
    changed = True
    while changed:
        changed = False
        for c, d in list(rel):
            ok = all(any(k2 == k1 and (c1, d1) in rel for k2, d1 in t2[d]) for k1, c1 in t1[c]) and \
                all(any(k1 == k2 and (c1, d1) in rel for k1, c1 in t1[c]) for k2, d1 in t2[d])
            if not ok:
                rel.discard((c, d))
                changed = True
    empty = frozenset()
    return Verdict((empty, empty) in rel)


def pes_step_bisim(e1, e2, max_events: int = 12) -> Verdict:
    return pomset_bisim(e1, e2, max_events, steps_only=True)


def _extensions(pes, c):
    return [e for e in pes.enabled(c)]


def _triples_from_empty(e1, e2):
    """Posetal triples reachable by matched single-event extensions."""
    start = (frozenset(), frozenset(), frozenset())
    seen = {start}
    stack = [start]
    while stack:
        c1, f, c2 = stack.pop()
        fmap = dict(f)
        for x in _extensions(e1, c1):
            for y in _extensions(e2, c2):
                if e1.label[x] != e2.label[y]:
                    continue
                if all(e1.before(z, x) == e2.before(fmap[z], y) for z in c1):
                    t = (c1 | {x}, f | {(x, y)}, c2 | {y})
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
    return seen


def _hp_gfp(e1, e2, rel, hereditary):
    moves = {}
    for t in rel:
        c1, f, c2 = t
        fmap = dict(f)
        fw, bw = [], []
        for x in _extensions(e1, c1):
            opts = []
            for y in _extensions(e2, c2):
                if e1.label[x] == e2.label[y] and all(e1.before(z, x) == e2.before(fmap[z], y) for z in c1):
                    opts.append((c1 | {x}, f | {(x, y)}, c2 | {y}))
            fw.append(opts)
        for y in _extensions(e2, c2):
            opts = []
            for x in _extensions(e1, c1):
                if e1.label[x] == e2.label[y] and all(e1.before(z, x) == e2.before(fmap[z], y) for z in c1):
                    opts.append((c1 | {x}, f | {(x, y)}, c2 | {y}))
            bw.append(opts)
        down = []
        if hereditary:
            for x, y in f:
                if not any(e1.before(x, z) for z in c1 if z != x):
                    down.append((c1 - {x}, f - {(x, y)}, c2 - {y}))
        moves[t] = (fw, bw, down)
    rel = {t for t in rel if e1.is_terminal(t[0]) == e2.is_terminal(t[2])}
    changed = True
    while changed:
        changed = False
        for t in list(rel):
            fw, bw, down = moves[t]
            if any(not any(o in rel for o in opts) for opts in fw) or \
                    any(not any(o in rel for o in opts) for opts in bw) or \
                    any(d not in rel for d in down):
                rel.discard(t)
                changed = True
    return rel


def hp_bisim(e1, e2, max_events: int = 12) -> Verdict:
    _cfg_data(e1, max_events)
    _cfg_data(e2, max_events)
    rel = _hp_gfp(e1, e2, _triples_from_empty(e1, e2), False)
    return Verdict((frozenset(), frozenset(), frozenset()) in rel)


def hhp_bisim(e1, e2, max_events: int = 8) -> Verdict:
    _cfg_data(e1, max_events)
    _cfg_data(e2, max_events)
    rel = _hp_gfp(e1, e2, _triples_from_empty(e1, e2), True)
    return Verdict((frozenset(), frozenset(), frozenset()) in rel)


def all_posetal_triples(e1, e2):
    """Every (C1, f, C2) with f a label- and order-preserving bijection."""
    out = set()
    c2s = e2.configurations()
    for c1 in e1.configurations():
        xs = sorted(c1, key=str)
        for c2 in c2s:
            if len(c2) != len(c1):
                continue
            for perm in itertools.permutations(sorted(c2, key=str)):
                if any(e1.label[x] != e2.label[y] for x, y in zip(xs, perm)):
                    continue
                m = dict(zip(xs, perm))
                if all(e1.before(a, b) == e2.before(m[a], m[b]) for a in xs for b in xs):
                    out.add((c1, frozenset(m.items()), c2))
    return out


def brute_force_hhp(e1, e2, max_events: int = 5) -> Verdict:
    if len(e1.events) > max_events or len(e2.events) > max_events:
        raise ValueError("oracle bound exceeded")
    rel = _hp_gfp(e1, e2, all_posetal_triples(e1, e2), True)
    return Verdict((frozenset(), frozenset(), frozenset()) in rel)


PES_RELATIONS = {
    "step": pes_step_bisim,
    "pomset": pomset_bisim,
    "hp": hp_bisim,
    "hhp": hhp_bisim,
}
