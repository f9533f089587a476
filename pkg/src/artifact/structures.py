"""Prime event structures and Petri nets: composition, shapes, structurization."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .syntax import (
    ONE, ZERO, Abstr, Act, Alt, Atom, Comm, Conc, Encap, GPar, Guard, LeftMerge, One,
    Par, Seq, Signature, Silent, Term, Zero, alt, render_term, EMPTY_SIG,
)


class StructureError(ValueError):
    pass


class Unsupported(StructureError):
    pass


def _closure(events, pairs):
    succ = {e: set() for e in events}
    for a, b in pairs:
        succ[a].add(b)
    lt = set()
    for e in events:
        stack = list(succ[e])
        seen = set()
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(succ[x])
        for x in seen:
            lt.add((e, x))
    return lt


@dataclass(frozen=True)
class PES:
    """Events with labels, strict causality (transitively closed) and conflict.

    ``blocked`` events never occur; they model deadlock (the denotation of 0)
    and prevent termination wherever they are enabled.
    """

    events: tuple
    label: dict = field(hash=False, compare=False)
    lt: frozenset = frozenset()
    conflict: frozenset = frozenset()
    blocked: frozenset = frozenset()

    @classmethod
    def make(cls, events, causality=(), conflict=(), blocked=()) -> "PES":
        labels = {}
        order = []
        for e in events:
            i, l = (e["id"], e["label"]) if isinstance(e, dict) else e
            if i in labels:
                raise StructureError(f"duplicate event {i}")
            labels[i] = l
            order.append(i)
        for a, b in list(causality) + [tuple(p) for p in conflict]:
            if a not in labels or b not in labels:
                raise StructureError(f"unknown event in pair ({a}, {b})")
        lt = _closure(order, causality)
        if any(a == b for a, b in lt):
            raise StructureError("causality has a cycle")
        cf = set()
        for p in conflict:
            a, b = tuple(p)
            if a == b:
                raise StructureError("conflict must be irreflexive")
            cf.add(frozenset((a, b)))
        # hereditary closure
        cf2 = set()
        down = {e: {e} | {x for x, y in lt if y == e} for e in order}
        for e1 in order:
            for e2 in order:
                if e1 != e2 and any(frozenset((x, y)) in cf for x in down[e1] for y in down[e2]):
                    cf2.add(frozenset((e1, e2)))
        for p in cf2:
            a, b = tuple(p)
            if (a, b) in lt or (b, a) in lt:
                raise StructureError(f"events {a} and {b} are both causal and in conflict")
        return cls(tuple(order), labels, frozenset(lt), frozenset(cf2), frozenset(blocked))

    # relations -------------------------------------------------------
    def before(self, a, b) -> bool:
        return (a, b) in self.lt

    def conflicts(self, a, b) -> bool:
        return frozenset((a, b)) in self.conflict

    def concurrent(self, a, b) -> bool:
        return a != b and not self.before(a, b) and not self.before(b, a) and not self.conflicts(a, b)

    def preds(self, e) -> set:
        return {x for x in self.events if (x, e) in self.lt}

    def causality_pairs(self) -> list:
        """Transitive reduction of the causal order."""
        out = []
        for a, b in sorted(self.lt, key=str):
            if not any((a, c) in self.lt and (c, b) in self.lt for c in self.events):
                out.append((a, b))
        return out

    @property
    def live(self) -> list:
        return [e for e in self.events if e not in self.blocked]

    # configurations --------------------------------------------------
    def _enabled_any(self, c, pool):
        out = []
        for e in pool:
            if e in c:
                continue
            if all(x in c for x in self.events if (x, e) in self.lt) and \
                    not any(self.conflicts(e, x) for x in c):
                out.append(e)
        return out

    def enabled(self, c) -> list:
        return self._enabled_any(c, self.live)

    def is_terminal(self, c) -> bool:
        """True when nothing, not even a blocked event, is enabled."""
        return not self._enabled_any(c, self.events)

    def configurations(self) -> list:
        start = frozenset()
        seen = {start}
        order = [start]
        i = 0
        while i < len(order):
            c = order[i]
            i += 1
            for e in self.enabled(c):
                d = c | {e}
                if d not in seen:
                    seen.add(d)
                    order.append(d)
        return sorted(order, key=lambda c: (len(c), sorted(map(str, c))))

    # serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        d = {
            "events": [{"id": e, "label": self.label[e]} for e in self.events],
            "causality": [list(p) for p in self.causality_pairs()],
            "conflict": sorted(sorted(p, key=str) for p in self._minimal_conflicts()),
        }
        if self.blocked:
            d["blocked"] = sorted(self.blocked, key=str)
        return d

    def _minimal_conflicts(self):
        out = []
        for p in self.conflict:
            a, b = tuple(p)
            if not any(self.conflicts(x, b) for x in self.preds(a)) and \
                    not any(self.conflicts(a, y) for y in self.preds(b)):
                out.append(p)
        return out

    @classmethod
    def from_dict(cls, d) -> "PES":
        return cls.make(d["events"], [tuple(p) for p in d.get("causality", ())],
                        [tuple(p) for p in d.get("conflict", ())], d.get("blocked", ()))

    @classmethod
    def load(cls, path) -> "PES":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def renamed(self, prefix) -> "PES":
        m = {e: f"{prefix}{e}" for e in self.events}
        return self.mapped(m)

    def mapped(self, m) -> "PES":
        return PES(tuple(m[e] for e in self.events), {m[e]: self.label[e] for e in self.events},
                   frozenset((m[a], m[b]) for a, b in self.lt),
                   frozenset(frozenset(m[x] for x in p) for p in self.conflict),
                   frozenset(m[e] for e in self.blocked))

    def restrict(self, keep) -> "PES":
        keep = set(keep)
        return PES(tuple(e for e in self.events if e in keep), {e: self.label[e] for e in keep},
                   frozenset((a, b) for a, b in self.lt if a in keep and b in keep),
                   frozenset(p for p in self.conflict if p <= keep),
                   frozenset(e for e in self.blocked if e in keep))

    def __repr__(self):
        ev = ", ".join(f"{e}:{self.label[e]}" for e in self.events)
        return f"PES([{ev}], <={self.causality_pairs()}, #={sorted(map(sorted, self._minimal_conflicts()))})"


def single(label, eid="e0") -> PES:
    return PES.make([(eid, label)])


EMPTY_PES = PES((), {})


def deadlock_pes() -> PES:
    return PES(("d0",), {"d0": "δ"}, frozenset(), frozenset(), frozenset({"d0"}))


# ----------------------------------------------------------- composition


def _disjoint(e1: PES, e2: PES):
    return e1.renamed("l"), e2.renamed("r")


def _rebuild(events, labels, lt, conflict, blocked) -> PES:
    pes = PES.make([(e, labels[e]) for e in events], list(lt), list(conflict), blocked)
    return _compact(pes)


def _compact(pes: PES) -> PES:
    m = {e: f"e{i}" for i, e in enumerate(pes.events)}
    return pes.mapped(m)


def pes_compose(e1: PES, e2: PES, mode: str, extra_causality=(), extra_conflict=()) -> PES:
    """Compose two PESs; ids are renamed apart (left events first)."""
    a, b = _disjoint(e1, e2)
    ev = a.events + b.events
    labels = {**a.label, **b.label}
    lt = set(a.lt) | set(b.lt)
    cf = [tuple(p) for p in a.conflict | b.conflict]
    blocked = set(a.blocked) | set(b.blocked)
    ea, eb = set(a.events), set(b.events)
    if mode == "seq":
        lt |= {(x, y) for x in a.events for y in b.events}
    elif mode == "choice":
        cf += [(x, y) for x in a.events for y in b.events]
    elif mode == "par":
        pass
    elif mode == "conc":
        for pairs, rel in ((extra_causality, "causality"), (extra_conflict, "conflict")):
            for x, y in pairs:
                lx, ly = f"l{x}", f"r{y}"
                if lx not in ea or ly not in eb:
                    raise StructureError(f"extra {rel} pair ({x}, {y}) must go from the left to the right operand")
                if rel == "causality":
                    lt.add((lx, ly))
                else:
                    cf.append((lx, ly))
    else:
        raise StructureError(f"unknown mode {mode}")
    return _rebuild(ev, labels, lt, cf, blocked)


# ------------------------------------------------------------ denotation


def _terminal_configs(pes: PES):
    return [c for c in pes.configurations() if pes.is_terminal(c)]


def _seq(a: PES, b: PES) -> PES:
    """Sequential composition; b is copied once per terminal configuration of a.

    One copy per terminal configuration keeps every event's history unique
    when a contains choices.
    """
    if not b.events:
        return a
    terms = _terminal_configs(a)
    a1 = a.renamed("l")
    ev = list(a1.events)
    labels = dict(a1.label)
    lt = set(a1.lt)
    cf = [tuple(p) for p in a1.conflict]
    blocked = set(a1.blocked)
    for i, c in enumerate(terms):
        bi = b.renamed(f"r{i}_")
        ev += bi.events
        labels.update(bi.label)
        lt |= set(bi.lt)
        cf += [tuple(p) for p in bi.conflict]
        blocked |= set(bi.blocked)
        lt |= {(f"l{x}", y) for x in c for y in bi.events}
    return _rebuild(ev, labels, lt, cf, blocked)


def _choice(a: PES, b: PES) -> PES:
    if not a.events and not b.events:
        return a
    if not a.events or not b.events:
        raise Unsupported("1 + x has no prime event structure denotation")
    if set(a.events) == set(a.blocked) and not a.lt:
        return b
    if set(b.events) == set(b.blocked) and not b.lt:
        return a
    return pes_compose(a, b, "choice")


def _heads(t: Term, sig: Signature):
    """Head decomposition of a sum of action-prefixed terms: [(action, rest)].

    ``rest`` is None for a bare action.
    """
    out = []
    from .sos import lite
    for s in _summands(lite(t)):
        if isinstance(s, (Act, Silent)):
            out.append((s, None))
        elif isinstance(s, Seq) and isinstance(s.left, (Act, Silent)):
            out.append((s.left, s.right))
        elif isinstance(s, Zero):
            continue
        else:
            raise Unsupported(f"communication needs action-prefixed summands, got {render_term(s)}")
    return out


def _summands(t):
    if isinstance(t, Alt):
        return _summands(t.left) + _summands(t.right)
    return [t]


def _comm_term(x: Term, y: Term, sig: Signature) -> Term:
    parts = []
    for a, xr in _heads(x, sig):
        for b, yr in _heads(y, sig):
            if isinstance(a, Silent) or isinstance(b, Silent):
                continue
            g = sig.comm(a.name, b.name)
            if g is None:
                continue
            if xr is None and yr is None:
                parts.append(Act(g))
            elif xr is None:
                parts.append(Seq(Act(g), yr))
            elif yr is None:
                parts.append(Seq(Act(g), xr))
            else:
                parts.append(Seq(Act(g), Conc(xr, yr)))
    return alt(*parts)


def term_to_pes(t: Term, sig: Signature | None = None) -> PES:
    sig = sig or EMPTY_SIG
    if isinstance(t, Zero):
        return deadlock_pes()
    if isinstance(t, One):
        return EMPTY_PES
    if isinstance(t, Act):
        return single(t.name)
    if isinstance(t, Silent):
        return single("tau")
    if isinstance(t, Seq):
        return _seq(term_to_pes(t.left, sig), term_to_pes(t.right, sig))
    if isinstance(t, Alt):
        return _choice(term_to_pes(t.left, sig), term_to_pes(t.right, sig))
    if isinstance(t, Par):
        a, b = term_to_pes(t.left, sig), term_to_pes(t.right, sig)
        return pes_compose(a, b, "par")
    if isinstance(t, Comm):
        c = _comm_term(t.left, t.right, sig)
        return term_to_pes(c, sig) if not isinstance(c, Zero) else deadlock_pes()
    if isinstance(t, Conc):
        par = term_to_pes(Par(t.left, t.right), sig)
        c = _comm_term(t.left, t.right, sig)
        if isinstance(c, Zero):
            return par
        return _choice(par, term_to_pes(c, sig))
    if isinstance(t, Encap):
        body = term_to_pes(t.body, sig)
        hit = {e for e in body.events if body.label[e] in t.hset}
        above = {e for e in body.events for h in hit if body.before(h, e)}
        keep = [e for e in body.events if e not in above]
        r = body.restrict(keep)
        return PES(r.events, r.label, r.lt, r.conflict, r.blocked | (hit & set(keep)))
    if isinstance(t, Abstr):
        body = term_to_pes(t.body, sig)
        lab = {e: ("tau" if l in t.iset else l) for e, l in body.label.items()}
        return PES(body.events, lab, body.lt, body.conflict, body.blocked)
    raise Unsupported(f"no event structure denotation for {type(t).__name__}")


def pes_to_lts(pes: PES, steps_only: bool = True):
    """Configuration graph as a step LTS (edges = steps of concurrent events)."""
    from .sos import StepLTS
    confs = pes.configurations()
    idx = {c: i for i, c in enumerate(confs)}
    trans = set()
    for c in confs:
        for d in confs:
            if c < d:
                x = d - c
                if steps_only and any(pes.before(a, b) for a in x for b in x):
                    continue
                trans.add((idx[c], tuple(sorted(pes.label[e] for e in x)), idx[d]))
    term = {idx[c] for c in confs if pes.is_terminal(c)}
    lts = StepLTS(confs, sorted(trans), 0, term)
    lts.names = ["{" + ",".join(sorted(map(str, c))) + "}" for c in confs]
    return lts


def configurations(pes: PES):
    """Configuration graph: (configurations, pomset edges (C, X, C'))."""
    confs = pes.configurations()
    edges = [(c, d - c, d) for c in confs for d in confs if c < d]
    return confs, edges


# --------------------------------------------------------------- shapes


@dataclass
class ShapeReport:
    n_shapes: list
    v_shapes: list
    h_shapes: list

    @property
    def structured(self) -> bool:
        return not (self.n_shapes or self.v_shapes or self.h_shapes)

    def lines(self, pes: PES | None = None) -> list:
        def show(w):
            return "(" + ", ".join(f"{e}:{pes.label[e]}" if pes else str(e) for e in w) + ")"
        out = [f"N-shape {show(w)}" for w in self.n_shapes]
        out += [f"V-shape {show(w)}" for w in self.v_shapes]
        out += [f"H-shape {show(w)}" for w in self.h_shapes]
        return out or ["structured"]


def branches(pes: PES) -> list:
    """Connected components of the causal order (the parallel branches)."""
    parent = {e: e for e in pes.events}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pes.lt:
        parent[find(a)] = find(b)
    comps = {}
    for e in pes.events:
        comps.setdefault(find(e), []).append(e)
    return sorted(comps.values(), key=lambda c: pes.events.index(c[0]))


def _n_shapes(pes: PES) -> list:
    out = []
    ev = pes.live
    for a, b, c, d in itertools.permutations(ev, 4):
        if not (pes.before(a, b) and pes.before(a, d) and pes.before(c, d)):
            continue
        if pes.before(c, b) or pes.before(b, c) or pes.before(a, c) or pes.before(c, a):
            continue
        if pes.before(b, d) or pes.before(d, b):
            continue
        four = (a, b, c, d)
        if any(pes.conflicts(x, y) for x in four for y in four):
            continue
        out.append(four)
    return out


def _minimal_conflicts(pes: PES):
    return sorted((tuple(sorted(p, key=pes.events.index)) for p in pes._minimal_conflicts()),
                  key=lambda p: (pes.events.index(p[0]), pes.events.index(p[1])))


def detect_shapes(pes: PES) -> ShapeReport:
    comp = {}
    for i, br in enumerate(branches(pes)):
        for e in br:
            comp[e] = i
    n = _n_shapes(pes)
    v, h = [], []
    for x, y in _minimal_conflicts(pes):
        if comp[x] == comp[y]:
            continue
        px, py = pes.preds(x), pes.preds(y)
        if px and py:
            h.append((x, y))
        elif px or py:
            b, c = (x, y) if px else (y, x)
            for a in sorted(pes.preds(b), key=pes.events.index):
                if pes.concurrent(a, c):
                    v.append((a, b, c))
                    break
    return ShapeReport(n, v, h)


# -------------------------------------------------------- structurization


def merge_communications(pes: PES, sig: Signature):
    """Merge the middle edge of every N-shape into one communication event."""
    cur = pes
    merged = []
    while True:
        found = _n_shapes(cur)
        if not found:
            return cur, merged
        a, b, c, d = found[0]
        g = sig.comm(cur.label[a], cur.label[d])
        if g is None:
            raise StructureError(
                f"N-shape ({a}:{cur.label[a]}, {b}:{cur.label[b]}, {c}:{cur.label[c]}, {d}:{cur.label[d]}) "
                f"cannot be structurized: gamma({cur.label[a]}, {cur.label[d]}) is undefined")
        m = f"{a}+{d}"
        merged.append((a, d, g))
        ev = [e for e in cur.events if e not in (a, d)] + [m]
        labels = {e: cur.label[e] for e in ev if e != m}
        labels[m] = g
        ren = lambda e: m if e in (a, d) else e
        lt = {(ren(x), ren(y)) for x, y in cur.lt if ren(x) != ren(y)}
        cf = {(ren(x), ren(y)) for x, y in (tuple(p) for p in cur.conflict) if ren(x) != ren(y)}
        cur = PES.make([(e, labels[e]) for e in ev], lt, cf,
                       [ren(e) for e in cur.blocked])


def _components(nodes, adj):
    nodes = list(nodes)
    seen = set()
    out = []
    for n in nodes:
        if n in seen:
            continue
        comp = []
        stack = [n]
        seen.add(n)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in nodes:
                if y not in seen and adj(x, y):
                    seen.add(y)
                    stack.append(y)
        out.append(sorted(comp, key=nodes.index))
    return out


def _struct(pes: PES, leaf) -> Term:
    ev = list(pes.events)
    if pes.blocked:
        raise StructureError("structurization works on deadlock-free structures")
    if not ev:
        return ONE
    if len(ev) == 1:
        return leaf(ev[0])
    # choice: groups that are pairwise in conflict
    comps = _components(ev, lambda x, y: not pes.conflicts(x, y))
    if len(comps) > 1:
        return alt(*(_struct(pes.restrict(c), leaf) for c in comps))
    # sequence: the smallest prefix wholly below the rest
    npred = {e: len(pes.preds(e)) for e in ev}
    by = sorted(ev, key=lambda e: (npred[e], ev.index(e)))
    for k in range(1, len(by)):
        if npred[by[k]] == npred[by[k - 1]]:
            continue
        A, B = by[:k], by[k:]
        if all(pes.before(x, y) for x in A for y in B):
            return Seq(_struct(pes.restrict(A), leaf), _struct(pes.restrict(B), leaf))
    # parallel: components of comparability and conflict
    comps = _components(ev, lambda x, y: pes.before(x, y) or pes.before(y, x) or pes.conflicts(x, y))
    if len(comps) > 1:
        out = _struct(pes.restrict(comps[-1]), leaf)
        for c in reversed(comps[:-1]):
            out = Par(_struct(pes.restrict(c), leaf), out)
        return out
    # conflict elimination across branches
    comp = {}
    for i, br in enumerate(branches(pes)):
        for e in br:
            comp[e] = i
    for x, y in _minimal_conflicts(pes):
        if comp[x] != comp[y]:
            up_y = {y} | {e for e in ev if pes.before(y, e)}
            up_x = {x} | {e for e in ev if pes.before(x, e)}
            keep_x = [e for e in ev if e not in up_y]
            keep_y = [e for e in ev if e not in up_x]
            return Alt(_struct(pes.restrict(keep_x), leaf), _struct(pes.restrict(keep_y), leaf))
    raise StructureError("structure cannot be decomposed (unresolved shape)")


def structurize_pes(pes: PES, sig: Signature | None = None) -> Term:
    sig = sig or EMPTY_SIG
    merged, _ = merge_communications(pes, sig)
    return _struct(merged, lambda e: Act(merged.label[e]) if merged.label[e] != "tau" else Silent())


# ------------------------------------------------------------ Petri nets


@dataclass(frozen=True)
class PetriNet:
    places: tuple
    transitions: tuple  # (id, label)
    flow: frozenset
    initial: frozenset
    ending: frozenset

    @classmethod
    def make(cls, places, transitions, flow, initial=None, ending=None) -> "PetriNet":
        places = tuple(places)
        trans = tuple((t["id"], t["label"]) if isinstance(t, dict) else tuple(t) for t in transitions)
        tids = {t for t, _ in trans}
        if set(places) & tids:
            raise StructureError("places and transitions must be disjoint")
        flow = frozenset(tuple(f) for f in flow)
        if not flow:
            raise StructureError("flow relation is empty")
        for x, y in flow:
            ok = (x in places and y in tids) or (x in tids and y in places)
            if not ok:
                raise StructureError(f"flow ({x}, {y}) must join a place and a transition")
        if initial is None:
            initial = [p for p in places if not any(y == p for _, y in flow)]
        if ending is None:
            ending = [t for t in tids if not any(x == t for x, _ in flow)]
        return cls(places, trans, flow, frozenset(initial), frozenset(ending))

    @property
    def label(self):
        return dict(self.transitions)

    def pre(self, t):
        return {x for x, y in self.flow if y == t}

    def post(self, t):
        return {y for x, y in self.flow if x == t}

    @classmethod
    def from_dict(cls, d) -> "PetriNet":
        return cls.make(d["places"], d["transitions"], d["flow"], d.get("initial"), d.get("ending"))

    @classmethod
    def load(cls, path) -> "PetriNet":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        return {"places": list(self.places),
                "transitions": [{"id": t, "label": l} for t, l in self.transitions],
                "flow": sorted(list(f) for f in self.flow),
                "initial": sorted(self.initial), "ending": sorted(self.ending)}

    def renamed(self, prefix) -> "PetriNet":
        m = lambda x: f"{prefix}{x}"
        return PetriNet(tuple(m(p) for p in self.places), tuple((m(t), l) for t, l in self.transitions),
                        frozenset((m(x), m(y)) for x, y in self.flow),
                        frozenset(m(p) for p in self.initial), frozenset(m(t) for t in self.ending))


def pn_compose(n1: PetriNet, n2: PetriNet, mode: str, extra=()) -> PetriNet:
    a, b = n1.renamed("l"), n2.renamed("r")
    places = a.places + b.places
    trans = a.transitions + b.transitions
    flow = set(a.flow) | set(b.flow)
    initial = set(a.initial) | set(b.initial)
    ending = set(a.ending) | set(b.ending)
    if mode == "seq":
        flow |= {(t, p) for t in a.ending for p in b.initial}
        initial = set(a.initial)
        ending = set(b.ending)
    elif mode in ("choice", "par"):
        pass
    elif mode == "conc":
        known = set(places) | {t for t, _ in trans}
        for x, y in extra:
            for cand in ((f"l{x}", f"r{y}"), (f"r{x}", f"l{y}")):
                if cand[0] in known and cand[1] in known:
                    flow.add(cand)
                    break
            else:
                raise StructureError(f"extra flow ({x}, {y}) references unknown nodes")
    else:
        raise StructureError(f"unknown mode {mode}")
    return PetriNet.make(places, trans, flow, initial, ending)


def _merge_joins(net: PetriNet, sig: Signature):
    """Transitions sharing an output place become one communication transition."""
    trans = {t: l for t, l in net.transitions}
    pre = {t: net.pre(t) for t in trans}
    post = {t: net.post(t) for t in trans}
    changed = True
    while changed:
        changed = False
        for p in net.places:
            ins = sorted(t for t in trans if p in post[t])
            if len(ins) >= 2:
                a, b = ins[0], ins[1]
                g = sig.comm(trans[a], trans[b])
                if g is None:
                    raise StructureError(f"place {p} joins {trans[a]} and {trans[b]} but gamma is undefined")
                m = f"{a}+{b}"
                trans[m] = g
                pre[m] = pre[a] | pre[b]
                post[m] = post[a] | post[b]
                for t in (a, b):
                    del trans[t], pre[t], post[t]
                changed = True
                break
    return trans, pre, post


def structurize_pn(net: PetriNet, sig: Signature | None = None) -> Term:
    """Places become guard atoms, transitions become actions.

    A transition with several input places is guarded by their parallel
    composition; transitions feeding one place are merged by gamma.
    """
    sig = sig or EMPTY_SIG
    trans, pre, post = _merge_joins(net, sig)
    order = sorted(trans)
    causal = [(t1, t2) for t1 in order for t2 in order if t1 != t2 and post[t1] & pre[t2]]
    pes = PES.make([(t, trans[t]) for t in order], causal)

    def leaf(t):
        act = Act(trans[t])
        ins = sorted(pre[t])
        if not ins:
            return act
        g = Atom(ins[-1])
        for p in reversed(ins[:-1]):
            g = GPar(Atom(p), g)
        return Seq(Guard(g), act)

    return _struct(pes, leaf)


def marking_env(net: PetriNet, sig: Signature | None = None):
    """Data environment whose states are 1-safe markings of the net."""
    from .sos import DataEnv
    trans, pre, post = _merge_joins(net, sig or EMPTY_SIG)
    start = frozenset(net.initial)
    seen = {start}
    stack = [start]
    effects = {}
    while stack:
        m = stack.pop()
        for t, l in sorted(trans.items()):
            if pre[t] <= m:
                m2 = (m - pre[t]) | post[t]
                effects.setdefault(l, {})[m] = m2
                if m2 not in seen:
                    seen.add(m2)
                    stack.append(m2)
    states = sorted(seen, key=lambda m: sorted(m))
    names = {m: "{" + ",".join(sorted(m)) + "}" for m in states}
    tests = {p: {names[m]: p in m for m in states} for p in net.places}
    eff = {l: {names[m]: names[m2] for m, m2 in table.items()} for l, table in effects.items()}
    for l in eff:
        for m in states:
            eff[l].setdefault(names[m], names[m])
    return DataEnv([names[m] for m in states], tests, eff), names[start]


def net_lts(net: PetriNet, sig: Signature | None = None):
    """Interleaving firing graph of a 1-safe net (single-transition steps)."""
    from .sos import StepLTS
    trans, pre, post = _merge_joins(net, sig or EMPTY_SIG)
    start = frozenset(net.initial)
    idx = {start: 0}
    states = [start]
    edges = set()
    i = 0
    while i < len(states):
        m = states[i]
        for t, l in sorted(trans.items()):
            if pre[t] <= m:
                m2 = (m - pre[t]) | post[t]
                if m2 not in idx:
                    idx[m2] = len(states)
                    states.append(m2)
                edges.add((idx[m], (l,), idx[m2]))
        i += 1
    succ_any = {a for a, _, _ in edges}
    term = {j for j in range(len(states)) if j not in succ_any}
    return StepLTS(states, sorted(edges), 0, term)
