"""Step semantics: one-step derivations and finite step transition systems.

Steps are multisets of action names, stored as sorted tuples.  ``TICK``
stands for successful termination (the target of a final step).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .syntax import (
    ONE, TAU, ZERO, Abstr, Act, Alt, Atom, Comm, Conc, Encap, GAlt, GOne, GPar,
    GSeq, GZero, Guard, LeftMerge, Neg, One, Par, ParStar, Proj, RecConst, RecSpec,
    Seq, Signature, Silent, Star, Term, Theta, Unless, Var, Zero, ac_canon, alt,
    render_term, substitute, summands, EMPTY_SIG,
)


class SosError(RuntimeError):
    pass


class UnguardedRecursion(SosError):
    pass


class StateBoundExceeded(SosError):
    def __init__(self, msg, frontier=()):
        super().__init__(msg)
        self.frontier = list(frontier)


class _Tick:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "√"

    __str__ = __repr__

    def __reduce__(self):
        return (_Tick, ())


TICK = _Tick()


def label(*names) -> tuple:
    return tuple(sorted(names))


def render_label(lab) -> str:
    return "{" + ",".join(lab) + "}"


# ------------------------------------------------------------- data env


@dataclass
class DataEnv:
    """Finite data states with atomic guard tests and action effects."""

    states: list
    tests: dict  # atom -> {state: bool}
    effects: dict  # action -> {state: state}

    def test(self, g, s) -> bool:
        from .guards import eval_guard
        return eval_guard(g, s, self)

    def test_atom(self, name, s) -> bool:
        try:
            return bool(self.tests[name][s])
        except KeyError:
            raise KeyError(f"unknown guard atom {name!r} at state {s!r}") from None

    def effect(self, action, s):
        if action == "tau":
            return s
        table = self.effects.get(action)
        if table is None:
            return s
        return table.get(s, s)

    @classmethod
    def from_dict(cls, d) -> "DataEnv":
        return cls(list(d["states"]), {k: dict(v) for k, v in d.get("test", {}).items()},
                   {k: dict(v) for k, v in d.get("effect", {}).items()})

    @classmethod
    def load(cls, path) -> "DataEnv":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        return {"states": list(self.states), "test": self.tests, "effect": self.effects}


# ------------------------------------------------------ normalize-lite


def lite(t):
    """Cheap simplification used for state identity."""
    if t is TICK:
        return t
    return ac_canon(_lite(t), dedupe=True)


def _lite(t):
    if isinstance(t, Alt):
        parts = [_lite(s) for s in summands(t)]
        flat = []
        for p in parts:
            flat.extend(summands(p))
        flat = [p for p in flat if not isinstance(p, Zero)]
        return alt(*flat)
    if isinstance(t, Seq):
        l, r = _lite(t.left), _lite(t.right)
        if isinstance(l, One):
            return r
        if isinstance(r, One):
            return l
        if isinstance(l, Zero):
            return ZERO
        return Seq(l, r)
    if isinstance(t, RecConst):
        return t
    kids = t.children
    if not kids:
        return t
    return t.with_children([_lite(k) for k in kids])


def _seq(x, y):
    return y if x is TICK else Seq(x, y)


def _conc(x, y):
    if x is TICK:
        return y
    if y is TICK:
        return x
    return Conc(x, y)


# ----------------------------------------------------------- semantics


class Semantics:
    """Derivation engine; ``state``/``env`` are only used by guards."""

    def __init__(self, sig: Signature | None = None, env: DataEnv | None = None):
        self.sig = sig or EMPTY_SIG
        self.env = env
        self._memo: dict = {}

    # termination -----------------------------------------------------
    def term(self, t, s=None, _seen=frozenset()) -> bool:
        if t is TICK or isinstance(t, One):
            return True
        if isinstance(t, (Zero, Act, Silent, Comm)):
            return False
        if isinstance(t, Guard):
            return self._test(t.g, s)
        if isinstance(t, Alt):
            return self.term(t.left, s, _seen) or self.term(t.right, s, _seen)
        if isinstance(t, (Seq, Par, LeftMerge, Conc)):
            return self.term(t.left, s, _seen) and self.term(t.right, s, _seen)
        if isinstance(t, (Encap, Abstr)):
            return self.term(t.body, s, _seen)
        if isinstance(t, Proj):
            return self.term(t.body, s, _seen)
        if isinstance(t, (Theta, Unless)):
            return self.term(self._elim(t), s, _seen)
        if isinstance(t, RecConst):
            if t in _seen:
                return False
            return self.term(self._unfold(t), s, _seen | {t})
        if isinstance(t, (Star, ParStar)):
            raise SosError("star operators belong to the Kleene module")
        if isinstance(t, Var):
            raise SosError(f"free recursion variable {t.name}")
        raise SosError(f"no semantics for {type(t).__name__}")

    def _test(self, g, s):
        if isinstance(g, GOne):
            return True
        if isinstance(g, GZero):
            return False
        if self.env is None:
            raise SosError("guards need a data environment")
        return self.env.test(g, s)

    def _unfold(self, t: RecConst) -> Term:
        spec = t.spec
        sub = {n: RecConst(n, spec) for n in spec.names}
        return substitute(spec.rhs(t.var), sub)

    def _elim(self, t):
        from .rewrite import normalize
        key = ("elim", t)
        if key not in self._memo:
            self._memo[key] = normalize(t, self.sig)[0]
        return self._memo[key]

    # steps -----------------------------------------------------------
    def steps(self, t, s=None, _seen=frozenset()) -> set:
        """Set of (label, successor) pairs; successors are terms or TICK."""
        if isinstance(t, (Zero, One, Guard)) or t is TICK:
            return set()
        if isinstance(t, Act):
            return {((t.name,), TICK)}
        if isinstance(t, Silent):
            return {(("tau",), TICK)}
        if isinstance(t, Alt):
            return self.steps(t.left, s, _seen) | self.steps(t.right, s, _seen)
        if isinstance(t, Seq):
            out = {(lab, _seq(x1, t.right)) for lab, x1 in self.steps(t.left, s, _seen)}
            if self.term(t.left, s):
                out |= self.steps(t.right, s, _seen)
            return out
        if isinstance(t, (Par, LeftMerge, Conc)):
            xs = self.steps(t.left, s, _seen)
            ys = self.steps(t.right, s, _seen)
            lm = isinstance(t, LeftMerge)
            out = set()
            for l1, x1 in xs:
                for l2, y1 in ys:
                    if lm and not self.sig.step_leq(l1, l2):
                        continue
                    out.add((tuple(sorted(l1 + l2)), _conc(x1, y1)))
            if self.term(t.left, s):
                out |= ys
            if self.term(t.right, s):
                out |= xs
            if isinstance(t, Conc):
                out |= self._comm(xs, ys)
            return out
        if isinstance(t, Comm):
            return self._comm(self.steps(t.left, s, _seen), self.steps(t.right, s, _seen))
        if isinstance(t, Encap):
            return {(lab, x1 if x1 is TICK else Encap(t.hset, x1))
                    for lab, x1 in self.steps(t.body, s, _seen)
                    if not any(a in t.hset for a in lab)}
        if isinstance(t, Abstr):
            return {(tuple(sorted("tau" if a in t.iset else a for a in lab)),
                     x1 if x1 is TICK else Abstr(t.iset, x1))
                    for lab, x1 in self.steps(t.body, s, _seen)}
        if isinstance(t, Proj):
            if t.n == 0:
                return set()
            return {(lab, x1 if x1 is TICK else Proj(t.n - 1, x1))
                    for lab, x1 in self.steps(t.body, s, _seen)}
        if isinstance(t, (Theta, Unless)):
            return self.steps(self._elim(t), s, _seen)
        if isinstance(t, RecConst):
            if t in _seen:
                raise UnguardedRecursion(f"unguarded recursion through {t.var}")
            return self.steps(self._unfold(t), s, _seen | {t})
        if isinstance(t, (Star, ParStar)):
            raise SosError("star operators belong to the Kleene module")
        if isinstance(t, Var):
            raise SosError(f"free recursion variable {t.name}")
        raise SosError(f"no semantics for {type(t).__name__}")

    def _comm(self, xs, ys):
        out = set()
        for l1, x1 in xs:
            if len(l1) != 1 or l1[0] == "tau":
                continue
            for l2, y1 in ys:
                if len(l2) != 1 or l2[0] == "tau":
                    continue
                g = self.sig.comm(l1[0], l2[0])
                if g is not None:
                    out.add(((g,), _conc(x1, y1)))
        return out

    def guarded_steps(self, t, s) -> set:
        """Triples (label, successor, new state)."""
        out = set()
        for lab, t1 in self.steps(t, s):
            for a in lab:
                out.add((lab, t1, self.env.effect(a, s) if self.env else s))
        return out


def derive_steps(t: Term, sig: Signature | None = None) -> set:
    return {(lab, lite(x)) for lab, x in Semantics(sig).steps(t)}


def terminates(t: Term, sig: Signature | None = None, env=None, s=None) -> bool:
    return Semantics(sig, env).term(t, s)


def derive_steps_guarded(t: Term, s, sig: Signature | None, env: DataEnv) -> set:
    return {(lab, lite(x), s1) for lab, x, s1 in Semantics(sig, env).guarded_steps(t, s)}


# ---------------------------------------------------------------- LTS


@dataclass
class StepLTS:
    states: list
    trans: list  # (src, label, dst)
    initial: int = 0
    terminating: set = field(default_factory=set)
    horizon: set = field(default_factory=set)
    names: list | None = None

    @classmethod
    def from_edges(cls, n, edges, terminating=(), initial=0) -> "StepLTS":
        norm = []
        for a, lab, b in edges:
            if isinstance(lab, str):
                lab = (lab,)
            norm.append((a, tuple(sorted(lab)), b))
        return cls(list(range(n)), sorted(set(norm)), initial, set(terminating))

    @property
    def n(self) -> int:
        return len(self.states)

    def succ(self):
        out = [[] for _ in self.states]
        for a, lab, b in self.trans:
            out[a].append((lab, b))
        return out

    def labels(self) -> set:
        return {lab for _, lab, _ in self.trans}

    def reachable(self) -> "StepLTS":
        """Restrict to the part reachable from the initial state."""
        succ = self.succ()
        seen = {self.initial}
        order = [self.initial]
        dq = deque(order)
        while dq:
            u = dq.popleft()
            for _, v in sorted(succ[u]):
                if v not in seen:
                    seen.add(v)
                    order.append(v)
                    dq.append(v)
        idx = {u: i for i, u in enumerate(order)}
        return StepLTS([self.states[u] for u in order],
                       sorted({(idx[a], l, idx[b]) for a, l, b in self.trans if a in idx}),
                       0, {idx[u] for u in self.terminating if u in idx},
                       {idx[u] for u in self.horizon if u in idx})

    def state_name(self, i) -> str:
        k = self.states[i]
        if self.names is not None:
            return self.names[i]
        if k is TICK:
            return "√"
        if isinstance(k, tuple) and len(k) == 2 and (k[0] is TICK or isinstance(k[0], Term)):
            return f"<{_key_text(k[0])}, {k[1]}>"
        return _key_text(k)

    def to_dot(self) -> str:
        lines = ["digraph lts {", "  rankdir=LR;", '  init [shape=point];']
        for i in range(self.n):
            shape = "doublecircle" if i in self.terminating else "circle"
            name = self.state_name(i).replace('"', '\\"')
            lines.append(f'  s{i} [shape={shape}, label="{name}"];')
        lines.append(f"  init -> s{self.initial};")
        for a, lab, b in self.trans:
            lines.append(f'  s{a} -> s{b} [label="{render_label(lab)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"StepLTS({self.n} states, {len(self.trans)} transitions)"


def _key_text(k):
    if k is TICK:
        return "√"
    if isinstance(k, Term):
        return render_term(k)
    return str(k)


def build_lts(t: Term, sig: Signature | None = None, env: DataEnv | None = None,
              init_state=None, max_states: int = 10000) -> StepLTS:
    """Explore the reachable step graph breadth first.

    With ``env`` the states are pairs (term, data state).  Numbering follows
    the exploration order with successors visited in key order, so the
    result does not depend on set iteration order.
    """
    sem = Semantics(sig, env)
    guarded = env is not None
    if guarded and init_state is None:
        init_state = env.states[0]
    start = (lite(t), init_state) if guarded else lite(t)
    index = {start: 0}
    states = [start]
    trans = set()
    term = set()
    dq = deque([start])
    while dq:
        k = dq.popleft()
        u = index[k]
        if guarded:
            tt, s = k
            if tt is TICK or sem.term(tt, s):
                term.add(u)
            succ = [] if tt is TICK else [(lab, (lite(x), s1)) for lab, x, s1 in sem.guarded_steps(tt, s)]
        else:
            if k is TICK or sem.term(k):
                term.add(u)
            succ = [] if k is TICK else [(lab, lite(x)) for lab, x in sem.steps(k)]
        succ.sort(key=lambda e: (e[0], _sort_key(e[1])))
        for lab, k2 in succ:
            if k2 not in index:
                if len(states) >= max_states:
                    raise StateBoundExceeded(f"more than {max_states} states",
                                             [_key_text(x if not guarded else x[0]) for x in list(dq)[:10]])
                index[k2] = len(states)
                states.append(k2)
                dq.append(k2)
            trans.add((u, lab, index[k2]))
    return StepLTS(states, sorted(trans), 0, term)


def _sort_key(k):
    if isinstance(k, tuple):
        return (_sort_key(k[0]), repr(k[1]))
    return "" if k is TICK else render_term(k)


# ------------------------------------------------------------ recursion


class NonLinearSpec(ValueError):
    pass


def _chain_names(t):
    """Action names of an action product a1 lm ... lm ak (or with ||)."""
    if isinstance(t, (Act, Silent)):
        return ["tau" if isinstance(t, Silent) else t.name]
    if isinstance(t, (LeftMerge, Par)):
        l, r = _chain_names(t.left), _chain_names(t.right)
        if l is not None and r is not None:
            return l + r
    return None


def linear_summands(spec: RecSpec, name: str) -> list:
    """Classify summands as (prefix_names, target_var_or_None).

    ``1`` and ``1 . Y`` are recorded with an empty prefix; 0 summands are
    dropped.  Raises NonLinearSpec for anything else.
    """
    out = []
    for s in summands(spec.rhs(name)):
        if isinstance(s, Zero):
            continue
        if isinstance(s, One):
            out.append(((), None))
            continue
        if isinstance(s, Var):
            out.append(((), s.name))
            continue
        if isinstance(s, Seq) and isinstance(s.right, Var):
            if isinstance(s.left, One):
                out.append(((), s.right.name))
                continue
            names = _chain_names(s.left)
            if names is not None:
                out.append((tuple(names), s.right.name))
                continue
        names = _chain_names(s)
        if names is not None:
            out.append((tuple(names), None))
            continue
        raise NonLinearSpec(f"summand {render_term(s)} of {name} is not linear")
    return out


def check_guardedness(spec: RecSpec) -> bool:
    graph = {}
    for n in spec.names:
        graph[n] = {v for pre, v in linear_summands(spec, n)
                    if v is not None and all(a == "tau" for a in pre)}
    state = {}

    def cyclic(u):
        state[u] = 1
        for v in graph[u]:
            if state.get(v) == 1 or (v not in state and cyclic(v)):
                return True
        state[u] = 2
        return False

    return not any(n not in state and cyclic(n) for n in spec.names)


class Cluster(tuple):
    """A pair (variables, exits) with a flag telling whether it is a real cluster."""

    def __new__(cls, vars_, exits, proper):
        obj = super().__new__(cls, (frozenset(vars_), list(exits)))
        obj.proper = proper
        return obj

    @property
    def vars(self):
        return self[0]

    @property
    def exits(self):
        return self[1]


def _hidden(pre, hide):
    return all(a == "tau" or a in hide for a in pre)


def compute_clusters(spec: RecSpec, hide) -> list:
    """Strongly connected classes under summands labelled from hide ∪ {tau}.

    Every variable belongs to exactly one returned class; ``proper`` is set
    when the class has an internal silent edge (it is a cluster in the strict
    sense).  Exits are the summands leaving the class or performing a
    visible action.
    """
    hide = set(hide)
    lin = {n: linear_summands(spec, n) for n in spec.names}
    edges = {n: {v for pre, v in lin[n] if v is not None and pre and _hidden(pre, hide)} for n in spec.names}
    comps = _scc(spec.names, edges)
    out = []
    for comp in comps:
        proper = any(v in comp for u in comp for v in edges[u])
        exits = []
        for u in spec.names:
            if u not in comp:
                continue
            for s, (pre, v) in zip(_nonzero(spec.rhs(u)), lin[u]):
                if v is None or not _hidden(pre, hide) or v not in comp or not pre:
                    exits.append(s)
        out.append(Cluster(comp, exits, proper))
    return out


def _nonzero(t):
    return [s for s in summands(t) if not isinstance(s, Zero)]


def _scc(nodes, edges):
    index, low, stack, on, out = {}, {}, [], set(), []
    counter = [0]

    def visit(v):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        for w in sorted(edges[v]):
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = set()
            while True:
                w = stack.pop()
                on.discard(w)
                comp.add(w)
                if w == v:
                    break
            out.append(comp)

    for n in nodes:
        if n not in index:
            visit(n)
    return out


class NotInCluster(ValueError):
    pass


def cfar_transform(spec: RecSpec, hide, var: str) -> Term:
    hide = frozenset(hide)
    for cl in compute_clusters(spec, hide):
        if var in cl.vars:
            if not cl.proper:
                raise NotInCluster(f"{var} is not in a cluster for {sorted(hide)}")
            sub = {n: RecConst(n, spec) for n in spec.names}
            body = alt(*(substitute(e, sub) for e in cl.exits))
            return Seq(TAU, Abstr(hide, body))
    raise NotInCluster(f"{var} has no equation")


# ------------------------------------------------------------------ AIP


@dataclass
class AipVerdict:
    equal: bool
    k: int

    def __str__(self):
        return f"equal-up-to-{self.k}" if self.equal else f"distinguished-at-{self.k}"


def check_aip(t1: Term, t2: Term, sig: Signature | None = None, max_n: int | None = None) -> AipVerdict:
    from .equivalence import step_bisim
    if max_n is None:
        max_n = build_lts(t1, sig).n * build_lts(t2, sig).n
    for k in range(1, max_n + 1):
        l1 = build_lts(Proj(k, t1), sig)
        l2 = build_lts(Proj(k, t2), sig)
        if not step_bisim(l1, l2).related:
            return AipVerdict(False, k)
    return AipVerdict(True, max_n)
