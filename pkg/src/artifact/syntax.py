"""Terms, guards, recursive specifications and signatures.

The concrete grammar is ASCII.  Binary operators are right associative and
bind, tightest first: ``.``, ``||``, ``|``, ``&``, ``lm``, ``<|``, ``+``.
Postfix ``*`` and ``^`` bind tighter than any binary operator.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int = -1):
        super().__init__(f"{msg} at position {pos}" if pos >= 0 else msg)
        self.pos = pos


class _Node:
    """Hash-consing-free immutable node with a cached hash and sort key."""

    _fields: tuple = ()

    def _vals(self):
        return tuple(getattr(self, f) for f in self._fields)

    def __hash__(self):
        try:
            return self.__dict__["_h"]
        except KeyError:
            h = hash((type(self).__name__,) + self._vals())
            object.__setattr__(self, "_h", h)
            return h

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._vals() == other._vals()

    def __ne__(self, other):
        return not self.__eq__(other)


# --------------------------------------------------------------- guards


class GuardExpr(_Node):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class GZero(GuardExpr):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class GOne(GuardExpr):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class Atom(GuardExpr):
    name: str
    _fields = ("name",)


@dataclass(frozen=True, eq=False, repr=False)
class Neg(GuardExpr):
    body: GuardExpr
    _fields = ("body",)


@dataclass(frozen=True, eq=False, repr=False)
class GAlt(GuardExpr):
    left: GuardExpr
    right: GuardExpr
    _fields = ("left", "right")


@dataclass(frozen=True, eq=False, repr=False)
class GSeq(GuardExpr):
    left: GuardExpr
    right: GuardExpr
    _fields = ("left", "right")


@dataclass(frozen=True, eq=False, repr=False)
class GPar(GuardExpr):
    left: GuardExpr
    right: GuardExpr
    _fields = ("left", "right")


GuardExpr.__repr__ = lambda self: f"<guard {render_guard(self)}>"


def guard_atoms(g: GuardExpr) -> set[str]:
    if isinstance(g, Atom):
        return {g.name}
    out: set[str] = set()
    for f in g._fields:
        out |= guard_atoms(getattr(g, f))
    return out


# ---------------------------------------------------------------- terms


class Term(_Node):
    def __repr__(self):
        return f"<{type(self).__name__} {render_term(self)}>"

    def __str__(self):
        return render_term(self)

    @property
    def children(self) -> tuple["Term", ...]:
        return tuple(getattr(self, f) for f in self._kids)

    _kids: tuple = ()

    def with_children(self, kids) -> "Term":
        if not self._kids:
            return self
        vals = {f: getattr(self, f) for f in self._fields}
        for name, k in zip(self._kids, kids):
            vals[name] = k
        return type(self)(**vals)


def _leaf(name):
    cls = dataclass(frozen=True, eq=False, repr=False)(type(name, (Term,), {}))
    return cls


Zero = _leaf("Zero")
One = _leaf("One")
Silent = _leaf("Silent")


@dataclass(frozen=True, eq=False, repr=False)
class Act(Term):
    name: str
    _fields = ("name",)


@dataclass(frozen=True, eq=False, repr=False)
class Var(Term):
    """Recursion variable, only meaningful inside a RecSpec right-hand side."""

    name: str
    _fields = ("name",)


class _Bin(Term):
    _fields = ("left", "right")
    _kids = ("left", "right")


def _binary(name):
    cls = type(name, (_Bin,), {"__annotations__": {"left": Term, "right": Term}})
    return dataclass(frozen=True, eq=False, repr=False)(cls)


Alt = _binary("Alt")
Seq = _binary("Seq")
Par = _binary("Par")
LeftMerge = _binary("LeftMerge")
Comm = _binary("Comm")
Conc = _binary("Conc")
Unless = _binary("Unless")


class _Un(Term):
    _fields = ("body",)
    _kids = ("body",)


def _unary(name):
    cls = type(name, (_Un,), {"__annotations__": {"body": Term}})
    return dataclass(frozen=True, eq=False, repr=False)(cls)


Theta = _unary("Theta")
Star = _unary("Star")
ParStar = _unary("ParStar")


@dataclass(frozen=True, eq=False, repr=False)
class Encap(Term):
    hset: frozenset
    body: Term
    _fields = ("hset", "body")
    _kids = ("body",)


@dataclass(frozen=True, eq=False, repr=False)
class Abstr(Term):
    iset: frozenset
    body: Term
    _fields = ("iset", "body")
    _kids = ("body",)


@dataclass(frozen=True, eq=False, repr=False)
class Proj(Term):
    n: int
    body: Term
    _fields = ("n", "body")
    _kids = ("body",)


@dataclass(frozen=True, eq=False, repr=False)
class Guard(Term):
    g: GuardExpr
    _fields = ("g",)


@dataclass(frozen=True, eq=False, repr=False)
class RecSpec(_Node):
    """Ordered equations ``X = t``; right-hand sides mention ``Var`` nodes."""

    equations: tuple  # of (name, Term)
    _fields = ("equations",)

    def __post_init__(self):
        names = [n for n, _ in self.equations]
        if len(set(names)) != len(names):
            raise ValueError("duplicate recursion variable")

    @classmethod
    def of(cls, eqs) -> "RecSpec":
        items = eqs.items() if isinstance(eqs, dict) else eqs
        return cls(tuple((n, t) for n, t in items))

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.equations]

    def rhs(self, name: str) -> Term:
        for n, t in self.equations:
            if n == name:
                return t
        raise KeyError(f"no equation for {name}")

    def __repr__(self):
        return "<RecSpec " + ", ".join(f"{n} = {render_term(t)}" for n, t in self.equations) + ">"


@dataclass(frozen=True, eq=False, repr=False)
class RecConst(Term):
    var: str
    spec: RecSpec
    _fields = ("var", "spec")

    def __post_init__(self):
        if self.var not in self.spec.names:
            raise ValueError(f"{self.var} has no equation in its specification")


ZERO = Zero()
ONE = One()
TAU = Silent()

BINARY = (Alt, Seq, Par, LeftMerge, Comm, Conc, Unless)


def alt(*ts: Term) -> Term:
    """Right-nested sum; the empty sum is 0."""
    ts = list(ts)
    if not ts:
        return ZERO
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = Alt(t, out)
    return out


def seq(*ts: Term) -> Term:
    ts = list(ts)
    if not ts:
        return ONE
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = Seq(t, out)
    return out


def summands(t: Term) -> list[Term]:
    out = []
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Alt):
            stack.append(u.right)
            stack.append(u.left)
        else:
            out.append(u)
    return out


def size(t: Term) -> int:
    return 1 + sum(size(c) for c in t.children)


def subterms(t: Term, path=()) -> Iterator[tuple[tuple, Term]]:
    yield path, t
    for i, c in enumerate(t.children):
        yield from subterms(c, path + (i,))


def at_path(t: Term, path) -> Term:
    for i in path:
        t = t.children[i]
    return t


def replace_at(t: Term, path, new: Term) -> Term:
    if not path:
        return new
    kids = list(t.children)
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return t.with_children(kids)


def actions_of(t: Term) -> set[str]:
    if isinstance(t, Act):
        return {t.name}
    if isinstance(t, RecConst):
        out: set[str] = set()
        for _, rhs in t.spec.equations:
            out |= actions_of(rhs)
        return out
    out = set()
    for c in t.children:
        out |= actions_of(c)
    return out


def free_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for c in t.children:
        out |= free_vars(c)
    return out


def substitute(t: Term, sub: dict) -> Term:
    """Replace ``Var`` nodes by the terms in ``sub``."""
    if isinstance(t, Var):
        return sub.get(t.name, t)
    if not t.children:
        return t
    return t.with_children([substitute(c, sub) for c in t.children])


# ------------------------------------------------------------ signature


@dataclass(frozen=True)
class Signature:
    actions: frozenset = frozenset()
    gamma: tuple = ()  # sorted ((a, b), c) entries with a <= b
    conflict: frozenset = frozenset()  # frozensets {a, b}
    order: tuple = ()  # tie groups, ascending
    guards: frozenset = frozenset()
    _gmap: dict = field(default=None, compare=False, hash=False, repr=False)
    _rank: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        gm = {}
        for (a, b), c in self.gamma:
            if c in ("0", "1"):
                raise ValueError("gamma never yields 0 or 1")
            for k in ((a, b), (b, a)):
                if gm.get(k, c) != c:
                    raise ValueError(f"gamma is not symmetric on {a},{b}")
                gm[k] = c
        for pair in self.conflict:
            if len(pair) != 2:
                raise ValueError("conflict must be irreflexive")
        rank = {}
        for i, group in enumerate(self.order):
            for a in group:
                rank[a] = i
        object.__setattr__(self, "_gmap", gm)
        object.__setattr__(self, "_rank", rank)

    @classmethod
    def make(cls, actions=(), gamma=(), conflict=(), order=None, guards=()) -> "Signature":
        gam = {}
        for a, b, c in gamma:
            key = tuple(sorted((a, b)))
            if gam.get(key, c) != c:
                raise ValueError(f"gamma is not symmetric on {a},{b}")
            gam[key] = c
        acts = set(actions) | {c for c in gam.values()}
        groups = []
        for entry in order or ():
            groups.append(tuple(sorted(entry)) if isinstance(entry, (list, tuple, set, frozenset)) else (entry,))
        confl = frozenset(frozenset(p) for p in conflict)
        return cls(frozenset(acts), tuple(sorted(gam.items())), confl, tuple(groups), frozenset(guards))

    @classmethod
    def from_dict(cls, d: dict) -> "Signature":
        return cls.make(d.get("actions", ()), d.get("gamma", ()), d.get("conflict", ()),
                        d.get("order"), d.get("guards", ()))

    @classmethod
    def load(cls, path) -> "Signature":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "actions": sorted(self.actions),
            "gamma": [[a, b, c] for (a, b), c in self.gamma],
            "conflict": sorted(sorted(p) for p in self.conflict),
            "order": [list(g) for g in self.order],
            "guards": sorted(self.guards),
        }

    def comm(self, a: str, b: str):
        return self._gmap.get((a, b))

    def conflicts(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self.conflict

    def rank(self, a: str) -> int:
        if a == "tau":
            return -1
        return self._rank.get(a, len(self.order))

    def leq(self, a: str, b: str) -> bool:
        """The action-level preorder; tau is tied with everything."""
        if a == "tau" or b == "tau":
            return True
        return self.rank(a) <= self.rank(b)

    def step_leq(self, x, y) -> bool:
        """Compare two steps by the least rank of their visible actions."""
        xs = [self.rank(a) for a in x if a != "tau"]
        ys = [self.rank(a) for a in y if a != "tau"]
        if not xs or not ys:
            return True
        return min(xs) <= min(ys)

    def with_(self, **kw) -> "Signature":
        d = self.to_dict()
        d.update(kw)
        return Signature.from_dict(d)


EMPTY_SIG = Signature.make()


# -------------------------------------------------------- canonical key

_RANK = {
    "Zero": 0, "One": 1, "Silent": 2, "Act": 3, "Var": 4, "Guard": 5,
    "Seq": 6, "Par": 7, "LeftMerge": 8, "Comm": 9, "Conc": 10, "Unless": 11,
    "Theta": 12, "Encap": 13, "Abstr": 14, "Proj": 15, "RecConst": 16,
    "Star": 17, "ParStar": 18, "Alt": 19,
}


def _gkey(g: GuardExpr):
    return (type(g).__name__,) + tuple(_gkey(v) if isinstance(v, GuardExpr) else v for v in g._vals())


def term_key(t: Term):
    """Total order on terms: operator rank, then children, then names."""
    try:
        return t.__dict__["_k"]
    except KeyError:
        pass
    name = type(t).__name__
    if isinstance(t, (Act, Var)):
        k = (_RANK[name], t.name)
    elif isinstance(t, Guard):
        k = (_RANK[name], _gkey(t.g))
    elif isinstance(t, RecConst):
        k = (_RANK[name], t.var, tuple((n, term_key(r)) for n, r in t.spec.equations))
    elif isinstance(t, (Encap, Abstr)):
        k = (_RANK[name], tuple(sorted(t._vals()[0])), term_key(t.body))
    elif isinstance(t, Proj):
        k = (_RANK[name], t.n, term_key(t.body))
    else:
        k = (_RANK[name],) + tuple(term_key(c) for c in t.children)
    object.__setattr__(t, "_k", k)
    return k


def ac_canon(t: Term, dedupe: bool = False) -> Term:
    """Flatten and sort every sum; optionally drop duplicate summands."""
    if isinstance(t, Alt):
        parts = [ac_canon(s, dedupe) for s in summands(t)]
        flat = []
        for p in parts:
            flat.extend(summands(p))
        if dedupe:
            flat = list({p: None for p in flat})
        flat.sort(key=term_key)
        return alt(*flat)
    if isinstance(t, RecConst):
        spec = RecSpec(tuple((n, ac_canon(r, dedupe)) for n, r in t.spec.equations))
        return RecConst(t.var, spec)
    if not t.children:
        return t
    return t.with_children([ac_canon(c, dedupe) for c in t.children])


def ac_equal(t1: Term, t2: Term) -> bool:
    return ac_canon(t1) == ac_canon(t2)


# ------------------------------------------------------------- printing

# binding strength; higher binds tighter
_PREC = {Alt: 0, Unless: 1, LeftMerge: 2, Conc: 3, Comm: 4, Par: 5, Seq: 6}
_OPS = {Alt: "+", Unless: "<|", LeftMerge: "lm", Conc: "&", Comm: "|", Par: "||", Seq: "."}
_POSTFIX = 7
_ATOM = 8


def _prec(t: Term) -> int:
    if type(t) in _PREC:
        return _PREC[type(t)]
    if isinstance(t, (Star, ParStar)):
        return _POSTFIX
    if isinstance(t, RecConst):
        return -1
    return _ATOM


def render_guard(g: GuardExpr, ctx: int = 0) -> str:
    # guard precedence: + (0) < || (1) < . (2) < ! (3)
    if isinstance(g, GZero):
        return "0"
    if isinstance(g, GOne):
        return "1"
    if isinstance(g, Atom):
        return g.name
    if isinstance(g, Neg):
        return "!" + render_guard(g.body, 3)
    p, op = {GAlt: (0, "+"), GPar: (1, "||"), GSeq: (2, ".")}[type(g)]
    s = f"{render_guard(g.left, p + 1)} {op} {render_guard(g.right, p)}"
    return f"({s})" if p < ctx else s


def _wrap(t: Term, need: int) -> str:
    s = render_term(t)
    return f"({s})" if _prec(t) < need else s


def render_term(t: Term) -> str:
    tp = type(t)
    if tp in _PREC:
        p = _PREC[tp]
        return f"{_wrap(t.left, p + 1)} {_OPS[tp]} {_wrap(t.right, p)}"
    if t is ZERO or isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, Silent):
        return "tau"
    if isinstance(t, (Act, Var)):
        return t.name
    if isinstance(t, Star):
        return _wrap(t.body, _ATOM) + "*"
    if isinstance(t, ParStar):
        return _wrap(t.body, _ATOM) + "^"
    if isinstance(t, Theta):
        return f"theta({render_term(t.body)})"
    if isinstance(t, Encap):
        return "encap{" + ",".join(sorted(t.hset)) + "}(" + render_term(t.body) + ")"
    if isinstance(t, Abstr):
        return "hide{" + ",".join(sorted(t.iset)) + "}(" + render_term(t.body) + ")"
    if isinstance(t, Proj):
        return f"pi[{t.n}]({render_term(t.body)})"
    if isinstance(t, Guard):
        return f"[{render_guard(t.g)}]"
    if isinstance(t, RecConst):
        eqs = ", ".join(f"{n} = {render_term(r)}" for n, r in t.spec.equations)
        return f"rec {t.var} where {{ {eqs} }}"
    raise TypeError(f"cannot render {t!r}")


# -------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>\|\||<\||[.|&+*^()\[\]{},=!]))"
)
RESERVED = {"lm", "tau", "theta", "encap", "hide", "pi", "rec", "where"}


def _tokenize(text: str):
    pos = 0
    out = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    LEVELS = [("+", Alt), ("<|", Unless), ("lm", LeftMerge), ("&", Conc),
              ("|", Comm), ("||", Par), (".", Seq)]

    def __init__(self, text, sig, variables=frozenset()):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig
        self.vars = set(variables)

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.next()
        if tok[1] != value or tok[0] == "eof":
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def at(self, value):
        kind, val, _ = self.peek()
        return kind != "eof" and val == value

    def parse(self):
        t = self.term(0)
        kind, val, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {val!r}", pos)
        return t

    def term(self, level):
        if level == len(self.LEVELS):
            return self.postfix()
        op, cls = self.LEVELS[level]
        left = self.term(level + 1)
        if self.at(op):
            self.next()
            right = self.term(level)
            return cls(left, right)
        return left

    def postfix(self):
        t = self.primary()
        while self.at("*") or self.at("^"):
            t = Star(t) if self.next()[1] == "*" else ParStar(t)
        return t

    def name_set(self):
        self.expect("{")
        names = []
        while not self.at("}"):
            kind, val, pos = self.next()
            if kind != "id":
                raise ParseError(f"malformed set near {val!r}", pos)
            names.append(val)
            if not self.at("}"):
                self.expect(",")
        self.expect("}")
        return frozenset(names)

    def check_action(self, name, pos, allow_guard=False):
        sig = self.sig
        if sig is None:
            return
        if name in sig.actions or (allow_guard and name in sig.guards):
            return
        raise ParseError(f"undeclared action {name!r}", pos)

    def primary(self):
        kind, val, pos = self.next()
        if kind == "num":
            if val == "0":
                return ZERO
            if val == "1":
                return ONE
            raise ParseError(f"unexpected number {val}", pos)
        if kind == "op" and val == "(":
            t = self.term(0)
            self.expect(")")
            return t
        if kind == "op" and val == "[":
            g = self.guard(0)
            self.expect("]")
            return Guard(g)
        if kind == "id":
            if val == "tau":
                return TAU
            if val == "theta":
                self.expect("(")
                t = self.term(0)
                self.expect(")")
                return Theta(t)
            if val in ("encap", "hide"):
                names = self.name_set()
                for n in names:
                    self.check_action(n, pos, allow_guard=val == "hide")
                self.expect("(")
                t = self.term(0)
                self.expect(")")
                return Encap(names, t) if val == "encap" else Abstr(names, t)
            if val == "pi":
                self.expect("[")
                k, n, p = self.next()
                if k != "num":
                    raise ParseError("malformed projection index", p)
                self.expect("]")
                self.expect("(")
                t = self.term(0)
                self.expect(")")
                return Proj(int(n), t)
            if val == "rec":
                return self.rec(pos)
            if val in RESERVED:
                raise ParseError(f"unexpected keyword {val!r}", pos)
            if val in self.vars:
                return Var(val)
            self.check_action(val, pos)
            return Act(val)
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)

    def rec(self, pos):
        kind, focus, p = self.next()
        if kind != "id":
            raise ParseError("expected recursion variable", p)
        self.expect("where")
        self.expect("{")
        # collect variable names first so right-hand sides can refer forward
        names, j, depth = [], self.i, 0
        while j < len(self.toks):
            k, v, _ = self.toks[j]
            if v == "{":
                depth += 1
            elif v == "}":
                if depth == 0:
                    break
                depth -= 1
            elif depth == 0 and k == "id" and self.toks[j + 1][1] == "=":
                prev = self.toks[j - 1][1]
                if prev in ("{", ","):
                    names.append(v)
            j += 1
        saved = self.vars
        self.vars = saved | set(names)
        eqs = []
        while not self.at("}"):
            k, name, p = self.next()
            if k != "id":
                raise ParseError("expected equation", p)
            self.expect("=")
            eqs.append((name, self.term(0)))
            if not self.at("}"):
                self.expect(",")
        self.expect("}")
        self.vars = saved
        if focus not in names:
            raise ParseError(f"{focus} has no equation", pos)
        return RecConst(focus, RecSpec(tuple(eqs)))

    # guard grammar: + < || < . < !
    def guard(self, level):
        if level == 3:
            return self.guard_primary()
        op, cls = [("+", GAlt), ("||", GPar), (".", GSeq)][level]
        left = self.guard(level + 1)
        if self.at(op):
            self.next()
            return cls(left, self.guard(level))
        return left

    def guard_primary(self):
        kind, val, pos = self.next()
        if val == "!":
            return Neg(self.guard_primary())
        if val == "(":
            g = self.guard(0)
            self.expect(")")
            return g
        if kind == "num" and val in ("0", "1"):
            return GZero() if val == "0" else GOne()
        if kind == "id":
            if val == "g0":
                return GZero()
            if val == "g1":
                return GOne()
            if self.sig is not None and self.sig.guards and val not in self.sig.guards:
                raise ParseError(f"undeclared guard atom {val!r}", pos)
            return Atom(val)
        raise ParseError(f"unexpected {val or 'end of input'!r} in guard", pos)


def parse_term(text: str, sig: Signature | None = None) -> Term:
    """Parse ``text``; with a signature, every action must be declared."""
    return _Parser(text, sig).parse()


def parse_guard(text: str, sig: Signature | None = None) -> GuardExpr:
    p = _Parser(text, sig)
    g = p.guard(0)
    kind, val, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected {val!r}", pos)
    return g


def parse_spec(text: str, sig: Signature | None = None) -> RecSpec:
    """Parse ``X = t, Y = u`` (braces optional) into a RecSpec."""
    body = text.strip()
    if not body.startswith("{"):
        body = "{" + body + "}"
    first = re.match(r"\{\s*([A-Za-z_][A-Za-z0-9_']*)", body)
    if not first:
        raise ParseError("empty specification", 0)
    return parse_term(f"rec {first.group(1)} where {body}", sig).spec


def action_names(ts: Iterable[Term]) -> set[str]:
    out: set[str] = set()
    for t in ts:
        out |= actions_of(t)
    return out
