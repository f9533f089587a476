"""Term rewriting for the BATC/APTC families.

Rules are kept in table order and tried first-match at each node.  Sums are
handled modulo associativity and commutativity: after every step the term is
re-flattened and its summands sorted, so normal forms are AC-canonical.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .syntax import (
    ONE, TAU, ZERO, Abstr, Act, Alt, Comm, Conc, Encap, GAlt, GSeq, Guard, LeftMerge,
    Neg, One, Par, ParStar, Proj, RecConst, Seq, Signature, Silent, Star, Term,
    Theta, Unless, Var, Zero, ac_canon, alt, at_path, replace_at, render_term,
    summands, term_key, EMPTY_SIG,
)


class RewriteError(ValueError):
    """Raised by apply_rule; ``kind`` is ``no-match`` or ``side-condition``."""

    def __init__(self, kind: str, msg: str = ""):
        super().__init__(f"{kind}: {msg}" if msg else kind)
        self.kind = kind


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class RuleId:
    table: str
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class TraceStep:
    rule: RuleId
    path: tuple
    before: Term
    after: Term

    def line(self) -> str:
        return f"{self.rule} @ {format_path(self.path)} : {render_term(self.before)} ==> {render_term(self.after)}"


def format_path(path) -> str:
    return ".".join(str(i) for i in path) if path else "ε"


def parse_path(text) -> tuple:
    if isinstance(text, (tuple, list)):
        return tuple(text)
    text = text.strip()
    if text in ("", "ε", "e", "root"):
        return ()
    return tuple(int(p) for p in text.split("."))


NOMATCH = object()
SIDEFAIL = object()


class Ctx:
    def __init__(self, sig: Signature, env=None, guards_auto=True):
        self.sig = sig or EMPTY_SIG
        self.env = env


# ------------------------------------------------------------- helpers


def is_atom(t: Term) -> bool:
    return isinstance(t, (Act, Silent))


def atom_name(t: Term) -> str:
    return "tau" if isinstance(t, Silent) else t.name


def is_chain(t: Term) -> bool:
    """An atom or a left-merge tree whose leaves are atoms."""
    if is_atom(t):
        return True
    return isinstance(t, LeftMerge) and is_chain(t.left) and is_chain(t.right)


def chain_atoms(t: Term) -> list:
    if is_atom(t):
        return [t]
    return chain_atoms(t.left) + chain_atoms(t.right)


def chain_step(t: Term, sig: Signature):
    """The multiset fired by a chain, or None when some left merge blocks."""
    if is_atom(t):
        return [atom_name(t)]
    left = chain_step(t.left, sig)
    right = chain_step(t.right, sig)
    if left is None or right is None or not sig.step_leq(left, right):
        return None
    return left + right


def make_chain(atoms, sig: Signature) -> Term:
    atoms = sorted(atoms, key=lambda a: (sig.rank(atom_name(a)), atom_name(a)))
    out = atoms[-1]
    for a in reversed(atoms[:-1]):
        out = LeftMerge(a, out)
    return out


def _is_guard(t):
    return isinstance(t, Guard)


def _neg_of(g, h) -> bool:
    return isinstance(h, Neg) and h.body == g


# ---------------------------------------------------------------- rules
# Each rule takes (term, ctx) and returns a Term, NOMATCH or SIDEFAIL.

RULES: list[tuple[RuleId, type, Callable]] = []


def rule(table, name, head):
    def deco(fn):
        RULES.append((RuleId(table, name), head, fn))
        return fn
    return deco


# BATC ------------------------------------------------------------------

@rule("BATC", "RA3", Alt)
def ra3(t, c):
    parts = summands(t)
    seen = set()
    for i, p in enumerate(parts):
        if p in seen:
            return alt(*(parts[:i] + parts[i + 1:]))
        seen.add(p)
    return NOMATCH


@rule("BATC", "RA6", Alt)
def ra6(t, c):
    parts = summands(t)
    for i, p in enumerate(parts):
        if isinstance(p, Zero):
            return alt(*(parts[:i] + parts[i + 1:]))
    return NOMATCH


@rule("BATC", "RA4", Seq)
def ra4(t, c):
    if isinstance(t.left, Alt):
        return Alt(Seq(t.left.left, t.right), Seq(t.left.right, t.right))
    return NOMATCH


@rule("BATC", "RA5", Seq)
def ra5(t, c):
    if isinstance(t.left, Seq):
        return Seq(t.left.left, Seq(t.left.right, t.right))
    return NOMATCH


@rule("BATC", "RA7", Seq)
def ra7(t, c):
    return ZERO if isinstance(t.left, Zero) else NOMATCH


@rule("BATC", "RA8", Seq)
def ra8(t, c):
    return t.right if isinstance(t.left, One) else NOMATCH


@rule("BATC", "RA9", Seq)
def ra9(t, c):
    return t.left if isinstance(t.right, One) else NOMATCH


# APTC ------------------------------------------------------------------

@rule("APTC", "RP1", Conc)
def rp1(t, c):
    return Alt(Par(t.left, t.right), Comm(t.left, t.right))


@rule("APTC", "RP2", Par)
def rp2(t, c):
    return Alt(LeftMerge(t.left, t.right), LeftMerge(t.right, t.left))


def _chain_pair(s1, s2, c):
    if not (is_chain(s1) and is_chain(s2)):
        return NOMATCH
    x = chain_step(s1, c.sig)
    y = chain_step(s2, c.sig)
    if x is None or y is None:
        return NOMATCH
    if not c.sig.step_leq(x, y):
        return SIDEFAIL
    return make_chain(chain_atoms(s1) + chain_atoms(s2), c.sig)


@rule("APTC", "RP3", LeftMerge)
def rp3(t, c):
    if isinstance(t.right, Seq):
        head = _chain_pair(t.left, t.right.left, c)
        if isinstance(head, Term):
            return Seq(head, t.right.right)
        return head
    return NOMATCH


@rule("APTC", "RP4", LeftMerge)
def rp4(t, c):
    if isinstance(t.left, Seq):
        head = _chain_pair(t.left.left, t.right, c)
        if isinstance(head, Term):
            return Seq(head, t.left.right)
        return head
    return NOMATCH


@rule("APTC", "RP5", LeftMerge)
def rp5(t, c):
    if isinstance(t.left, Seq) and isinstance(t.right, Seq):
        head = _chain_pair(t.left.left, t.right.left, c)
        if isinstance(head, Term):
            return Seq(head, Conc(t.left.right, t.right.right))
        return head
    return NOMATCH


@rule("APTC", "RP6", LeftMerge)
def rp6(t, c):
    if isinstance(t.left, Alt):
        return Alt(LeftMerge(t.left.left, t.right), LeftMerge(t.left.right, t.right))
    return NOMATCH


@rule("APTC", "RP6r", LeftMerge)
def rp6r(t, c):
    if isinstance(t.right, Alt):
        return Alt(LeftMerge(t.left, t.right.left), LeftMerge(t.left, t.right.right))
    return NOMATCH


@rule("APTC", "RP7", LeftMerge)
def rp7(t, c):
    return ZERO if isinstance(t.left, Zero) else NOMATCH


@rule("APTC", "RP7r", LeftMerge)
def rp7r(t, c):
    return ZERO if isinstance(t.right, Zero) else NOMATCH


@rule("APTC", "RP8", LeftMerge)
def rp8(t, c):
    return t.right if isinstance(t.left, One) else NOMATCH


@rule("APTC", "RP9", LeftMerge)
def rp9(t, c):
    return t.left if isinstance(t.right, One) else NOMATCH


@rule("APTC", "RPC", LeftMerge)
def rpc(t, c):
    """Reorder a firing left-merge tree of atoms into its canonical chain."""
    if not is_chain(t) or chain_step(t, c.sig) is None:
        return NOMATCH
    canon = make_chain(chain_atoms(t), c.sig)
    return NOMATCH if canon == t else canon


def _gamma(a, b, c):
    na, nb = atom_name(a), atom_name(b)
    if "tau" in (na, nb):
        return None
    g = c.sig.comm(na, nb)
    return Act(g) if g is not None else None


def _comm(a, b, rest, c):
    g = _gamma(a, b, c)
    if g is None:
        return ZERO
    return g if rest is None else Seq(g, rest)


@rule("APTC", "RC10", Comm)
def rc10(t, c):
    if is_atom(t.left) and is_atom(t.right):
        return _comm(t.left, t.right, None, c)
    return NOMATCH


@rule("APTC", "RC11", Comm)
def rc11(t, c):
    if is_atom(t.left) and isinstance(t.right, Seq) and is_atom(t.right.left):
        return _comm(t.left, t.right.left, t.right.right, c)
    return NOMATCH


@rule("APTC", "RC12", Comm)
def rc12(t, c):
    if isinstance(t.left, Seq) and is_atom(t.left.left) and is_atom(t.right):
        return _comm(t.left.left, t.right, t.left.right, c)
    return NOMATCH


@rule("APTC", "RC13", Comm)
def rc13(t, c):
    l, r = t.left, t.right
    if isinstance(l, Seq) and isinstance(r, Seq) and is_atom(l.left) and is_atom(r.left):
        return _comm(l.left, r.left, Conc(l.right, r.right), c)
    return NOMATCH


@rule("APTC", "RC14", Comm)
def rc14(t, c):
    if isinstance(t.left, Alt):
        return Alt(Comm(t.left.left, t.right), Comm(t.left.right, t.right))
    return NOMATCH


@rule("APTC", "RC15", Comm)
def rc15(t, c):
    if isinstance(t.right, Alt):
        return Alt(Comm(t.left, t.right.left), Comm(t.left, t.right.right))
    return NOMATCH


@rule("APTC", "RC16", Comm)
def rc16(t, c):
    return ZERO if isinstance(t.left, Zero) else NOMATCH


@rule("APTC", "RC17", Comm)
def rc17(t, c):
    return ZERO if isinstance(t.right, Zero) else NOMATCH


@rule("APTC", "RC18", Comm)
def rc18(t, c):
    return ZERO if isinstance(t.left, One) else NOMATCH


@rule("APTC", "RC19", Comm)
def rc19(t, c):
    return ZERO if isinstance(t.right, One) else NOMATCH


def _multi(t):
    """A chain of two or more atoms, possibly followed by a continuation."""
    head = t.left if isinstance(t, Seq) else t
    return isinstance(head, LeftMerge) and is_chain(head)


@rule("APTC", "RCS", Comm)
def rcs(t, c):
    """Communication needs single actions on both sides."""
    if _multi(t.left) or _multi(t.right):
        return ZERO
    return NOMATCH


@rule("APTC", "RCE20", Theta)
def rce20(t, c):
    return t.body if isinstance(t.body, (Act, Silent, One)) else NOMATCH


@rule("APTC", "RCE21", Theta)
def rce21(t, c):
    return ZERO if isinstance(t.body, Zero) else NOMATCH


@rule("APTC", "RCE22", Theta)
def rce22(t, c):
    b = t.body
    return Alt(Theta(b.left), Theta(b.right)) if isinstance(b, Alt) else NOMATCH


@rule("APTC", "RCE23", Theta)
def rce23(t, c):
    b = t.body
    return Seq(Theta(b.left), Theta(b.right)) if isinstance(b, Seq) else NOMATCH


@rule("APTC", "RCE24", Theta)
def rce24(t, c):
    b = t.body
    if isinstance(b, LeftMerge):
        x, y = b.left, b.right
        return Alt(LeftMerge(Unless(Theta(x), y), y), LeftMerge(Unless(Theta(y), x), x))
    return NOMATCH


@rule("APTC", "RCE25", Theta)
def rce25(t, c):
    b = t.body
    if isinstance(b, Comm):
        x, y = b.left, b.right
        return Alt(Comm(Unless(Theta(x), y), y), Comm(Unless(Theta(y), x), x))
    return NOMATCH


def _atoms2(t):
    return is_atom(t.left) and is_atom(t.right)


def _acts(c):
    return sorted(c.sig.actions)


@rule("APTC", "RU26", Unless)
def ru26(t, c):
    if not _atoms2(t):
        return NOMATCH
    if c.sig.conflicts(atom_name(t.left), atom_name(t.right)):
        return ONE
    return SIDEFAIL


@rule("APTC", "RU27", Unless)
def ru27(t, c):
    if not _atoms2(t):
        return NOMATCH
    a3, a2 = atom_name(t.left), atom_name(t.right)
    if any(c.sig.conflicts(a1, a2) and c.sig.leq(a3, a1) for a1 in _acts(c)):
        return t.left
    return SIDEFAIL


@rule("APTC", "RU28", Unless)
def ru28(t, c):
    if not _atoms2(t):
        return NOMATCH
    a1, a3 = atom_name(t.left), atom_name(t.right)
    if any(c.sig.conflicts(a1, a2) and c.sig.leq(a2, a3) for a2 in _acts(c)):
        return ONE
    return SIDEFAIL


@rule("APTC", "RU29", Unless)
def ru29(t, c):
    if not _atoms2(t):
        return NOMATCH
    a3, a1 = atom_name(t.left), atom_name(t.right)
    if any(c.sig.conflicts(a1, a2) and c.sig.leq(a2, a3) for a2 in _acts(c)):
        return ONE
    return SIDEFAIL


def _const_or_atom(t):
    return is_atom(t) or isinstance(t, (Zero, One))


@rule("APTC", "RU30", Unless)
def ru30(t, c):
    return t.left if _const_or_atom(t.left) and isinstance(t.right, Zero) else NOMATCH


@rule("APTC", "RU31", Unless)
def ru31(t, c):
    return ZERO if isinstance(t.left, Zero) and _const_or_atom(t.right) else NOMATCH


@rule("APTC", "RU32", Unless)
def ru32(t, c):
    return t.left if _const_or_atom(t.left) and isinstance(t.right, One) else NOMATCH


@rule("APTC", "RU33", Unless)
def ru33(t, c):
    return ONE if isinstance(t.left, One) and _const_or_atom(t.right) else NOMATCH


def _dist_left(cls):
    def fn(t, c):
        x = t.left
        if isinstance(x, cls):
            return cls(Unless(x.left, t.right), Unless(x.right, t.right))
        return NOMATCH
    return fn


def _dist_right(cls):
    def fn(t, c):
        y = t.right
        if isinstance(y, cls):
            return Unless(Unless(t.left, y.left), y.right)
        return NOMATCH
    return fn


for _n, _cls in (("RU34", Alt), ("RU35", Seq), ("RU36", LeftMerge), ("RU37", Comm)):
    rule("APTC", _n, Unless)(_dist_left(_cls))
for _n, _cls in (("RU38", Alt), ("RU39", Seq), ("RU40", LeftMerge), ("RU41", Comm)):
    rule("APTC", _n, Unless)(_dist_right(_cls))


@rule("APTC", "RUA", Unless)
def rua(t, c):
    """Atoms unrelated by the conflict side conditions pass unchanged."""
    return t.left if _atoms2(t) else NOMATCH


# ENCAP -----------------------------------------------------------------

@rule("ENCAP", "RD1", Encap)
def rd1(t, c):
    if isinstance(t.body, Act):
        return t.body if t.body.name not in t.hset else SIDEFAIL
    if isinstance(t.body, Silent):
        return t.body
    return NOMATCH


@rule("ENCAP", "RD2", Encap)
def rd2(t, c):
    if isinstance(t.body, Act):
        return ZERO if t.body.name in t.hset else SIDEFAIL
    return NOMATCH


@rule("ENCAP", "RD3", Encap)
def rd3(t, c):
    return ZERO if isinstance(t.body, Zero) else NOMATCH


@rule("ENCAP", "RD4", Encap)
def rd4(t, c):
    return ONE if isinstance(t.body, One) else NOMATCH


def _push(cls_outer, cls_inner):
    def fn(t, c):
        b = t.body
        if isinstance(b, cls_inner):
            rebuild = (lambda x: cls_outer(t.hset, x)) if cls_outer is Encap else (
                (lambda x: cls_outer(t.iset, x)) if cls_outer is Abstr else (lambda x: cls_outer(t.n, x)))
            return cls_inner(rebuild(b.left), rebuild(b.right))
        return NOMATCH
    return fn


rule("ENCAP", "RD5", Encap)(_push(Encap, Alt))
rule("ENCAP", "RD6", Encap)(_push(Encap, Seq))
rule("ENCAP", "RD7", Encap)(_push(Encap, LeftMerge))


@rule("ENCAP", "RG23", Encap)
def rg23(t, c):
    return t.body if isinstance(t.body, Guard) else NOMATCH


# PROJ ------------------------------------------------------------------

rule("PROJ", "PR1", Proj)(_push(Proj, Alt))


@rule("PROJ", "PR2", Proj)
def pr2(t, c):
    b = t.body
    if isinstance(b, LeftMerge):
        return LeftMerge(Proj(t.n, b.left), Proj(t.n, b.right))
    return NOMATCH


@rule("PROJ", "PR3", Proj)
def pr3(t, c):
    if t.n >= 1 and is_chain(t.body):
        return t.body
    return NOMATCH


@rule("PROJ", "PR4", Proj)
def pr4(t, c):
    b = t.body
    if t.n >= 1 and isinstance(b, Seq) and is_chain(b.left):
        return Seq(b.left, Proj(t.n - 1, b.right))
    return NOMATCH


@rule("PROJ", "PR5", Proj)
def pr5(t, c):
    return ZERO if t.n == 0 else NOMATCH


@rule("PROJ", "PR6", Proj)
def pr6(t, c):
    return ZERO if isinstance(t.body, Zero) else NOMATCH


@rule("PROJ", "PR7", Proj)
def pr7(t, c):
    return ONE if isinstance(t.body, One) else NOMATCH


# TAU -------------------------------------------------------------------

@rule("TAU", "TI1", Abstr)
def ti1(t, c):
    if isinstance(t.body, Act):
        return t.body if t.body.name not in t.iset else SIDEFAIL
    if isinstance(t.body, Silent):
        return t.body
    if isinstance(t.body, Guard) and not (set(_atoms_of_guard(t.body)) & t.iset):
        return t.body
    return NOMATCH


def _atoms_of_guard(g):
    from .syntax import guard_atoms
    return guard_atoms(g.g)


@rule("TAU", "TI2", Abstr)
def ti2(t, c):
    if isinstance(t.body, Act):
        return TAU if t.body.name in t.iset else SIDEFAIL
    return NOMATCH


@rule("TAU", "TI3", Abstr)
def ti3(t, c):
    return ZERO if isinstance(t.body, Zero) else NOMATCH


@rule("TAU", "TI4", Abstr)
def ti4(t, c):
    return ONE if isinstance(t.body, One) else NOMATCH


rule("TAU", "TI5", Abstr)(_push(Abstr, Alt))
rule("TAU", "TI6", Abstr)(_push(Abstr, Seq))
rule("TAU", "TI7", Abstr)(_push(Abstr, LeftMerge))

# the tau laws are only valid modulo rooted branching bisimulation, so they
# are kept out of the default strategy (see TAU_LAWS below)


@rule("TAU", "B1", Seq)
def b1(t, c):
    return t.left if isinstance(t.right, Silent) else NOMATCH


@rule("TAU", "B2", Seq)
def b2(t, c):
    if not is_atom(t.left) or not isinstance(t.right, Alt):
        return NOMATCH
    parts = summands(t.right)
    for i, p in enumerate(parts):
        if isinstance(p, Seq) and isinstance(p.left, Silent):
            rest = parts[:i] + parts[i + 1:]
            inner = set(summands(p.right))
            if rest and all(r in inner for r in rest):
                return Seq(t.left, p.right)
    return NOMATCH


@rule("TAU", "B3", LeftMerge)
def b3(t, c):
    return t.left if isinstance(t.right, Silent) else NOMATCH


TAU_LAWS = {"B1", "B2", "B3"}

# GUARD -----------------------------------------------------------------


@rule("GUARD", "RG1", Seq)
def rg1(t, c):
    if _is_guard(t.left):
        r = t.right
        nxt = r.left if isinstance(r, Seq) else r
        if _is_guard(nxt) and _neg_of(t.left.g, nxt.g):
            return ZERO
    return NOMATCH


@rule("GUARD", "RG2", Alt)
def rg2(t, c):
    parts = summands(t)
    for i, p in enumerate(parts):
        if not _is_guard(p):
            continue
        for j, q in enumerate(parts):
            if _is_guard(q) and _neg_of(p.g, q.g):
                rest = [x for k, x in enumerate(parts) if k not in (i, j)]
                return alt(*(rest + [ONE]))
    return NOMATCH


@rule("GUARD", "RG3", Seq)
def rg3(t, c):
    return ZERO if _is_guard(t.left) and isinstance(t.right, Zero) else NOMATCH


@rule("GUARD", "RG4", Seq)
def rg4(t, c):
    if _is_guard(t.left) and isinstance(t.right, Alt):
        return Alt(Seq(t.left, t.right.left), Seq(t.left, t.right.right))
    return NOMATCH


@rule("GUARD", "RG5", Seq)
def rg5(t, c):
    if _is_guard(t.left) and isinstance(t.right, Seq):
        return Seq(Seq(t.left, t.right.left), t.right.right)
    return NOMATCH


@rule("GUARD", "RG6", Seq)
def rg6(t, c):
    if _is_guard(t.left) and isinstance(t.left.g, GAlt):
        g = t.left.g
        return Alt(Seq(Guard(g.left), t.right), Seq(Guard(g.right), t.right))
    return NOMATCH


@rule("GUARD", "RG7", Seq)
def rg7(t, c):
    if _is_guard(t.left) and isinstance(t.left.g, GSeq):
        g = t.left.g
        return Seq(Guard(g.left), Seq(Guard(g.right), t.right))
    return NOMATCH


def _env_states(c, g):
    from .guards import truth_set
    return truth_set(g, c.env)


def _all_states(c):
    return frozenset(c.env.states)


def _guard_term(t):
    return _is_guard(t)


@rule("GUARD", "RG8", Guard)
def rg8(t, c):
    if c.env is None:
        return NOMATCH
    if isinstance(t.g, type(ONE)) or type(t.g).__name__ == "GOne":
        return ONE
    return ONE if _env_states(c, t.g) == _all_states(c) else SIDEFAIL


def _guard_prefix(t):
    gs = []
    while isinstance(t, Seq) and _is_guard(t.left):
        gs.append(t.left.g)
        t = t.right
    if _is_guard(t):
        gs.append(t.g)
        t = None
    return gs, t


@rule("GUARD", "RG9", Seq)
def rg9(t, c):
    if c.env is None:
        return NOMATCH
    gs, _ = _guard_prefix(t)
    if len(gs) < 2 and not (len(gs) == 1 and isinstance(t, Seq)):
        return NOMATCH
    if not gs:
        return NOMATCH
    common = _all_states(c)
    for g in gs:
        common &= _env_states(c, g)
    return ZERO if not common else SIDEFAIL


def _wp_rule(negated):
    def fn(t, c):
        if c.env is None or not _is_guard(t.left) or not isinstance(t.right, Seq):
            return NOMATCH
        e = t.right.left
        rest = t.right.right
        if not isinstance(e, Act):
            return NOMATCH
        post, tail = (rest.left, rest.right) if isinstance(rest, Seq) else (rest, None)
        if not _is_guard(post):
            return NOMATCH
        from .guards import wp
        target = post.g
        pre = wp(e.name, target, c.env)
        if negated:
            pre = _all_states(c) - pre
            want = _all_states(c) - _env_states(c, target)
            if _env_states(c, post.g) != want and not isinstance(post.g, Neg):
                return NOMATCH
            pre = _all_states(c) - wp(e.name, post.g.body if isinstance(post.g, Neg) else Neg(post.g), c.env)
        if _env_states(c, t.left.g) != frozenset(pre):
            return SIDEFAIL
        kept = Seq(t.left, e)
        return kept if tail is None else Seq(t.left, Seq(e, tail))
    return fn


rule("GUARD", "RG10", Seq)(_wp_rule(False))
rule("GUARD", "RG11", Seq)(_wp_rule(True))


@rule("GUARD", "RG12", Seq)
def rg12(t, c):
    if _is_guard(t.left) and isinstance(t.right, (Par, LeftMerge)):
        cls = type(t.right)
        return cls(Seq(t.left, t.right.left), Seq(t.left, t.right.right))
    return NOMATCH


@rule("GUARD", "RG13", Seq)
def rg13(t, c):
    if _is_guard(t.left) and isinstance(t.right, Comm):
        return Comm(Seq(t.left, t.right.left), Seq(t.left, t.right.right))
    return NOMATCH


def _pair_rule(cls, lpred, rpred, result):
    def fn(t, c):
        if lpred(t.left) and rpred(t.right):
            return result(t)
        return NOMATCH
    return fn


_zero = lambda t: isinstance(t, Zero)
_one = lambda t: isinstance(t, One)
rule("GUARD", "RG14", Par)(_pair_rule(Par, _is_guard, _zero, lambda t: ZERO))
rule("GUARD", "RG15", Par)(_pair_rule(Par, _zero, _is_guard, lambda t: ZERO))
rule("GUARD", "RG16", Comm)(_pair_rule(Comm, _is_guard, _zero, lambda t: ZERO))
rule("GUARD", "RG17", Comm)(_pair_rule(Comm, _zero, _is_guard, lambda t: ZERO))
rule("GUARD", "RG18", Par)(_pair_rule(Par, _is_guard, _one, lambda t: t.left))
rule("GUARD", "RG19", Par)(_pair_rule(Par, _one, _is_guard, lambda t: t.right))
rule("GUARD", "RG20", Comm)(_pair_rule(Comm, _is_guard, _one, lambda t: ZERO))
rule("GUARD", "RG21", Comm)(_pair_rule(Comm, _one, _is_guard, lambda t: ZERO))


@rule("GUARD", "RG22", Par)
def rg22(t, c):
    if _is_guard(t.left) and _is_guard(t.right) and _neg_of(t.left.g, t.right.g):
        return ZERO
    return NOMATCH


def _par_guards(t):
    if _is_guard(t):
        return [t.g]
    if isinstance(t, (Par, LeftMerge)):
        l, r = _par_guards(t.left), _par_guards(t.right)
        if l is not None and r is not None:
            return l + r
    return None


@rule("GUARD", "RG24", Par)
def rg24(t, c):
    if c.env is None:
        return NOMATCH
    gs = _par_guards(t)
    if gs is None:
        return NOMATCH
    common = _all_states(c)
    for g in gs:
        common &= _env_states(c, g)
    return ZERO if not common else SIDEFAIL


# rules never tried by the automatic strategies
MANUAL_ONLY = {"RG5"}

RULE_INDEX = {rid.name: (rid, head, fn) for rid, head, fn in RULES}
_BY_HEAD: dict[type, list] = {}
for _rid, _head, _fn in RULES:
    _BY_HEAD.setdefault(_head, []).append((_rid, _fn))


def rule_ids() -> list[RuleId]:
    return [rid for rid, _, _ in RULES]


# ------------------------------------------------------------- strategy


def _try(t: Term, ctx: Ctx, tau_laws: bool):
    for rid, fn in _BY_HEAD.get(type(t), ()):
        if rid.name in MANUAL_ONLY or (rid.name in TAU_LAWS and not tau_laws):
            continue
        if rid.table == "GUARD" and rid.name in ("RG8", "RG9", "RG10", "RG11", "RG24") and ctx.env is None:
            continue
        r = fn(t, ctx)
        if isinstance(r, Term):
            return rid, r
    return None


def _canon_sum(t: Term) -> Term:
    """Flatten and sort one sum node whose summands are already canonical."""
    parts = []
    for s in summands(t):
        parts.append(s)
    parts.sort(key=term_key)
    return alt(*parts)


class Normalizer:
    def __init__(self, sig=None, env=None, budget=10**6, tau_laws=False, max_size=10**6):
        self.ctx = Ctx(sig or EMPTY_SIG, env)
        self.budget = budget
        self.steps = 0
        self.tau_laws = tau_laws
        self.memo: dict[Term, Term] = {}
        self.max_size = max_size

    def _tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceeded(f"rewrite budget of {self.budget} steps exceeded")

    def nf(self, t: Term) -> Term:
        hit = self.memo.get(t)
        if hit is not None:
            return hit
        if isinstance(t, RecConst):
            raise ValueError("normalize expects a recursion-free term")
        if isinstance(t, Var):
            raise ValueError(f"free recursion variable {t.name}")
        if isinstance(t, (Star, ParStar)):
            raise ValueError("star operators belong to the Kleene module")
        kids = t.children
        cur = t.with_children([self.nf(k) for k in kids]) if kids else t
        if isinstance(cur, Alt):
            cur = _canon_sum(cur)
        while True:
            hit = _try(cur, self.ctx, self.tau_laws)
            if hit is None:
                break
            self._tick()
            _, nxt = hit
            # the result is built from normal subterms; normalise its new spine
            cur = self.nf(nxt) if nxt is not cur else cur
            break
        self.memo[t] = cur
        return cur


def _children_paths(t, path):
    for i, k in enumerate(t.children):
        yield path + (i,), k


def find_redex(t: Term, ctx: Ctx, tau_laws: bool, path=()):
    """Leftmost-innermost redex: first post-order node with a matching rule."""
    for p, k in _children_paths(t, path):
        hit = find_redex(k, ctx, tau_laws, p)
        if hit is not None:
            return hit
    r = _try(t, ctx, tau_laws)
    if r is not None:
        return path, r[0], r[1]
    return None


def _canon(t: Term) -> Term:
    return ac_canon(t)


def normalize(t: Term, sig: Signature | None = None, env=None, trace: bool = False,
              budget: int = 10**6, tau_laws: bool = False):
    """Return ``(normal_form, trace_steps)``.

    Without ``trace`` the memoised innermost strategy is used and the trace is
    empty; with ``trace`` every rewrite is recorded with its position.
    """
    if not trace:
        n = Normalizer(sig, env, budget, tau_laws)
        return ac_canon(n.nf(t)), []
    ctx = Ctx(sig or EMPTY_SIG, env)
    cur = _canon(t)
    steps = []
    while True:
        hit = find_redex(cur, ctx, tau_laws)
        if hit is None:
            return cur, steps
        path, rid, new = hit
        after = _canon(replace_at(cur, path, new))
        steps.append(TraceStep(rid, path, cur, after))
        if len(steps) > budget:
            raise BudgetExceeded(f"rewrite budget of {budget} steps exceeded")
        cur = after


def normalize_random(t: Term, sig: Signature | None = None, rng: random.Random | None = None,
                     env=None, budget: int = 10**6, tau_laws: bool = False) -> Term:
    """Rewrite at a redex position chosen uniformly at random until none is left.

    Positions are taken modulo AC: a flattened sum is one n-ary node whose
    arguments are its summands, so the inner spine of a sum is not a position
    of its own (every sum rule already scans all summands). Rule results,
    redex counts and canonical forms are memoised per subterm.
    """
    rng = rng or random.Random(0)
    ctx = Ctx(sig or EMPTY_SIG, env)
    result: dict = {}
    count: dict = {}
    cmemo: dict = {}
    # canonical nodes are interned so that memo lookups compare by identity
    pool: dict = {}

    def mk(u):
        return pool.setdefault(u, u)

    def contract(u):
        if u not in result:
            r = _try(u, ctx, tau_laws)
            result[u] = None if r is None else r[1]
        return result[u]

    amemo: dict = {}

    def args(u):
        # (path, argument) pairs; sums are n-ary
        a = amemo.get(u)
        if a is None:
            if isinstance(u, Alt):
                parts = summands(u)
                last = len(parts) - 1
                a = [((1,) * i + ((0,) if i < last else ()), p) for i, p in enumerate(parts)]
            else:
                a = [((i,), k) for i, k in enumerate(u.children)]
            amemo[u] = a
        return a

    def redexes(u):
        n = count.get(u)
        if n is None:
            n = (contract(u) is not None) + sum(redexes(k) for _, k in args(u))
            count[u] = n
        return n

    def canon(u):
        # keyed by identity: fresh spines from replace_at would otherwise be
        # compared structurally; the stored pair keeps the id alive
        hit = cmemo.get(id(u))
        if hit is not None:
            return hit[1]
        if isinstance(u, Alt):
            flat = []
            for part in summands(u):
                flat.extend(summands(canon(part)))
            flat.sort(key=term_key)
            r = flat[-1]
            for x in reversed(flat[:-1]):
                r = mk(Alt(x, r))
        elif isinstance(u, RecConst) or not u.children:
            r = mk(ac_canon(u))
        else:
            r = mk(u.with_children([canon(k) for k in u.children]))
        cmemo[id(u)] = (u, r)
        cmemo[id(r)] = (r, r)
        return r

    cur = canon(t)
    for _ in range(budget):
        n = redexes(cur)
        if n == 0:
            return cur
        k = rng.randrange(n)
        u, path = cur, ()
        while True:
            if contract(u) is not None:
                if k == 0:
                    break
                k -= 1
            for step, child in args(u):
                m = redexes(child)
                if k < m:
                    u, path = child, path + step
                    break
                k -= m
            else:
                raise AssertionError("redex count out of sync")
        cur = canon(replace_at(cur, path, result[u]))
    raise BudgetExceeded(f"rewrite budget of {budget} steps exceeded")


def apply_rule(t: Term, rule, at=(), sig: Signature | None = None, env=None) -> Term:
    """Apply one named rule at the position ``at`` (tuple or dotted string)."""
    name = rule.name if isinstance(rule, RuleId) else str(rule)
    if name not in RULE_INDEX:
        raise RewriteError("no-match", f"unknown rule {name}")
    rid, head, fn = RULE_INDEX[name]
    path = parse_path(at)
    try:
        sub = at_path(t, path)
    except IndexError:
        raise RewriteError("no-match", f"no subterm at {format_path(path)}") from None
    if not isinstance(sub, head):
        raise RewriteError("no-match", f"{name} does not apply to {render_term(sub)}")
    r = fn(sub, Ctx(sig or EMPTY_SIG, env))
    if r is NOMATCH:
        raise RewriteError("no-match", f"{name} does not apply to {render_term(sub)}")
    if r is SIDEFAIL:
        raise RewriteError("side-condition", f"{name} side condition fails on {render_term(sub)}")
    return replace_at(t, path, r)


def prove_equal(t1: Term, t2: Term, sig: Signature | None = None, env=None) -> bool:
    n = Normalizer(sig, env)
    return ac_canon(n.nf(t1)) == ac_canon(n.nf(t2))


# ----------------------------------------------------------- basic terms


def is_basic(t: Term, fragment: str = "APTC") -> bool:
    fragment = fragment.upper()
    guards = fragment.endswith("_G")
    par = fragment.startswith("APTC")

    def basic(u):
        if isinstance(u, (Zero, One, Act, Silent)):
            return True
        if guards and isinstance(u, Guard):
            return True
        if isinstance(u, Alt):
            return basic(u.left) and basic(u.right)
        if isinstance(u, Seq):
            head = u.left
            if isinstance(head, (Act, Silent)) or (guards and isinstance(head, Guard)):
                return basic(u.right)
            if par and is_chain(head):
                return basic(u.right)
            return False
        if par and isinstance(u, LeftMerge):
            return basic(u.left) and basic(u.right)
        if par and guards and isinstance(u, Par):
            return basic(u.left) and basic(u.right)
        return False

    return basic(t)
