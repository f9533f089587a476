"""Slow, obviously-correct reference implementations used by the tests.

None of these share code with the package beyond the data types.
"""

from itertools import combinations

from artifact.syntax import Act, Alt, One, Seq, Star, Zero


def gfp_bisim(l1, l2):
    """Naive greatest fixpoint of step bisimulation on the disjoint union."""
    s1 = {u: [] for u in range(l1.n)}
    s2 = {v: [] for v in range(l2.n)}
    for a, lab, b in l1.trans:
        s1[a].append((lab, b))
    for a, lab, b in l2.trans:
        s2[a].append((lab, b))
    rel = {(u, v) for u in s1 for v in s2
           if (u in l1.terminating) == (v in l2.terminating)}
    changed = True
    while changed:
        changed = False
        for u, v in list(rel):
            fwd = all(any(m == lab and (x, y) in rel for m, y in s2[v]) for lab, x in s1[u])
            bwd = all(any(m == lab and (x, y) in rel for m, x in s1[u]) for lab, y in s2[v])
            if not (fwd and bwd):
                rel.discard((u, v))
                changed = True
    return (l1.initial, l2.initial) in rel


def matches(t, w):
    """Backtracking regex membership over the term representation."""
    return len(w) in _ends(t, w, 0)


def _ends(t, w, i):
    if isinstance(t, Zero):
        return set()
    if isinstance(t, One):
        return {i}
    if isinstance(t, Act):
        return {i + 1} if i < len(w) and w[i] == t.name else set()
    if isinstance(t, Alt):
        return _ends(t.children[0], w, i) | _ends(t.children[1], w, i)
    if isinstance(t, Seq):
        out = set()
        for j in _ends(t.children[0], w, i):
            out |= _ends(t.children[1], w, j)
        return out
    if isinstance(t, Star):
        seen = {i}
        todo = [i]
        while todo:
            j = todo.pop()
            for k in _ends(t.children[0], w, j):
                if k not in seen:
                    seen.add(k)
                    todo.append(k)
        return seen
    raise TypeError(type(t).__name__)


def all_words(alphabet, n):
    out = [""]
    layer = [""]
    for _ in range(n):
        layer = [w + a for w in layer for a in alphabet]
        out += layer
    return out


def language(t, alphabet, n):
    return frozenset(w for w in all_words(alphabet, n) if matches(t, w))


def powerset_configurations(pes):
    """All conflict-free, causally closed subsets of the live events."""
    evs = [e for e in pes.events if e not in pes.blocked]
    out = set()
    for k in range(len(evs) + 1):
        for c in combinations(evs, k):
            cs = set(c)
            if any(pes.conflicts(a, b) for a, b in combinations(c, 2)):
                continue
            if any(pes.before(p, e) and p not in cs for e in c for p in pes.events):
                continue
            out.add(frozenset(c))
    return out


def rewrite_closure(t, sig=None, limit=5000):
    """Every term reachable by single rule applications at any position.

    Returns the set of AC-canonical normal forms found. Raises if the
    reachable set exceeds ``limit`` terms.
    """
    from artifact.rewrite import MANUAL_ONLY, RULE_INDEX, TAU_LAWS, RewriteError, apply_rule
    from artifact.syntax import ac_canon, subterms

    rules = [(name, head) for name, (rid, head, _) in RULE_INDEX.items()
             if rid.table != "GUARD" and name not in MANUAL_ONLY | TAU_LAWS]
    start = ac_canon(t)
    seen = {start}
    todo = [start]
    normal = set()
    while todo:
        u = todo.pop()
        moved = False
        for path, sub in subterms(u):
            for r, head in rules:
                if not isinstance(sub, head):
                    continue
                try:
                    v = ac_canon(apply_rule(u, r, path, sig))
                except RewriteError:
                    continue
                moved = True
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
                    if len(seen) > limit:
                        raise RuntimeError("rewrite closure too large")
        if not moved:
            normal.add(u)
    return normal
