"""Pure-Python signature refinement, used when the compiled kernel is absent."""


def refine(n, src, lab, dst, init):
    """Refine ``init`` until every block is stable under (label, block) signatures.

    Returns the list of partitions, one per round; the last is the coarsest
    stable refinement.  Block numbers are assigned in order of first
    appearance so the output is deterministic.
    """
    out = [[] for _ in range(n)]
    for s, l, d in zip(src, lab, dst):
        out[s].append((l, d))
    block = _renumber(list(init))
    history = [block]
    count = len(set(block))
    while True:
        table = {}
        nxt = [0] * n
        for u in range(n):
            sig = (block[u], frozenset((l, block[d]) for l, d in out[u]))
            b = table.get(sig)
            if b is None:
                b = table[sig] = len(table)
            nxt[u] = b
        history.append(nxt)
        if len(table) == count:
            return history
        count = len(table)
        block = nxt


def _renumber(xs):
    seen = {}
    return [seen.setdefault(x, len(seen)) for x in xs]
