# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled signature refinement kernel (same contract as _refine_py.refine)."""


def refine(int n, src, lab, dst, init):
    cdef int m = len(src)
    cdef int i, u, count, b
    cdef list out = [[] for _ in range(n)]
    cdef list block, nxt, history
    cdef dict table, seen
    for i in range(m):
        out[<int>src[i]].append((<int>lab[i], <int>dst[i]))
    seen = {}
    block = [seen.setdefault(x, len(seen)) for x in init]
    history = [block]
    count = len(seen)
    while True:
        table = {}
        nxt = [0] * n
        for u in range(n):
            row = out[u]
            sig = (block[u], frozenset([(e[0], block[e[1]]) for e in row]))
            b = table.get(sig, -1)
            if b < 0:
                b = len(table)
                table[sig] = b
            nxt[u] = b
        history.append(nxt)
        if len(table) == count:
            return history
        count = len(table)
        block = nxt
