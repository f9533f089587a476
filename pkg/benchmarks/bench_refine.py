"""Compare the compiled and pure-Python refinement kernels on random LTSs.

    python3 benchmarks/bench_refine.py --states 2000 --labels 3 --runs 5
"""

import argparse
import random
import time

from artifact import _refine_py

try:
    from artifact import _refine
except ImportError:
    _refine = None


def random_graph(rng, n, labels, degree):
    src, lab, dst = [], [], []
    for u in range(n):
        for _ in range(degree):
            src.append(u)
            lab.append(rng.randrange(labels))
            dst.append(rng.randrange(n))
    init = [rng.randrange(2) for _ in range(n)]
    return src, lab, dst, init


def timeit(fn, n, graph, runs):
    best = float("inf")
    for _ in range(runs):
        t = time.perf_counter()
        res = fn(n, *graph)
        best = min(best, time.perf_counter() - t)
    return best, res


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--states", type=int, default=2000)
    ap.add_argument("--labels", type=int, default=3)
    ap.add_argument("--degree", type=int, default=3)
    ap.add_argument("--runs", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    g = random_graph(random.Random(a.seed), a.states, a.labels, a.degree)
    tp, rp = timeit(_refine_py.refine, a.states, g, a.runs)
    print(f"python kernel: {tp * 1000:.1f} ms, {len(rp) - 1} rounds, {len(set(rp[-1]))} blocks")
    if _refine is None:
        print("compiled kernel not built")
        return
    tc, rc = timeit(_refine.refine, a.states, g, a.runs)
    assert rc == rp, "kernels disagree"
    print(f"cython kernel: {tc * 1000:.1f} ms, speedup {tp / tc:.2f}x")


if __name__ == "__main__":
    main()
