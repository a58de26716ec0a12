"""Compare the compiled and pure-Python moment kernels.

Times moment-layout construction (the canonicalization of every upper-triangle
entry) and raw word products on a few graphs.  Run from the repo root::

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
from __future__ import annotations

import argparse
import random
import time

from momenta import kernels
from momenta.algebra import _context
from momenta.graph import CommutationGraph
from momenta.moments import build_full_index_set, build_layout, build_theta_index_set


def cycle(n):
    return CommutationGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], name=f"C{n}")


def qutrit_ring(n):
    return CommutationGraph.from_weights(n, 3, {(i, (i + 1) % n): 1 for i in range(n - 1)},
                                         name=f"W{n}d3")


def cases():
    yield "theta3 C7", cycle(7), build_theta_index_set(cycle(7), 3)
    yield "nu2 C7", cycle(7), build_full_index_set(cycle(7), 2)
    yield "nu3 C5", cycle(5), build_full_index_set(cycle(5), 3)
    g = qutrit_ring(4)
    yield "nu2 W4 d=3", g, build_full_index_set(g, 2)


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def bench_words(backend, g, pairs):
    mod = kernels.get(backend)
    exps, n, d2, herm = _context(g)
    for a, b in pairs:
        mod.word_mul(a, b, exps, n, d2, herm)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    if len(backends) == 1:
        print("compiled kernels not built; timing the Python fallback only")

    print(f"{'case':<14} {'size':>6} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for name, g, idx in cases():
        times = [best_of(lambda: build_layout(idx, g, backend=b), args.repeat) for b in backends]
        ratio = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else ""
        print(f"{name:<14} {len(idx):>6} " + " ".join(f"{t:10.4f}" for t in times) + f"   {ratio}")

    rng = random.Random(0)
    g = cycle(7)
    words = [tuple((i, 1) for i in sorted(rng.sample(range(7), rng.randint(1, 5))))
             for _ in range(400)]
    pairs = [(rng.choice(words), rng.choice(words)) for _ in range(50000)]
    times = [best_of(lambda: bench_words(b, g, pairs), args.repeat) for b in backends]
    ratio = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else ""
    print(f"{'word_mul C7':<14} {len(pairs):>6} " + " ".join(f"{t:10.4f}" for t in times)
          + f"   {ratio}")


if __name__ == "__main__":
    main()
