"""Benchmark the compiled max-clique kernel against the pure-Python fallback.

The clique search is the hot inner loop behind every packing number. Run:

    python benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Both backends run the same branch-and-bound in the same order, so results are
checked for equality while timing.
"""

from __future__ import annotations

import argparse
import json
import random
import time
from fractions import Fraction

import numpy as np

from homspace._kernels import _pure

try:
    from homspace._kernels import _cliquer
except ImportError:  # pragma: no cover
    _cliquer = None

from homspace.generators import cycle_space, torus_grid
from homspace.space import _threshold_code


def packing_adjacency(space, eps) -> np.ndarray:
    return np.asarray(space.code_matrix() >= _threshold_code(space, eps))


def random_geometric(rng: random.Random, n: int, threshold: float) -> np.ndarray:
    pts = [(rng.random(), rng.random()) for _ in range(n)]
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            d = ((pts[i][0] - pts[j][0]) ** 2 + (pts[i][1] - pts[j][1]) ** 2) ** 0.5
            if d > threshold:
                adj[i, j] = adj[j, i] = True
    return adj


def workloads():
    rng = random.Random(20240601)
    for n in (200, 500, 1000):
        space = cycle_space(n, Fraction(1, n)).space
        yield f"cycle_packing(n={n}, eps=0.1)", packing_adjacency(space, 0.1)
    grid = torus_grid(2, 12, [1, 1])
    yield "torus_grid_packing(12x12, eps=0.15)", packing_adjacency(grid, 0.15)
    for n, thr in ((120, 0.35), (200, 0.3)):
        yield f"random_geometric(n={n}, thr={thr})", random_geometric(rng, n, thr)


def bench(fn, adj, repeat: int):
    best = None
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(adj, None)
        dt = time.perf_counter() - t0
        best = dt if best is None or dt < best else best
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", help="write results to this file")
    args = parser.parse_args()

    rows = []
    header = f"{'workload':42s} {'clique':>6s} {'pure (s)':>10s} {'cython (s)':>11s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, adj in workloads():
        t_pure, r_pure = bench(_pure.max_clique, adj, args.repeat)
        if _cliquer is not None:
            t_fast, r_fast = bench(_cliquer.max_clique, adj, args.repeat)
            assert r_pure == r_fast, f"backend mismatch on {name}"
            speedup = t_pure / t_fast if t_fast > 0 else float("inf")
            print(f"{name:42s} {len(r_pure[0]):6d} {t_pure:10.4f} {t_fast:11.4f} {speedup:7.1f}x")
            rows.append({"workload": name, "clique": len(r_pure[0]),
                         "pure_s": t_pure, "cython_s": t_fast, "speedup": speedup})
        else:
            print(f"{name:42s} {len(r_pure[0]):6d} {t_pure:10.4f} {'n/a':>11s} {'n/a':>8s}")
            rows.append({"workload": name, "clique": len(r_pure[0]), "pure_s": t_pure})
    if _cliquer is None:
        print("\ncompiled kernel not built; rerun after `pip install -e . --no-build-isolation`")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
