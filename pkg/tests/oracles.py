"""Independent brute-force oracles used to freeze expected values.

Everything here enumerates; nothing shares search code with the package.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np

from homspace.space import FiniteMetricSpace


def brute_packing(space: FiniteMetricSpace, epsilon) -> int:
    """Max subset with all pairwise distances > epsilon, by subset enumeration."""
    n = space.n
    d = space.dist
    for k in range(n, 0, -1):
        for sub in itertools.combinations(range(n), k):
            if all(d[a][b] > epsilon for a, b in itertools.combinations(sub, 2)):
                return k
    return 0


def brute_covering(space: FiniteMetricSpace, epsilon) -> int:
    """Min number of closed epsilon-balls covering the space, by enumeration."""
    n = space.n
    d = space.dist
    for k in range(1, n + 1):
        for centers in itertools.combinations(range(n), k):
            if all(any(d[c][p] <= epsilon for c in centers) for p in range(n)):
                return k
    raise AssertionError("unreachable: all points cover themselves")


def brute_isometries(space: FiniteMetricSpace) -> list[tuple]:
    """All distance-preserving permutations, filtered from n! candidates."""
    codes = space.code_matrix()
    n = space.n
    found = []
    for p in itertools.permutations(range(n)):
        ok = True
        for i in range(n):
            for j in range(i + 1, n):
                if codes[p[i]][p[j]] != codes[i][j]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            found.append(p)
    return sorted(found)


def brute_distance_transitive(space: FiniteMetricSpace, elements) -> bool:
    """Distance transitivity decided with an explicit full element list."""
    n = space.n
    codes = space.code_matrix()
    orbit_id = {}
    for i in range(n):
        for j in range(n):
            if (i, j) in orbit_id:
                continue
            marker = (i, j)
            for g in elements:
                orbit_id[(g[i], g[j])] = marker
    classes = {}
    for i in range(n):
        for j in range(n):
            classes.setdefault(int(codes[i][j]), set()).add(orbit_id[(i, j)])
    return all(len(v) == 1 for v in classes.values())


def gh_exhaustive(X: FiniteMetricSpace, Y: FiniteMetricSpace):
    """GH distance by exhaustive enumeration of all function-pair
    correspondences (graph of f: X->Y union transposed graph of g: Y->X),
    evaluated on exact ranks of the |d_X - d_Y| value set."""
    nx, ny = X.n, Y.n
    vx, vy = X.distance_values(), Y.distance_values()
    diffs = sorted({abs(a - b) for a in vx for b in vy})
    rank = {v: i for i, v in enumerate(diffs)}
    crk = np.array([[rank[abs(a - b)] for b in vy] for a in vx], dtype=np.int32)
    CX, CY = X.code_matrix(), Y.code_matrix()
    F = np.array(list(itertools.product(range(ny), repeat=nx)), dtype=np.int64)
    G = np.array(list(itertools.product(range(nx), repeat=ny)), dtype=np.int64)
    disF = np.zeros(len(F), dtype=np.int32)
    for i in range(nx):
        for j in range(i + 1, nx):
            disF = np.maximum(disF, crk[CX[i, j], CY[F[:, i], F[:, j]]])
    disG = np.zeros(len(G), dtype=np.int32)
    for i in range(ny):
        for j in range(i + 1, ny):
            disG = np.maximum(disG, crk[CX[G[:, i], G[:, j]], CY[i, j]])
    # cross[f, y, v] = worst rank of pairing (x, f(x)) against (v, y) over x
    cross_tab = np.zeros((len(F), ny, nx), dtype=np.int32)
    for y in range(ny):
        for v in range(nx):
            m = np.zeros(len(F), dtype=np.int32)
            for x in range(nx):
                m = np.maximum(m, crk[CX[x, v], CY[F[:, x], y]])
            cross_tab[:, y, v] = m
    best = None
    for gi in range(len(G)):
        cross = np.zeros(len(F), dtype=np.int32)
        for y in range(ny):
            cross = np.maximum(cross, cross_tab[:, y, G[gi, y]])
        total = np.maximum(np.maximum(disF, cross), disG[gi])
        m = int(total.min())
        if best is None or m < best:
            best = m
    return diffs[best] / 2


def brute_girth_hops(n: int, edges) -> float:
    """Shortest simple cycle length in hops, by DFS cycle enumeration."""
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    best = float("inf")

    def walk(start, current, prev, depth, visited):
        nonlocal best
        for nxt in adj[current]:
            if nxt == prev:
                continue
            if nxt == start and depth >= 3:
                best = min(best, depth)
            elif nxt > start and nxt not in visited and depth + 1 < best:
                visited.add(nxt)
                walk(start, nxt, current, depth + 1, visited)
                visited.discard(nxt)

    for s in range(n):
        walk(s, s, -1, 1, {s})
    return best


def random_exact_space(rng: random.Random, n: int) -> FiniteMetricSpace:
    """Random rational distances repaired into a metric by shortest paths."""
    d = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = Fraction(rng.randint(20, 100), 40)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[j][i] = d[i][k] + d[k][j]
    return FiniteMetricSpace(d, mode="exact", provenance=f"random_metric(n={n})")


def random_linf_space(rng: random.Random, n: int, denom: int = 64) -> FiniteMetricSpace:
    """Random rational points in the unit square under the L-infinity metric."""
    while True:
        pts = [(Fraction(rng.randrange(denom + 1), denom),
                Fraction(rng.randrange(denom + 1), denom)) for _ in range(n)]
        if len(set(pts)) == n:
            break
    dist = [[max(abs(a[0] - b[0]), abs(a[1] - b[1])) for b in pts] for a in pts]
    return FiniteMetricSpace(dist, mode="exact", provenance=f"random_linf(n={n})")
