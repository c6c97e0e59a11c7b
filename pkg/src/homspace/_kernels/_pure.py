"""Pure-Python maximum-clique kernel (bitset branch and bound).

Reference implementation; the compiled twin in ``_cliquer.pyx`` follows the
same search order and must return identical results on identical inputs.
"""

from __future__ import annotations

import sys

import numpy as np

BACKEND = "pure"


def _pack_masks(adj: np.ndarray) -> list[int]:
    n = adj.shape[0]
    packed = np.packbits(adj.astype(np.uint8), axis=1, bitorder="little")
    return [int.from_bytes(packed[i].tobytes(), "little") for i in range(n)]


def max_clique(adj: np.ndarray, budget: int | None = None) -> tuple[list[int], bool, int]:
    """Largest clique of the graph given as a boolean adjacency matrix.

    Returns (members, complete, nodes). ``complete`` is False when the node
    budget ran out; ``members`` is then the best clique found so far, still a
    valid lower bound.
    """
    n = int(adj.shape[0])
    if n == 0:
        return [], True, 0
    neighbors = _pack_masks(adj)

    best: list[int] = []
    cur: list[int] = []
    nodes = 0
    complete = True

    def expand(P: int) -> None:
        nonlocal nodes, best, complete
        if not complete:
            return
        # greedy coloring of P: color classes give per-vertex upper bounds
        order: list[int] = []
        bounds: list[int] = []
        color = 0
        rest = P
        while rest:
            color += 1
            avail = rest
            while avail:
                v = (avail & -avail).bit_length() - 1
                avail &= avail - 1
                avail &= ~neighbors[v]
                rest &= ~(1 << v)
                order.append(v)
                bounds.append(color)
        for idx in range(len(order) - 1, -1, -1):
            if len(cur) + bounds[idx] <= len(best):
                return
            v = order[idx]
            nodes += 1
            if budget is not None and nodes > budget:
                complete = False
                return
            cur.append(v)
            P2 = P & neighbors[v]
            if P2:
                expand(P2)
                if not complete:
                    cur.pop()
                    return
            elif len(cur) > len(best):
                best = list(cur)
            cur.pop()
            P &= ~(1 << v)

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, n + 100))
    try:
        expand((1 << n) - 1)
    finally:
        sys.setrecursionlimit(old_limit)
    return sorted(best), complete, nodes
