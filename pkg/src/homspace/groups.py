"""Finite groups as explicit multiplication tables."""

from __future__ import annotations

import itertools


class FiniteGroup:
    """A finite group on elements 0..n-1 given by its multiplication table.

    ``table[a][b]`` is the index of the product a*b. The identity and inverse
    table are derived; associativity is checked for small groups on request.
    """

    __slots__ = ("n", "table", "identity", "inverse", "name", "element_names")

    def __init__(self, table, name: str = "", element_names=None, check: bool = True):
        table = tuple(tuple(row) for row in table)
        n = len(table)
        if any(len(r) != n for r in table):
            raise ValueError("multiplication table must be square")
        ident = None
        for e in range(n):
            if all(table[e][x] == x and table[x][e] == x for x in range(n)):
                ident = e
                break
        if ident is None:
            raise ValueError("table has no identity element")
        inverse = [None] * n
        for a in range(n):
            for b in range(n):
                if table[a][b] == ident and table[b][a] == ident:
                    inverse[a] = b
                    break
            if inverse[a] is None:
                raise ValueError(f"element {a} has no inverse")
        if check and n <= 64:
            for a, b, c in itertools.product(range(n), repeat=3):
                if table[table[a][b]][c] != table[a][table[b][c]]:
                    raise ValueError(f"table is not associative at ({a},{b},{c})")
        self.n = n
        self.table = table
        self.identity = ident
        self.inverse = tuple(inverse)
        self.name = name or f"group{n}"
        self.element_names = tuple(element_names) if element_names else None

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    @property
    def order(self) -> int:
        return self.n

    def is_abelian(self) -> bool:
        return all(self.table[a][b] == self.table[b][a]
                   for a in range(self.n) for b in range(a + 1, self.n))

    def __repr__(self):
        return f"<FiniteGroup {self.name} order={self.n}>"


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group needs order >= 1")
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return FiniteGroup(table, name=f"Z{n}", check=False)


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    pairs = list(itertools.product(range(g.n), range(h.n)))
    index = {p: i for i, p in enumerate(pairs)}
    table = [[index[(g.mul(a1, b1), h.mul(a2, b2))] for (b1, b2) in pairs] for (a1, a2) in pairs]
    return FiniteGroup(table, name=f"{g.name}x{h.name}", check=False)


def symmetric_group(k: int) -> FiniteGroup:
    """S_k on the k! permutations of range(k), enumerated lexicographically."""
    if not 1 <= k <= 6:
        raise ValueError("symmetric_group supports 1 <= k <= 6")
    perms = list(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    # product = apply q first, then p
    table = [[index[tuple(p[q[x]] for x in range(k))] for q in perms] for p in perms]
    names = ["".join(map(str, p)) for p in perms]
    return FiniteGroup(table, name=f"S{k}", element_names=names, check=False)


def group_from_permutations(perms) -> tuple[FiniteGroup, list[tuple[int, ...]]]:
    """Close a set of permutations under composition and return the resulting
    group table together with the element list (identity first, then sorted)."""
    perms = [tuple(p) for p in perms]
    if not perms:
        raise ValueError("need at least one permutation")
    deg = len(perms[0])
    ident = tuple(range(deg))
    elements = {ident}
    frontier = [p for p in perms if p not in elements]
    elements.update(frontier)
    while frontier:
        nxt = []
        for p in frontier:
            for q in list(elements):
                for r in (tuple(p[q[i]] for i in range(deg)), tuple(q[p[i]] for i in range(deg))):
                    if r not in elements:
                        elements.add(r)
                        nxt.append(r)
        frontier = nxt
        if len(elements) > 500_000:
            raise RuntimeError("permutation closure exceeds size cap")
    ordered = [ident] + sorted(elements - {ident})
    index = {p: i for i, p in enumerate(ordered)}
    table = [[index[tuple(p[q[i]] for i in range(deg))] for q in ordered] for p in ordered]
    return FiniteGroup(table, name=f"perm{len(ordered)}", check=False), ordered
