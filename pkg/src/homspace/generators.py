"""Generators for finite homogeneous spaces and graph-derived metrics."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .groups import FiniteGroup, cyclic_group, direct_product, symmetric_group
from .models import SolenoidTruncation, sphere_points_space
from .space import FiniteMetricSpace, as_exact, sup_product


@dataclass
class GraphSpace:
    """A scaled shortest-path metric together with its edge list."""

    space: FiniteMetricSpace
    edges: tuple
    scale: Fraction

    @property
    def n(self) -> int:
        return self.space.n


def graph_space(n: int, edges, scale=1, provenance: str = "") -> GraphSpace:
    """Scaled hop metric of a connected undirected graph."""
    factor = as_exact(scale)
    if factor <= 0:
        raise ValueError("scale must be positive")
    edges = tuple(sorted((min(u, v), max(u, v)) for u, v in edges))
    adj = [[] for _ in range(n)]
    for u, v in edges:
        if u == v:
            raise ValueError("self loops not allowed")
        adj[u].append(v)
        adj[v].append(u)
    hops = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        hops[s, s] = 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for v in adj[u]:
                if hops[s, v] < 0:
                    hops[s, v] = hops[s, u] + 1
                    dq.append(v)
    if (hops < 0).any():
        comp = [i for i in range(n) if hops[0, i] >= 0]
        raise ValueError(f"graph is disconnected; component of 0 is {comp}")
    dist = [[int(hops[i, j]) * factor for j in range(n)] for i in range(n)]
    space = FiniteMetricSpace(dist, mode="exact", provenance=provenance or f"graph(n={n})")
    return GraphSpace(space, edges, factor)


def cycle_space(n: int, scale=1) -> GraphSpace:
    """The n-cycle with its shortest-path metric times scale.

    With scale 1/n this is the set of n-th roots of unity inside the
    circumference-1 circle, exactly (rational arithmetic).
    """
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    factor = as_exact(scale)
    if factor <= 0:
        raise ValueError("scale must be positive")
    hop = [min(k, n - k) for k in range(n)]
    per = [hop[k] * factor for k in range(n)]
    dist = [[per[(i - j) % n] for j in range(n)] for i in range(n)]
    space = FiniteMetricSpace(dist, mode="exact", provenance=f"cycle(n={n}, scale={factor})")
    edges = tuple((i, (i + 1) % n) if i < (i + 1) % n else ((i + 1) % n, i) for i in range(n))
    return GraphSpace(space, tuple(sorted(edges)), factor)


def cayley_space(group: FiniteGroup, generators, scale=1) -> GraphSpace:
    """Cayley graph word metric of a finite group, times scale.

    Generators must be symmetric (closed under inverse) and generate the
    group; the output is vertex-transitive by construction (left translations
    are isometries).
    """
    gens = sorted(set(int(g) for g in generators))
    if not gens:
        raise ValueError("need at least one generator")
    for g in gens:
        if not 0 <= g < group.n:
            raise ValueError(f"generator {g} out of range")
        if g == group.identity:
            raise ValueError("identity cannot be a generator")
        if group.inv(g) not in gens:
            raise ValueError(f"generator set not symmetric: inverse of {g} missing")
    # word length from the identity by BFS, then translate
    wl = [-1] * group.n
    wl[group.identity] = 0
    dq = deque([group.identity])
    while dq:
        u = dq.popleft()
        for g in gens:
            v = group.mul(u, g)
            if wl[v] < 0:
                wl[v] = wl[u] + 1
                dq.append(v)
    unreached = [x for x in range(group.n) if wl[x] < 0]
    if unreached:
        raise ValueError(f"generators do not generate the group; unreached elements {unreached[:10]}")
    factor = as_exact(scale)
    if factor <= 0:
        raise ValueError("scale must be positive")
    per = [wl[x] * factor for x in range(group.n)]
    dist = [[per[group.mul(group.inv(a), b)] for b in range(group.n)] for a in range(group.n)]
    labels = list(group.element_names) if group.element_names else None
    space = FiniteMetricSpace(dist, labels=labels, mode="exact",
                              provenance=f"cayley({group.name}, gens={gens}, scale={factor})")
    edges = tuple(sorted({(min(a, group.mul(a, g)), max(a, group.mul(a, g)))
                          for a in range(group.n) for g in gens}))
    return GraphSpace(space, edges, factor)


def torus_grid(d: int, m: int, circumferences) -> FiniteMetricSpace:
    """The subgroup (Z_m)^d of the d-torus with the sup-of-arcs metric.

    Equals the sup product of d cycles with scales C_j / m.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if m < 3:
        raise ValueError("need m >= 3 points per factor")
    cs = [as_exact(c) for c in circumferences]
    if len(cs) != d:
        raise ValueError("need one circumference per dimension")
    factors = [cycle_space(m, c / m).space for c in cs]
    out = sup_product(factors) if d > 1 else factors[0]
    out.provenance = f"torus_grid(d={d}, m={m}, C={tuple(map(str, cs))})"
    return out


def solenoid_approximant(depth: int, n: int) -> FiniteMetricSpace:
    """Cyclic approximant of the depth-K solenoid truncation (factorial tower).

    Z_n embeds through the deepest level: element k sits at arc position
    k * (K!/j!) / n mod 1 on level j, so consecutive levels are linked exactly
    by the power maps. Requires K! | n.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    model = SolenoidTruncation.factorial(depth)
    deepest = model.levels[-1]
    if n % deepest != 0:
        raise ValueError(f"n={n} must be a multiple of lcm of the level orders, {deepest}")
    per = [model.distance(Fraction(k, n), Fraction(0)) for k in range(n)]
    dist = [[per[(i - j) % n] for j in range(n)] for i in range(n)]
    return FiniteMetricSpace(dist, mode="exact", provenance=f"solenoid(depth={depth}, n={n})")


def solenoid_points(depth: int, n: int):
    """Deepest-level coordinates of the approximant inside the truncation."""
    return [Fraction(k, n) for k in range(n)]


# -- polyhedra ----------------------------------------------------------------

_PHI = (1 + math.sqrt(5)) / 2


def _signs(vec, pattern):
    out = []
    for signs in itertools.product(*[[-1, 1] if p else [1] for p in pattern]):
        out.append(tuple(s * x for s, x in zip(signs, vec)))
    return out


def _cyclic(vecs):
    out = []
    for v in vecs:
        for shift in range(3):
            out.append((v[shift], v[(shift + 1) % 3], v[(shift + 2) % 3]))
    return out


def _polyhedron_coords(name: str) -> list[tuple[float, float, float]]:
    phi = _PHI
    if name == "tetrahedron":
        return [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    if name == "octahedron":
        return _cyclic(_signs((1, 0, 0), (True, False, False)))
    if name == "cube":
        return _signs((1, 1, 1), (True, True, True))
    if name == "icosahedron":
        return _cyclic(_signs((0, 1, phi), (False, True, True)))
    if name == "dodecahedron":
        return _signs((1, 1, 1), (True, True, True)) + _cyclic(
            _signs((0, 1 / phi, phi), (False, True, True)))
    if name == "cuboctahedron":
        return _cyclic(_signs((1, 1, 0), (True, True, False)))
    if name == "icosidodecahedron":
        return _cyclic(_signs((0, 0, phi), (False, False, True))) + _cyclic(
            _signs((0.5, phi / 2, phi * phi / 2), (True, True, True)))
    if name == "truncated_icosahedron":
        return (_cyclic(_signs((0, 1, 3 * phi), (False, True, True)))
                + _cyclic(_signs((1, 2 + phi, 2 * phi), (True, True, True)))
                + _cyclic(_signs((phi, 2, 2 * phi + 1), (True, True, True))))
    raise ValueError(f"unknown polyhedron {name!r}")


ARCHIMEDEAN_NAMES = ("tetrahedron", "octahedron", "cube", "icosahedron", "dodecahedron",
                     "cuboctahedron", "icosidodecahedron", "truncated_icosahedron")


def archimedean_vertices(name: str, check_homogeneous: bool = True):
    """Vertex set of a Platonic or Archimedean solid on the unit sphere with
    the great-circle metric. Vertex transitivity is verified post-construction.

    Returns (space, coords).
    """
    coords = np.array(sorted(set(_polyhedron_coords(name))), dtype=float)
    norms = np.linalg.norm(coords, axis=1)
    coords = coords / norms[:, None]
    assert np.all(np.abs(np.linalg.norm(coords, axis=1) - 1.0) <= 1e-9)
    space = sphere_points_space(coords, 1.0, provenance=f"archimedean({name})")
    if check_homogeneous:
        from .isometry import is_homogeneous

        if is_homogeneous(space) is not True:
            raise RuntimeError(f"{name} vertex space failed the homogeneity check")
    return space, coords


# -- girth ---------------------------------------------------------------------


def girth(g: GraphSpace):
    """Length of the shortest simple cycle, times the scale; inf for forests."""
    n = g.n
    adj = [[] for _ in range(n)]
    for u, v in g.edges:
        adj[u].append(v)
        adj[v].append(u)
    best = None
    for s in range(n):
        depth = [-1] * n
        parent = [-1] * n
        depth[s] = 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            if best is not None and 2 * depth[u] >= best:
                continue
            for v in adj[u]:
                if depth[v] < 0:
                    depth[v] = depth[u] + 1
                    parent[v] = u
                    dq.append(v)
                elif v != parent[u]:
                    cycle = depth[u] + depth[v] + 1
                    if best is None or cycle < best:
                        best = cycle
    if best is None:
        return math.inf
    return best * g.scale


# -- catalogues -----------------------------------------------------------------


def small_catalogue() -> list[tuple[str, FiniteMetricSpace]]:
    """Twelve exact-mode spaces with at most 6 points, used across the tests."""
    two = FiniteMetricSpace([[0, 1], [1, 0]], provenance="pair(d=1)")
    two_short = FiniteMetricSpace([[0, Fraction(3, 5)], [Fraction(3, 5), 0]], provenance="pair(d=3/5)")
    point = FiniteMetricSpace([[0]], provenance="point")
    path3 = graph_space(3, [(0, 1), (1, 2)], 1, provenance="path3").space
    c6 = cycle_space(6, Fraction(1, 6)).space
    entries = [
        ("point", point),
        ("pair", two),
        ("pair_short", two_short),
        ("path3", path3),
        ("triangle", cycle_space(3, Fraction(1, 3)).space),
        ("c4", cycle_space(4, Fraction(1, 4)).space),
        ("c5", cycle_space(5, Fraction(1, 5)).space),
        ("c6", c6),
        ("pair_product", sup_product([two, two_short])),
        ("z2xz2", cayley_space(direct_product(cyclic_group(2), cyclic_group(2)), [1, 2], 1).space),
        ("s3", cayley_space(symmetric_group(3), [1, 2], 1).space),
        ("c6_antipodal_quotient", _c6_quotient(c6)),
    ]
    return entries


def _c6_quotient(c6: FiniteMetricSpace) -> FiniteMetricSpace:
    from .space import quotient_by_partition

    return quotient_by_partition(c6, [(0, 3), (1, 4), (2, 5)])


def catalogue(max_points: int = 12) -> list[tuple[str, FiniteMetricSpace]]:
    """Small catalogue plus a few larger structured spaces, capped by size."""
    entries = list(small_catalogue())
    extras = [
        ("c8", cycle_space(8, Fraction(1, 8)).space),
        ("cube_graph", cayley_space(
            direct_product(direct_product(cyclic_group(2), cyclic_group(2)), cyclic_group(2)),
            [1, 2, 4], Fraction(1, 3)).space),
        ("c12", cycle_space(12, Fraction(1, 12)).space),
        ("c4xc4", sup_product([cycle_space(4, Fraction(1, 4)).space] * 2)),
        ("solenoid_d2_n4", solenoid_approximant(2, 4)),
    ]
    entries.extend(extras)
    return [(name, s) for name, s in entries if s.n <= max_points]
