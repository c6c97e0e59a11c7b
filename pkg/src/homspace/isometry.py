"""Exact isometry groups of finite metric spaces, transitivity predicates and
the sup-displacement group metric.

The search refines points by distance-profile invariants and then builds a
stabilizer chain. At each level a backtracking search looks for isometries
sending the base point to each admissible image, but once an image is reachable
by composing already-found elements the search for it is skipped and its coset
representative is derived instead (Schreier-style orbit pruning), so highly
symmetric spaces cost only a handful of searches. Candidate permutations found
by the (anchor-bounded, hence over-permissive) backtracking are verified
against the full code matrix before being accepted; a search that exhausts its
candidates therefore proves no isometry was missed. If the node budget runs
out the result carries ``complete=False`` and downstream predicates report
indeterminate (None).
"""

from __future__ import annotations

import sys
from collections import namedtuple
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .space import FiniteMetricSpace, packing_number

DEFAULT_NODE_BUDGET = 5_000_000
GENERATOR_PRUNE_CAP = 100_000
_ANCHOR_CAP = 4
_PROBE_WINDOW = 4


class IncompleteSearchError(RuntimeError):
    """An operation required a complete isometry group but got a partial one."""


@dataclass
class IsometryGroup:
    """A group of distance-preserving permutations of a finite space.

    ``full`` records whether this is the whole isometry group as opposed to a
    declared subgroup; ``complete`` records whether the search that produced
    it ran to completion.
    """

    space: FiniteMetricSpace
    elements: tuple
    generators: tuple
    complete: bool
    full: bool

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self):
        return tuple(range(self.space.n))

    def __contains__(self, perm) -> bool:
        return tuple(perm) in self._element_set()

    def _element_set(self):
        s = getattr(self, "_eset", None)
        if s is None:
            s = frozenset(self.elements)
            object.__setattr__(self, "_eset", s)
        return s

    def to_finite_group(self):
        """Composition table of this group (elements indexed as stored)."""
        from .groups import FiniteGroup

        index = {p: i for i, p in enumerate(self.elements)}
        n = self.space.n
        table = [
            [index[tuple(p[q[i]] for i in range(n))] for q in self.elements]
            for p in self.elements
        ]
        return FiniteGroup(table, name=f"isom({self.space.provenance or 'space'})", check=False)


# -- search ------------------------------------------------------------------


class _BudgetExceeded(Exception):
    pass


def _dense_rank_rows(mat: np.ndarray) -> np.ndarray:
    _, inverse = np.unique(mat, axis=0, return_inverse=True)
    return inverse.astype(np.int64)


def _refine_colors(codes: np.ndarray) -> np.ndarray:
    """Iterated distance-profile refinement to a stable point partition."""
    colors = _dense_rank_rows(np.sort(codes, axis=1))
    ncodes = int(codes.max()) + 1
    while True:
        k_before = int(colors.max()) + 1
        composite = np.sort(colors[None, :] * ncodes + codes, axis=1)
        colors = _dense_rank_rows(np.hstack([colors[:, None], composite]))
        if int(colors.max()) + 1 == k_before:
            return colors


class _Searcher:
    """Backtracking completion search over an integer-coded distance matrix."""

    def __init__(self, codes: np.ndarray, budget: int):
        self.codes = codes
        self.n = codes.shape[0]
        self.budget = budget
        self.nodes = 0
        colors = _refine_colors(codes)
        classes: dict = {}
        for p in range(self.n):
            classes.setdefault(int(colors[p]), []).append(p)
        self.class_of = {p: frozenset(members) for members in classes.values() for p in members}
        self.rows = []
        for y in range(self.n):
            d: dict = {}
            for j in range(self.n):
                d.setdefault(int(codes[y][j]), []).append(j)
            self.rows.append({c: frozenset(js) for c, js in d.items()})

    def candidates(self, p: int, anchors, used) -> list[int]:
        """Images of p consistent with its refined class and the anchor subset
        of assigned points. A superset of the truth when anchors are capped."""
        sets = [self.class_of[p]]
        codes = self.codes
        for q, iq in anchors:
            s = self.rows[iq].get(int(codes[p][q]))
            if s is None:
                return []
            sets.append(s)
        base = min(sets, key=len)
        return [y for y in base if y not in used and all(y in s for s in sets if s is not base)]

    def _pick_anchors(self, trail):
        if len(trail) <= _ANCHOR_CAP:
            return trail
        return trail[:2] + trail[-2:]

    def find_isometry(self, seed: dict) -> tuple | None:
        """First full isometry extending ``seed``, or None when there is none.

        The tree uses capped anchor checks, so leaves are verified against the
        whole code matrix; exhausting the tree proves nonexistence.
        """
        n = self.n
        trail = list(seed.items())
        assigned = dict(seed)
        used = set(seed.values())

        def dfs() -> tuple | None:
            if len(assigned) == n:
                perm = np.array([assigned[i] for i in range(n)])
                if np.array_equal(self.codes[perm][:, perm], self.codes):
                    return tuple(int(x) for x in perm)
                return None
            anchors = self._pick_anchors(trail)
            best_p, best_c = None, None
            probed = 0
            for p in range(n):
                if p in assigned:
                    continue
                cands = self.candidates(p, anchors, used)
                if best_c is None or len(cands) < len(best_c):
                    best_p, best_c = p, cands
                probed += 1
                if probed >= _PROBE_WINDOW or len(best_c) <= 1:
                    break
            for y in sorted(best_c):
                self.nodes += 1
                if self.nodes > self.budget:
                    raise _BudgetExceeded
                assigned[best_p] = y
                used.add(y)
                trail.append((best_p, y))
                out = dfs()
                if out is not None:
                    return out
                trail.pop()
                used.discard(y)
                del assigned[best_p]
            return None

        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old_limit, n + 200))
        try:
            return dfs()
        finally:
            sys.setrecursionlimit(old_limit)


def _compose(p, q):
    return tuple(p[q[i]] for i in range(len(q)))


def _generated_set(gens, n: int) -> set:
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for s in frontier:
            for g in gens:
                p = _compose(g, s)
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
        frontier = nxt
    return seen


def _prune_generators(candidates, order: int, n: int) -> tuple:
    """Greedy-add a small generating set from the found representatives."""
    if order == 1:
        return ()
    if order > GENERATOR_PRUNE_CAP:
        return tuple(candidates)
    gens: list = []
    generated = {tuple(range(n))}
    for cand in candidates:
        if cand in generated:
            continue
        gens.append(cand)
        generated = _generated_set(gens, n)
        if len(generated) == order:
            break
    return tuple(gens)


def _bucket_codes(space: FiniteMetricSpace, tol: float) -> np.ndarray:
    flat = space.float_matrix().ravel()
    uniq, inverse = np.unique(flat, return_inverse=True)
    bucket = np.empty(len(uniq), dtype=np.int32)
    current = -1
    last = None
    for k, v in enumerate(uniq):
        if last is None or v - last > tol:
            current += 1
            last = float(v)
        bucket[k] = current
    return bucket[inverse].reshape(space.n, space.n).astype(np.int32)


def isometry_group(space: FiniteMetricSpace, tol: float | None = None,
                   node_budget: int = DEFAULT_NODE_BUDGET) -> IsometryGroup:
    """The full group of distance-preserving permutations of the space.

    In approximate mode, distances are bucketed (by the space tolerance, or
    ``tol`` when given) before the search so float noise cannot fracture true
    isometries.
    """
    cache_key = "isometry_group"
    if tol is None and cache_key in space._cache:
        return space._cache[cache_key]
    if tol is not None and not space.is_exact:
        codes = _bucket_codes(space, tol)
    else:
        codes = space.code_matrix()
    n = space.n
    searcher = _Searcher(codes, node_budget)
    ident = tuple(range(n))
    ident_arr = np.arange(n)

    chain: list = []  # per level: dict image -> representative (numpy array)
    prefix: dict = {}
    complete = True
    try:
        for b in range(n):
            reps = {b: ident_arr}
            level_gens: list = []

            def close_orbit():
                frontier = list(reps.keys())
                while frontier:
                    nxt = []
                    for x in frontier:
                        for g in level_gens:
                            y = int(g[x])
                            if y not in reps:
                                reps[y] = g[reps[x]]
                                nxt.append(y)
                    frontier = nxt

            anchors = list(prefix.items())[:_ANCHOR_CAP]
            prefix_arr = np.array(sorted(prefix), dtype=int)
            profile_b = codes[b, prefix_arr] if len(prefix_arr) else None
            for y in sorted(searcher.candidates(b, anchors, set(prefix.values()))):
                if y in reps:
                    continue
                if profile_b is not None and not np.array_equal(codes[y, prefix_arr], profile_b):
                    continue
                seed = dict(prefix)
                seed[b] = y
                found = searcher.find_isometry(seed)
                if found is not None:
                    g = np.array(found)
                    level_gens.append(g)
                    reps[y] = g
                    close_orbit()
            chain.append(reps)
            prefix[b] = b
    except _BudgetExceeded:
        complete = False

    if not complete:
        return IsometryGroup(space, (ident,), (), complete=False, full=True)

    order = 1
    for reps in chain:
        order *= len(reps)
    if order > 2_000_000:
        raise ValueError(f"isometry group of order {order} is too large to materialize")
    elements = np.array([ident_arr])
    for reps in reversed(chain):
        if len(reps) == 1:
            continue
        T = np.array([rep for _, rep in sorted(reps.items())])
        elements = T[:, elements].reshape(-1, n)
    elements = np.unique(elements, axis=0)
    element_tuples = tuple(tuple(int(x) for x in row) for row in elements)
    rep_candidates = sorted(
        tuple(int(x) for x in rep)
        for reps in chain
        for rep in reps.values()
        if not np.array_equal(rep, ident_arr)
    )
    generators = _prune_generators(rep_candidates, len(element_tuples), n)
    group = IsometryGroup(space, element_tuples, generators, complete=True, full=True)
    if tol is None:
        space._cache[cache_key] = group
    return group


def permutation_subgroup(space: FiniteMetricSpace, perms) -> IsometryGroup:
    """Close the given permutations under composition and wrap them as a
    declared (not necessarily full) group of verified isometries."""
    codes = space.code_matrix()
    for p in perms:
        p = tuple(p)
        if sorted(p) != list(range(space.n)):
            raise ValueError("not a permutation of the points")
        arr = np.array(p)
        if not np.array_equal(codes[arr][:, arr], codes):
            raise ValueError("permutation does not preserve the metric")
    from .groups import group_from_permutations

    _, elements = group_from_permutations(perms)
    elements = sorted(elements)
    ident = tuple(range(space.n))
    gens = _prune_generators([p for p in elements if p != ident], len(elements), space.n)
    return IsometryGroup(space, tuple(elements), gens, complete=True, full=False)


# -- predicates ----------------------------------------------------------------


def is_homogeneous(space: FiniteMetricSpace, group: IsometryGroup | None = None):
    """True iff the isometry group acts with a single point orbit.

    Returns None (indeterminate) when the group search was incomplete.
    """
    if group is None:
        group = isometry_group(space)
    if not group.complete:
        return None
    return len(_point_orbit(group, 0)) == space.n


def _point_orbit(group: IsometryGroup, x: int) -> set:
    gens = group.generators or ()
    orbit = {x}
    frontier = [x]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                y = g[p]
                if y not in orbit:
                    orbit.add(y)
                    nxt.append(y)
        frontier = nxt
    return orbit


def _pair_orbit_labels(space: FiniteMetricSpace, group: IsometryGroup) -> np.ndarray:
    n = space.n
    labels = np.arange(n * n, dtype=np.int64).reshape(n, n)
    gens = []
    for g in group.generators:
        arr = np.array(g)
        inv = np.empty(n, dtype=int)
        inv[arr] = np.arange(n)
        gens.extend([arr, inv])
    changed = bool(gens)
    while changed:
        changed = False
        for g in gens:
            moved = labels[g][:, g]
            new = np.minimum(labels, moved)
            if not np.array_equal(new, labels):
                labels = new
                changed = True
    return labels


def is_distance_transitive(space: FiniteMetricSpace, group: IsometryGroup | None = None):
    """True iff ordered point pairs at equal distance form single orbits.

    Indeterminate (None) when the group is incomplete.
    """
    if group is None:
        group = isometry_group(space)
    if not (group.complete and group.full):
        return None
    labels = _pair_orbit_labels(space, group)
    codes = space.code_matrix()
    for c in range(int(codes.max()) + 1):
        if len(np.unique(labels[codes == c])) > 1:
            return False
    return True


# -- group metric ----------------------------------------------------------------


def group_metric(group: IsometryGroup, g1, g2):
    """Sup displacement distance max_y d(g1 y, g2 y); bi-invariant."""
    g1, g2 = tuple(g1), tuple(g2)
    if g1 not in group or g2 not in group:
        raise ValueError("permutation is not an element of the group")
    d = group.space.dist
    return max(d[a][b] for a, b in zip(g1, g2))


def group_as_metric_space(group: IsometryGroup, size_cap: int = 2000) -> FiniteMetricSpace:
    """The group itself as a finite metric space under the sup-displacement
    metric. Intended for modest orders; refuses above size_cap elements."""
    if not group.complete:
        raise IncompleteSearchError("cannot materialize an incomplete group")
    m = group.order
    if m > size_cap:
        raise ValueError(f"group of order {m} exceeds the size cap {size_cap}")
    space = group.space
    codes = space.code_matrix()
    values = space.distance_values()
    perms = [np.array(p) for p in group.elements]
    dist = [[None] * m for _ in range(m)]
    zero = Fraction(0) if space.is_exact else 0.0
    for a in range(m):
        dist[a][a] = zero
        for b in range(a + 1, m):
            v = values[int(codes[perms[a], perms[b]].max())]
            dist[a][b] = dist[b][a] = v
    return FiniteMetricSpace(dist, mode=space.mode,
                             tol=None if space.is_exact else space.tol,
                             provenance=f"isom_group({space.provenance or 'space'})")


EntropyBoundCheck = namedtuple("EntropyBoundCheck", "lhs rhs holds")


def verify_isometry_entropy_bound(space: FiniteMetricSpace, epsilon,
                                  group: IsometryGroup | None = None) -> EntropyBoundCheck:
    """Check that the isometry group packs at most E(eps/4)^E(eps/4) points at
    scale eps, where E is the packing number of the base space.

    Requires exact packing numbers on both sides; raises otherwise.
    """
    if group is None:
        group = isometry_group(space)
    if not group.complete:
        raise IncompleteSearchError("isometry group search incomplete")
    gspace = group_as_metric_space(group)
    lhs_res = packing_number(gspace, epsilon)
    quarter = Fraction(epsilon, 4) if isinstance(epsilon, int) else epsilon / 4
    rhs_res = packing_number(space, quarter)
    if not (lhs_res.exact and rhs_res.exact):
        raise IncompleteSearchError("packing numbers are not exact at this size")
    rhs = rhs_res.count ** rhs_res.count
    return EntropyBoundCheck(lhs_res.count, rhs, lhs_res.count <= rhs)


def sphere_orbit_transitivity(space: FiniteMetricSpace, x: int, r,
                              group: IsometryGroup | None = None):
    """True iff the stabilizer of x is transitive on the r-sphere around x.

    Empty spheres are vacuously transitive; indeterminate when the group is
    incomplete.
    """
    if group is None:
        group = isometry_group(space)
    if not group.complete:
        return None
    if space.is_exact:
        sphere = {y for y in range(space.n) if y != x and space.dist[x][y] == r}
    else:
        sphere = {y for y in range(space.n) if y != x and abs(space.dist[x][y] - r) <= space.tol}
    if not sphere:
        return True
    stab = [g for g in group.elements if g[x] == x]
    y0 = min(sphere)
    orbit = {g[y0] for g in stab}
    return sphere <= orbit
