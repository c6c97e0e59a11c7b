"""Gromov-Hausdorff distances between finite spaces.

Distances are certified through correspondences: surjective-both-ways
relations whose distortion upper-bounds twice the GH distance, with the exact
search ranging over function-pair correspondences (a graph of a map X -> Y
united with the transpose of a map Y -> X), which is enough to attain the
optimum. Exact-mode inputs give exact rational answers: the branch and bound
runs on integer ranks of the finitely many |d_X - d_Y| values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .space import FiniteMetricSpace, packing_number

DEFAULT_BNB_BUDGET = 10_000_000
_RANK_TABLE_CAP = 400_000


@dataclass(frozen=True)
class Correspondence:
    """A relation between the point sets of two spaces as sorted index pairs."""

    pairs: tuple

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(sorted(set(map(tuple, self.pairs)))))
        if not self.pairs:
            raise ValueError("empty correspondence")

    @staticmethod
    def diagonal(n: int) -> "Correspondence":
        return Correspondence(tuple((i, i) for i in range(n)))

    @staticmethod
    def all_pairs(nx: int, ny: int) -> "Correspondence":
        return Correspondence(tuple(itertools.product(range(nx), range(ny))))

    @staticmethod
    def from_maps(f, g) -> "Correspondence":
        """Graph of f: X -> Y united with the transposed graph of g: Y -> X."""
        pairs = [(x, y) for x, y in enumerate(f)] + [(x, y) for y, x in enumerate(g)]
        return Correspondence(tuple(pairs))

    def is_surjective(self, nx: int, ny: int) -> bool:
        xs = {p[0] for p in self.pairs}
        ys = {p[1] for p in self.pairs}
        return xs == set(range(nx)) and ys == set(range(ny))


def distortion(corr: Correspondence, X: FiniteMetricSpace, Y: FiniteMetricSpace,
               partial: bool = False):
    """Sup of |d_X(x,x') - d_Y(y,y')| over pairs of related pairs.

    Exact (rational) for exact-mode inputs: a vectorized float scan locates
    near-maximal code pairs, which are then compared in exact arithmetic.
    ``partial=True`` skips the surjectivity requirement (for diagnostics on
    sub-matchings); GH certificates always use surjective correspondences.
    """
    if not partial and not corr.is_surjective(X.n, Y.n):
        raise ValueError("correspondence is not surjective onto both spaces")
    I = np.fromiter((p[0] for p in corr.pairs), dtype=int)
    J = np.fromiter((p[1] for p in corr.pairs), dtype=int)
    m = len(corr.pairs)
    DX, DY = X.float_matrix(), Y.float_matrix()
    chunk = max(1, 30_000_000 // m) if m else 1
    best = 0.0
    for s in range(0, m, chunk):
        A = np.abs(DX[np.ix_(I[s : s + chunk], I)] - DY[np.ix_(J[s : s + chunk], J)])
        best = max(best, float(A.max()))
    if not (X.is_exact and Y.is_exact):
        return best
    margin = 1e-12 * max(1.0, float(DX.max()) + float(DY.max()))
    CX, CY = X.code_matrix(), Y.code_matrix()
    vx, vy = X.distance_values(), Y.distance_values()
    cand: set = set()
    for s in range(0, m, chunk):
        A = np.abs(DX[np.ix_(I[s : s + chunk], I)] - DY[np.ix_(J[s : s + chunk], J)])
        for a, b in np.argwhere(A >= best - margin):
            ia, ib = int(I[s + a]), int(I[b])
            ja, jb = int(J[s + a]), int(J[b])
            cand.add((int(CX[ia, ib]), int(CY[ja, jb])))
    return max(abs(vx[cx] - vy[cy]) for cx, cy in cand)


def distortion_argmax(corr: Correspondence, X: FiniteMetricSpace, Y: FiniteMetricSpace):
    """Float distortion together with a pair of related pairs realizing it."""
    I = np.fromiter((p[0] for p in corr.pairs), dtype=int)
    J = np.fromiter((p[1] for p in corr.pairs), dtype=int)
    m = len(corr.pairs)
    DX, DY = X.float_matrix(), Y.float_matrix()
    chunk = max(1, 30_000_000 // m)
    best, arg = -1.0, (corr.pairs[0], corr.pairs[0])
    for s in range(0, m, chunk):
        A = np.abs(DX[np.ix_(I[s : s + chunk], I)] - DY[np.ix_(J[s : s + chunk], J)])
        k = int(A.argmax())
        a, b = divmod(k, m)
        if float(A[a, b]) > best:
            best = float(A[a, b])
            arg = (corr.pairs[s + a], corr.pairs[b])
    return best, arg


@dataclass
class GhBounds:
    """Lower and upper bounds on a GH distance with their certificates."""

    lower: object
    upper: object
    exact: bool
    certificate_lower: object = None
    certificate_upper: Correspondence | None = None
    notes: dict = field(default_factory=dict)


@dataclass(frozen=True)
class LowerCertificate:
    kind: str  # "trivial" | "diameter" | "packing-transfer"
    details: tuple = ()


def _fps_order(space: FiniteMetricSpace) -> list[int]:
    n = space.n
    mind = list(space.dist[0])
    order = [0]
    chosen = {0}
    for _ in range(n - 1):
        far = max((i for i in range(n) if i not in chosen), key=lambda i: (mind[i], -i))
        order.append(far)
        chosen.add(far)
        row = space.dist[far]
        for i in range(n):
            if row[i] < mind[i]:
                mind[i] = row[i]
    return order


def gh_exact(X: FiniteMetricSpace, Y: FiniteMetricSpace,
             budget: int = DEFAULT_BNB_BUDGET) -> GhBounds:
    """GH distance by branch and bound over function-pair correspondences.

    Guaranteed exact within default budget for spaces of at most 7 points;
    when the budget runs out the result is flagged inexact with the incumbent
    as upper bound. Exact-mode inputs yield exact rational values.
    """
    both_exact = X.is_exact and Y.is_exact
    vx = [v for v in X.distance_values()]
    vy = [v for v in Y.distance_values()]
    if len(vx) * len(vy) > _RANK_TABLE_CAP:
        lower, cert = gh_lower_bounds(X, Y)
        f = greedy_alignment(X, Y)
        upper, corr = gh_upper_from_map(X, Y, f)
        return GhBounds(lower, upper, False, cert, corr,
                        notes={"reason": "value table too large for exact search"})
    diffs = sorted({abs(a - b) for a in vx for b in vy})
    rank_of = {v: k for k, v in enumerate(diffs)}
    crk = np.empty((len(vx), len(vy)), dtype=np.int32)
    for a, va in enumerate(vx):
        for b, vb in enumerate(vy):
            crk[a, b] = rank_of[abs(va - vb)]
    CX, CY = X.code_matrix(), Y.code_matrix()
    nx, ny = X.n, Y.n

    xorder = _fps_order(X)
    yorder = _fps_order(Y)
    variables = []
    for k in range(max(nx, ny)):
        if k < nx:
            variables.append(("f", xorder[k]))
        if k < ny:
            variables.append(("g", yorder[k]))

    fmap = [-1] * nx
    gmap = [-1] * ny
    best_rank = len(diffs)  # sentinel: worse than any real rank
    best_maps = None
    nodes = 0
    complete = True
    # any correspondence distorts at least the diameter difference, so an
    # incumbent at that floor is already optimal
    diam_gap = abs(X.diameter - Y.diameter)
    floor_rank = 0
    while floor_rank < len(diffs) and diffs[floor_rank] < diam_gap:
        floor_rank += 1

    class _Optimal(Exception):
        pass

    def assign_cost(side, p, q):
        # max rank against all already-assigned relation pairs
        worst = 0
        if side == "f":
            for x2, y2 in enumerate(fmap):
                if y2 >= 0:
                    worst = max(worst, int(crk[CX[p, x2], CY[q, y2]]))
            for y2, x2 in enumerate(gmap):
                if x2 >= 0:
                    worst = max(worst, int(crk[CX[p, x2], CY[q, y2]]))
        else:
            for x2, y2 in enumerate(fmap):
                if y2 >= 0:
                    worst = max(worst, int(crk[CX[q, x2], CY[p, y2]]))
            for y2, x2 in enumerate(gmap):
                if x2 >= 0:
                    worst = max(worst, int(crk[CX[q, x2], CY[p, y2]]))
        return worst

    def dfs(level: int, cur: int) -> None:
        nonlocal best_rank, best_maps, nodes, complete
        if not complete:
            return
        if cur >= best_rank:
            return
        if level == len(variables):
            best_rank = cur
            best_maps = (list(fmap), list(gmap))
            if best_rank <= floor_rank:
                raise _Optimal
            return
        side, p = variables[level]
        domain = range(ny) if side == "f" else range(nx)
        scored = []
        for q in domain:
            c = assign_cost(side, p, q)
            if max(cur, c) < best_rank:
                scored.append((c, q))
        scored.sort()
        for c, q in scored:
            nodes += 1
            if nodes > budget:
                complete = False
                return
            if side == "f":
                fmap[p] = q
            else:
                gmap[p] = q
            dfs(level + 1, max(cur, c))
            if side == "f":
                fmap[p] = -1
            else:
                gmap[p] = -1

    try:
        dfs(0, 0)
    except _Optimal:
        pass

    if best_maps is not None:
        corr = Correspondence.from_maps(best_maps[0], best_maps[1])
        value = diffs[best_rank] if best_rank < len(diffs) else Fraction(0)
        half = value / 2
        if complete:
            return GhBounds(half, half, True,
                            LowerCertificate("branch-and-bound-optimum"), corr,
                            notes={"nodes": nodes})
        lower, cert = gh_lower_bounds(X, Y)
        return GhBounds(min(lower, half), half, False, cert, corr,
                        notes={"nodes": nodes, "reason": "budget exhausted"})
    # no leaf reached within budget
    lower, cert = gh_lower_bounds(X, Y)
    f = greedy_alignment(X, Y)
    upper, corr = gh_upper_from_map(X, Y, f)
    return GhBounds(lower, upper, False, cert, corr,
                    notes={"nodes": nodes, "reason": "budget exhausted"})


def gh_lower_bounds(X: FiniteMetricSpace, Y: FiniteMetricSpace,
                    grid_cap: int = 48) -> tuple:
    """Certified lower bound: max of the diameter-difference bound and the
    packing-transfer bound over a grid of realized distance values.

    Only exact packing numbers are used; inexact grid points are skipped, so
    the bound stays sound (possibly weaker) on large spaces.
    """
    diam_gap = abs(X.diameter - Y.diameter) / 2
    best = diam_gap
    cert = LowerCertificate("diameter", (X.diameter, Y.diameter)) if diam_gap > 0 \
        else LowerCertificate("trivial")

    grid = sorted(set(v for v in X.distance_values() if v > 0)
                  | set(v for v in Y.distance_values() if v > 0))
    if len(grid) > grid_cap:
        idx = np.linspace(0, len(grid) - 1, grid_cap).astype(int)
        grid = [grid[int(i)] for i in idx]

    profiles = {}
    for name, sp in (("X", X), ("Y", Y)):
        prof = []
        for eps in grid:
            res = packing_number(sp, eps)
            prof.append(res.count if res.exact else None)
        profiles[name] = prof

    for a_name, b_name in (("X", "Y"), ("Y", "X")):
        pa, pb = profiles[a_name], profiles[b_name]
        for i, eps in enumerate(grid):
            if pa[i] is None:
                continue
            for j in range(i):
                if pb[j] is None:
                    continue
                if pa[i] > pb[j]:
                    bound = (grid[i] - grid[j]) / 2
                    if bound > best:
                        best = bound
                        cert = LowerCertificate(
                            "packing-transfer",
                            (a_name, grid[i], pa[i], grid[j], pb[j]),
                        )
                    break  # smaller eps' only weakens eps - eps'
    return best, cert


def gh_upper_from_map(X: FiniteMetricSpace, Y: FiniteMetricSpace, f) -> tuple:
    """Upper bound from a total map X -> Y: its graph plus nearest-preimage
    pairs covering Y. Returns (bound, correspondence)."""
    f = list(f)
    if len(f) != X.n or any(not 0 <= y < Y.n for y in f):
        raise ValueError("f must map every point of X into Y")
    pairs = [(x, y) for x, y in enumerate(f)]
    dY = Y.dist
    for y in range(Y.n):
        x_best = min(range(X.n), key=lambda x: (dY[f[x]][y], x))
        pairs.append((x_best, y))
    corr = Correspondence(tuple(pairs))
    return distortion(corr, X, Y) / 2, corr


def upper_bound_from_correspondence(X: FiniteMetricSpace, Y: FiniteMetricSpace,
                                    corr: Correspondence) -> object:
    return distortion(corr, X, Y) / 2


def greedy_alignment(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> list[int]:
    """Distortion-minimizing greedy map X -> Y in farthest-point order.

    Float-guided heuristic (ties to the lowest index); certificates derived
    from it are evaluated exactly afterwards.
    """
    DX, DY = X.float_matrix(), Y.float_matrix()
    order = _fps_order(X)
    f = {order[0]: 0}
    assigned = [order[0]]
    for x in order[1:]:
        img = [f[a] for a in assigned]
        costs = np.max(np.abs(DX[x, assigned][None, :] - DY[:, img]), axis=1)
        f[x] = int(np.argmin(costs))
        assigned.append(x)
    return [f[x] for x in range(X.n)]


def gh_to_model(X: FiniteMetricSpace, model, mesh) -> GhBounds:
    """GH bounds from a finite space to a continuous model via a finite net.

    Bounds against the net are widened by the net's Hausdorff bound h:
    lower' = max(0, lower - h), upper' = upper + h.
    """
    net = model.net(mesh)
    N, h = net.space, net.bound
    lower, cert = gh_lower_bounds(X, N)
    f = greedy_alignment(X, N)
    upper, corr = gh_upper_from_map(X, N, f)
    widened_lower = max(lower - h, 0 * lower)
    widened_upper = upper + h
    return GhBounds(widened_lower, widened_upper, False, cert, corr,
                    notes={"net_points": N.n, "net_bound": h,
                           "lower_vs_net": lower, "upper_vs_net": upper,
                           "model": repr(model)})


@dataclass(frozen=True)
class EpsilonEquivalence:
    """A pair of maps realizing an epsilon-isometric equivalence."""

    f: tuple
    g: tuple
    epsilon: object


def epsilon_equivalence(X: FiniteMetricSpace, Y: FiniteMetricSpace,
                        corr: Correspondence) -> EpsilonEquivalence:
    """Extract maps f: X -> Y and g: Y -> X from a correspondence (lowest
    related index), certified by epsilon = distortion: both maps distort
    distances by at most epsilon and both compositions move points at most
    epsilon."""
    if not corr.is_surjective(X.n, Y.n):
        raise ValueError("correspondence is not surjective onto both spaces")
    eps = distortion(corr, X, Y)
    f = [min(y for x, y in corr.pairs if x == i) for i in range(X.n)]
    g = [min(x for x, y in corr.pairs if y == j) for j in range(Y.n)]
    for x in range(X.n):
        if X.dist[x][g[f[x]]] > eps:
            raise AssertionError("round trip moved a point beyond epsilon")
    for y in range(Y.n):
        if Y.dist[y][f[g[y]]] > eps:
            raise AssertionError("round trip moved a point beyond epsilon")
    return EpsilonEquivalence(tuple(f), tuple(g), eps)
