"""Finite metric spaces: representation, validation, packing/covering, nets,
scaling, sup products and partition quotients.

Two numeric modes are supported. Exact mode stores ``fractions.Fraction``
distances and every comparison is exact; approximate mode stores floats with
a per-space tolerance (default 1e-9) and equal-within-tolerance distances are
bucketed together before any combinatorial search.
"""

from __future__ import annotations

import bisect
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ._kernels import max_clique

DEFAULT_TOL = 1e-9

#: node budget for packing searches on spaces larger than the guaranteed-exact
#: size; completion within budget still yields an exact answer
PACKING_BUDGET = 5_000_000
EXACT_SMALL_N = 40


def as_exact(x) -> Fraction:
    """Coerce a number to an exact Fraction.

    Floats convert to their exact binary value; pass strings like "1/6" or
    Fractions for decimal-exact input.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite distance {x!r}")
        return Fraction(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as exact number")


class FiniteMetricSpace:
    """A finite metric space given by an explicit symmetric distance matrix.

    The constructor stores data as given (validation is a separate, explicit
    step so that invalid matrices can be inspected). Instances are treated as
    immutable; derived data (float matrix, distance value table, integer code
    matrix) is cached on first use.
    """

    __slots__ = ("n", "dist", "labels", "mode", "tol", "provenance", "_cache")

    def __init__(self, dist, labels=None, mode=None, tol=None, provenance=""):
        rows = [tuple(row) for row in dist]
        n = len(rows)
        if n == 0:
            raise ValueError("a metric space needs at least one point")
        if any(len(r) != n for r in rows):
            raise ValueError("distance matrix must be square")
        if mode is None:
            flat = [x for r in rows for x in r]
            mode = "exact" if all(isinstance(x, (int, Fraction)) for x in flat) else "approx"
        if mode not in ("exact", "approx"):
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "exact":
            rows = [tuple(as_exact(x) for x in r) for r in rows]
            tol = 0.0
        else:
            rows = [tuple(float(x) for x in r) for r in rows]
            tol = DEFAULT_TOL if tol is None else float(tol)
        self.n = n
        self.dist = tuple(rows)
        self.labels = tuple(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != n:
            raise ValueError("labels length must match point count")
        self.mode = mode
        self.tol = tol
        self.provenance = provenance
        self._cache = {}

    # -- basic accessors ---------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.mode == "exact"

    def d(self, i: int, j: int):
        return self.dist[i][j]

    @property
    def diameter(self):
        return self.distance_values()[-1]

    @property
    def min_positive_distance(self):
        vals = self.distance_values()
        for v in vals:
            if v > 0:
                return v
        return None

    def float_matrix(self) -> np.ndarray:
        m = self._cache.get("float")
        if m is None:
            m = np.array([[float(x) for x in row] for row in self.dist], dtype=float)
            m.setflags(write=False)
            self._cache["float"] = m
        return m

    def distance_values(self) -> list:
        """Sorted distinct distance values; in approx mode, values closer than
        tol are merged into one bucket represented by the smallest member."""
        vals = self._cache.get("values")
        if vals is None:
            self._codes_and_values()
            vals = self._cache["values"]
        return vals

    def code_matrix(self) -> np.ndarray:
        """n x n int32 matrix of ranks into distance_values()."""
        codes = self._cache.get("codes")
        if codes is None:
            self._codes_and_values()
            codes = self._cache["codes"]
        return codes

    def _codes_and_values(self) -> None:
        n = self.n
        if self.is_exact:
            distinct = sorted(set(x for row in self.dist for x in row))
            index = {v: k for k, v in enumerate(distinct)}
            codes = np.array([[index[x] for x in row] for row in self.dist], dtype=np.int32)
            values = distinct
        else:
            flat = self.float_matrix().ravel()
            uniq, inverse = np.unique(flat, return_inverse=True)
            bucket = np.empty(len(uniq), dtype=np.int32)
            values = []
            for k, v in enumerate(uniq):
                if values and v - float(values[-1]) <= self.tol:
                    bucket[k] = len(values) - 1
                else:
                    bucket[k] = len(values)
                    values.append(float(v))
            codes = bucket[inverse].reshape(n, n).astype(np.int32)
        codes.setflags(write=False)
        self._cache["codes"] = codes
        self._cache["values"] = values

    def rows_by_code(self) -> list:
        """For each point y, a dict code -> frozenset of points at that coded
        distance from y. Used by the isometry search."""
        rows = self._cache.get("rows_by_code")
        if rows is None:
            codes = self.code_matrix()
            rows = []
            for y in range(self.n):
                d: dict = {}
                for j, c in enumerate(codes[y]):
                    d.setdefault(int(c), []).append(j)
                rows.append({c: frozenset(js) for c, js in d.items()})
            self._cache["rows_by_code"] = rows
        return rows

    def __repr__(self):
        tag = self.provenance or "space"
        return f"<FiniteMetricSpace {tag}: n={self.n} mode={self.mode}>"


# -- validation -------------------------------------------------------------

WITNESS_CAP = 50


@dataclass(frozen=True)
class Violation:
    kind: str  # diagonal | symmetry | positivity | triangle
    indices: tuple
    amount: float


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return "valid"
        parts = [f"{kind}: {cnt}" for kind, cnt in sorted(self.counts.items())]
        return "invalid (" + ", ".join(parts) + ")"


def validate(space: FiniteMetricSpace) -> ValidationReport:
    """Check all metric axioms; violations are reported, never raised.

    In approximate mode, deviations within the space tolerance are accepted.
    The triangle check uses a vectorized float pre-screen; in exact mode every
    candidate triple is re-verified with rational arithmetic.
    """
    report = ValidationReport()
    n = space.n
    tol = space.tol

    def add(kind, indices, amount):
        report.counts[kind] = report.counts.get(kind, 0) + 1
        if report.counts[kind] <= WITNESS_CAP:
            report.violations.append(Violation(kind, indices, float(amount)))

    for i in range(n):
        if not (-tol <= float(space.dist[i][i]) <= tol) or (space.is_exact and space.dist[i][i] != 0):
            add("diagonal", (i,), space.dist[i][i])
    for i in range(n):
        for j in range(i + 1, n):
            a, b = space.dist[i][j], space.dist[j][i]
            if space.is_exact:
                if a != b:
                    add("symmetry", (i, j), abs(float(a) - float(b)))
            elif abs(a - b) > tol:
                add("symmetry", (i, j), abs(a - b))
            if space.is_exact:
                if a <= 0:
                    add("positivity", (i, j), a)
            elif a <= tol:
                add("positivity", (i, j), a)

    _check_triangles(space, add)
    return report


def _check_triangles(space: FiniteMetricSpace, add) -> None:
    n = space.n
    if space.is_exact:
        # exact integer arithmetic over a common denominator when it fits in
        # int64, otherwise a float pre-screen whose ambiguous band is
        # re-verified with rational arithmetic
        values = space.distance_values()
        denom = 1
        for v in values:
            denom = denom * v.denominator // math.gcd(denom, v.denominator)
        top = max((abs(v.numerator) * (denom // v.denominator) for v in values), default=0)
        if 2 * top < 2**62:
            lookup = np.array([int(v * denom) for v in values], dtype=np.int64)
            N = lookup[space.code_matrix()]
            for k in range(n):
                slack = N - (N[:, k : k + 1] + N[k : k + 1, :])
                for i, j in np.argwhere(slack > 0):
                    i, j = int(i), int(j)
                    if k in (i, j) or i == j:
                        continue
                    add("triangle", (i, k, j), Fraction(int(slack[i, j]), denom))
            return
        D = space.float_matrix()
        margin = 1e-12 * max(1.0, float(D.max()))
        for k in range(n):
            slack = D - (D[:, k : k + 1] + D[k : k + 1, :])
            for i, j in np.argwhere(slack > -margin):
                i, j = int(i), int(j)
                if k in (i, j) or i == j:
                    continue
                excess = space.dist[i][j] - space.dist[i][k] - space.dist[k][j]
                if excess > 0:
                    add("triangle", (i, k, j), excess)
        return
    D = space.float_matrix()
    for k in range(n):
        slack = D - (D[:, k : k + 1] + D[k : k + 1, :])
        for i, j in np.argwhere(slack > space.tol):
            i, j = int(i), int(j)
            if k in (i, j) or i == j:
                continue
            add("triangle", (i, k, j), slack[i, j])


# -- packing / covering / nets ------------------------------------------------


@dataclass(frozen=True)
class CountBound:
    """A cardinality together with its exactness status."""

    count: int
    exact: bool
    kind: str  # "exact" | "lower-bound" | "upper-bound"

    @property
    def exactness(self) -> str:
        return self.kind

    def __iter__(self):
        return iter((self.count, self.kind))


def _threshold_code(space: FiniteMetricSpace, epsilon) -> int:
    """Number of distance values <= epsilon (codes >= this mean d > epsilon)."""
    values = space.distance_values()
    return bisect.bisect_right(values, epsilon)


def packing_number(space: FiniteMetricSpace, epsilon, budget: int | None = None) -> CountBound:
    """Largest subset with all pairwise distances strictly greater than epsilon.

    Exact via branch-and-bound max clique; guaranteed to complete for
    n <= 40 and, in practice, far beyond on structured spaces. If the node
    budget runs out the greedy lower bound is returned, flagged as such.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    c0 = _threshold_code(space, epsilon)
    adj = space.code_matrix() >= c0
    if budget is None:
        budget = None if space.n <= EXACT_SMALL_N else PACKING_BUDGET
    members, complete, _ = max_clique(adj, budget)
    if complete:
        return CountBound(len(members), True, "exact")
    greedy = _greedy_packing(adj)
    return CountBound(max(len(members), len(greedy)), False, "lower-bound")


def _greedy_packing(adj: np.ndarray) -> list[int]:
    chosen: list[int] = []
    for i in range(adj.shape[0]):
        if all(adj[i, j] for j in chosen):
            chosen.append(i)
    return chosen


def covering_number(space: FiniteMetricSpace, epsilon, budget: int = 2_000_000) -> CountBound:
    """Minimum number of closed epsilon-balls centered at points that cover
    the space. Exact for n <= 40, greedy upper bound (flagged) otherwise."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    n = space.n
    c0 = _threshold_code(space, epsilon)
    within = space.code_matrix() < c0  # closed balls
    balls = _pack_row_masks(within)
    full = (1 << n) - 1
    greedy = _greedy_cover(balls, full)
    if n > EXACT_SMALL_N:
        return CountBound(len(greedy), False, "upper-bound")
    best, complete = _min_cover_exact(balls, full, len(greedy), budget)
    if complete:
        return CountBound(best, True, "exact")
    return CountBound(len(greedy), False, "upper-bound")


def _pack_row_masks(boolmat: np.ndarray) -> list[int]:
    packed = np.packbits(boolmat.astype(np.uint8), axis=1, bitorder="little")
    return [int.from_bytes(packed[i].tobytes(), "little") for i in range(boolmat.shape[0])]


def _greedy_cover(balls: list[int], full: int) -> list[int]:
    uncovered = full
    chosen = []
    while uncovered:
        best_c, best_gain = -1, -1
        for c, ball in enumerate(balls):
            gain = (ball & uncovered).bit_count()
            if gain > best_gain:
                best_c, best_gain = c, gain
        if best_gain <= 0:  # cannot happen: every point covers itself
            raise RuntimeError("cover construction failed")
        chosen.append(best_c)
        uncovered &= ~balls[best_c]
    return chosen


def _min_cover_exact(balls: list[int], full: int, upper: int, budget: int) -> tuple[int, bool]:
    n = len(balls)
    max_ball = max(ball.bit_count() for ball in balls)
    best = upper
    nodes = 0
    complete = True

    def search(uncovered: int, used: int) -> None:
        nonlocal best, nodes, complete
        if not complete:
            return
        if uncovered == 0:
            best = min(best, used)
            return
        if used + (uncovered.bit_count() + max_ball - 1) // max_ball >= best:
            return
        nodes += 1
        if nodes > budget:
            complete = False
            return
        # branch on the uncovered point with fewest candidate balls
        point, cands = -1, None
        rest = uncovered
        while rest:
            p = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            cs = [c for c in range(n) if balls[c] >> p & 1]
            if cands is None or len(cs) < len(cands):
                point, cands = p, cs
                if len(cs) == 1:
                    break
        for c in cands:
            search(uncovered & ~balls[c], used + 1)

    search(full, 0)
    return best, complete


def epsilon_net(space: FiniteMetricSpace, epsilon) -> list[int]:
    """Greedy farthest-point net starting at index 0, lowest-index ties.

    Every point ends up within epsilon (closed) of the returned subset, and
    the subset is itself an epsilon-packing, so its size is at most the
    packing number.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    n = space.n
    mind = list(space.dist[0])
    net = [0]
    while True:
        far = max(range(n), key=lambda i: mind[i])
        if not mind[far] > epsilon:
            break
        net.append(far)
        row = space.dist[far]
        for i in range(n):
            if row[i] < mind[i]:
                mind[i] = row[i]
    return net


@dataclass(frozen=True)
class EntropyPoint:
    epsilon: object
    packing: int
    exactness: str


@dataclass(frozen=True)
class EntropyProfile:
    """Packing numbers of one space over a grid of scales."""

    points: tuple

    def __iter__(self):
        return iter(self.points)


def entropy_profile(space: FiniteMetricSpace, epsilons: Iterable) -> EntropyProfile:
    pts = []
    for eps in epsilons:
        res = packing_number(space, eps)
        pts.append(EntropyPoint(eps, res.count, res.kind))
    return EntropyProfile(tuple(pts))


# -- constructions ------------------------------------------------------------


def scale(space: FiniteMetricSpace, factor) -> FiniteMetricSpace:
    """Multiply all distances by a positive factor; exactness is preserved in
    exact mode (pass Fraction, int or "p/q" strings for decimal-exact factors)."""
    if space.is_exact:
        f = as_exact(factor)
        if f <= 0:
            raise ValueError("scale factor must be positive")
        dist = [[x * f for x in row] for row in space.dist]
        return FiniteMetricSpace(dist, labels=space.labels, mode="exact",
                                 provenance=f"scale({space.provenance or 'space'}, {f})")
    f = float(factor)
    if f <= 0:
        raise ValueError("scale factor must be positive")
    dist = [[x * f for x in row] for row in space.dist]
    return FiniteMetricSpace(dist, labels=space.labels, mode="approx", tol=space.tol * f,
                             provenance=f"scale({space.provenance or 'space'}, {f})")


def sup_product(spaces: Sequence[FiniteMetricSpace]) -> FiniteMetricSpace:
    """Cartesian product with the sup metric; point order is lexicographic in
    the factor indices. Mixing exact and approximate factors yields an
    approximate product."""
    factors = list(spaces)
    if not factors:
        raise ValueError("sup_product needs at least one factor")
    if len(factors) == 1:
        return factors[0]
    exact = all(f.is_exact for f in factors)
    points = list(itertools.product(*[range(f.n) for f in factors]))
    n = len(points)
    dist = [[None] * n for _ in range(n)]
    zero = Fraction(0) if exact else 0.0
    for a in range(n):
        pa = points[a]
        dist[a][a] = zero
        for b in range(a + 1, n):
            pb = points[b]
            m = None
            for f, i, j in zip(factors, pa, pb):
                v = f.dist[i][j]
                if m is None or v > m:
                    m = v
            if exact:
                m = as_exact(m)
            dist[a][b] = dist[b][a] = m
    labels = None
    if all(f.labels is not None for f in factors):
        labels = ["(" + ",".join(f.labels[i] for f, i in zip(factors, p)) + ")" for p in points]
    tol = max(f.tol for f in factors)
    prov = "sup_product(" + ", ".join(f.provenance or "space" for f in factors) + ")"
    return FiniteMetricSpace(dist, labels=labels, mode="exact" if exact else "approx",
                             tol=None if exact else tol, provenance=prov)


def quotient_by_partition(space: FiniteMetricSpace, partition: Sequence[Sequence[int]]) -> FiniteMetricSpace:
    """Quotient space with one point per block and the Hausdorff distance
    between blocks inside the original space. The result is validated."""
    blocks = [tuple(sorted(b)) for b in partition]
    seen: set[int] = set()
    for b in blocks:
        if not b:
            raise ValueError("empty block in partition")
        for i in b:
            if not 0 <= i < space.n:
                raise ValueError(f"point {i} out of range")
            if i in seen:
                raise ValueError(f"point {i} appears in two blocks")
            seen.add(i)
    if len(seen) != space.n:
        missing = sorted(set(range(space.n)) - seen)
        raise ValueError(f"partition does not cover points {missing[:10]}")

    m = len(blocks)
    dist = [[None] * m for _ in range(m)]
    zero = Fraction(0) if space.is_exact else 0.0
    for a in range(m):
        dist[a][a] = zero
        for b in range(a + 1, m):
            h = _hausdorff(space, blocks[a], blocks[b])
            dist[a][b] = dist[b][a] = h
    labels = None
    if space.labels is not None:
        labels = ["{" + ",".join(space.labels[i] for i in blk) + "}" for blk in blocks]
    out = FiniteMetricSpace(dist, labels=labels, mode=space.mode,
                            tol=None if space.is_exact else space.tol,
                            provenance=f"quotient({space.provenance or 'space'})")
    report = validate(out)
    if not report.ok:
        raise RuntimeError(f"quotient metric failed validation: {report.summary()}")
    return out


def _hausdorff(space: FiniteMetricSpace, A: Sequence[int], B: Sequence[int]):
    d = space.dist
    forward = max(min(d[a][b] for b in B) for a in A)
    backward = max(min(d[a][b] for a in A) for b in B)
    return max(forward, backward)


# -- JSON space format --------------------------------------------------------


def space_to_json(space: FiniteMetricSpace) -> dict:
    if space.is_exact:
        dist = [[f"{x.numerator}/{x.denominator}" for x in row] for row in space.dist]
    else:
        dist = [[float(x) for x in row] for row in space.dist]
    obj = {
        "n": space.n,
        "dist": dist,
        "mode": "exact" if space.is_exact else "approx",
        "provenance": space.provenance,
    }
    if space.labels is not None:
        obj["labels"] = list(space.labels)
    if not space.is_exact:
        obj["tol"] = space.tol
    return obj


def space_from_json(obj: dict) -> FiniteMetricSpace:
    n = obj["n"]
    mode = obj.get("mode", "approx")
    raw = obj["dist"]
    if len(raw) != n or any(len(r) != n for r in raw):
        raise ValueError("dist shape does not match n")
    if mode == "exact":
        dist = [[Fraction(x) if isinstance(x, str) else as_exact(x) for x in row] for row in raw]
    else:
        dist = [[float(Fraction(x)) if isinstance(x, str) else float(x) for x in row] for row in raw]
    return FiniteMetricSpace(dist, labels=obj.get("labels"), mode=mode,
                             tol=obj.get("tol"), provenance=obj.get("provenance", ""))


def save_space(space: FiniteMetricSpace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(space_to_json(space), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_space(path) -> FiniteMetricSpace:
    with open(path, encoding="utf-8") as fh:
        return space_from_json(json.load(fh))
