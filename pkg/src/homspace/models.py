"""Parametric model spaces with closed-form distances, plus finite nets.

The circle, torus and solenoid truncation are compact abelian groups and
expose exact group operations on rational coordinates; the sphere is a metric
space only. ``model_net`` produces a finite subset together with a certified
Hausdorff bound, the basis for Gromov-Hausdorff comparisons against models.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .space import FiniteMetricSpace, as_exact, sup_product

MAX_NET_POINTS = 20_000


class NetSizeError(ValueError):
    """Raised when a requested mesh would need more points than the cap."""

    def __init__(self, required: int, cap: int = MAX_NET_POINTS):
        self.required = required
        self.cap = cap
        super().__init__(f"net would need {required} points, cap is {cap}; use a coarser mesh")


def circle_arc(delta, circumference):
    """Arc distance on a circle of the given circumference."""
    d = delta % circumference
    return min(d, circumference - d)


class Circle:
    """Circle group of a given circumference with the arc metric."""

    kind = "circle"

    def __init__(self, circumference=1):
        self.circumference = as_exact(circumference)
        if self.circumference <= 0:
            raise ValueError("circumference must be positive")

    # group structure (elements are Fractions mod circumference)
    @property
    def identity(self):
        return Fraction(0)

    def normalize(self, x):
        return as_exact(x) % self.circumference

    def mul(self, a, b):
        return (a + b) % self.circumference

    def inv(self, a):
        return (-a) % self.circumference

    def distance(self, a, b):
        return circle_arc(a - b, self.circumference)

    def net(self, mesh) -> "ModelNet":
        mesh = as_exact(mesh)
        if mesh <= 0:
            raise ValueError("mesh must be positive")
        m = max(1, math.ceil(self.circumference / (2 * mesh)))
        if m > MAX_NET_POINTS:
            raise NetSizeError(m)
        pts = [Fraction(k) * self.circumference / m for k in range(m)]
        arcs = [circle_arc(p, self.circumference) for p in pts]
        dist = [[arcs[(i - j) % m] for j in range(m)] for i in range(m)]
        space = FiniteMetricSpace(dist, mode="exact", provenance=f"net(circle({self.circumference}), m={m})")
        return ModelNet(space, self.circumference / (2 * m), pts, self)

    def __repr__(self):
        return f"Circle({self.circumference})"


class Torus:
    """Product of circles with the sup metric (coordinatewise arcs)."""

    kind = "torus"

    def __init__(self, circumferences):
        self.circumferences = tuple(as_exact(c) for c in circumferences)
        if not self.circumferences or any(c <= 0 for c in self.circumferences):
            raise ValueError("need positive circumferences")
        self.d = len(self.circumferences)

    @property
    def identity(self):
        return tuple(Fraction(0) for _ in range(self.d))

    def normalize(self, x):
        return tuple(as_exact(xi) % c for xi, c in zip(x, self.circumferences))

    def mul(self, a, b):
        return tuple((ai + bi) % c for ai, bi, c in zip(a, b, self.circumferences))

    def inv(self, a):
        return tuple((-ai) % c for ai, c in zip(a, self.circumferences))

    def distance(self, a, b):
        return max(circle_arc(ai - bi, c) for ai, bi, c in zip(a, b, self.circumferences))

    def net(self, mesh) -> "ModelNet":
        factor_nets = [Circle(c).net(mesh) for c in self.circumferences]
        total = math.prod(fn.space.n for fn in factor_nets)
        if total > MAX_NET_POINTS:
            raise NetSizeError(total)
        space = sup_product([fn.space for fn in factor_nets])
        pts = [tuple(p) for p in itertools.product(*[fn.points for fn in factor_nets])]
        bound = max(fn.bound for fn in factor_nets)
        space.provenance = f"net(torus{self.circumferences}, n={space.n})"
        return ModelNet(space, bound, pts, self)

    def __repr__(self):
        return f"Torus({self.circumferences})"


class SolenoidTruncation:
    """Finite tower of circles linked by power maps, with a weighted-sum metric.

    ``levels`` are the cyclic orders of the tower (each must divide the next);
    an element is identified by its coordinate on the deepest level, a rational
    t mod 1, from which level j's position is t * levels[-1] / levels[j] mod 1.
    The distance is sum_j weights[j] * arc(level-j offset).
    """

    kind = "solenoid"

    def __init__(self, levels, weights):
        self.levels = tuple(int(x) for x in levels)
        self.weights = tuple(as_exact(w) for w in weights)
        if len(self.levels) != len(self.weights) or not self.levels:
            raise ValueError("levels and weights must be equal-length and nonempty")
        if any(w <= 0 for w in self.weights) or any(x < 1 for x in self.levels):
            raise ValueError("levels must be >= 1 and weights positive")
        for a, b in zip(self.levels, self.levels[1:]):
            if b % a != 0:
                raise ValueError(f"level order {a} must divide the next order {b}")
        self.depth = len(self.levels)

    @classmethod
    def factorial(cls, depth: int) -> "SolenoidTruncation":
        """The standard tower: orders 1!, 2!, ..., K! and weights 2^-j."""
        if depth < 1:
            raise ValueError("depth must be >= 1")
        return cls([math.factorial(j) for j in range(1, depth + 1)],
                   [Fraction(1, 2**j) for j in range(1, depth + 1)])

    @property
    def identity(self):
        return Fraction(0)

    def normalize(self, x):
        return as_exact(x) % 1

    def mul(self, a, b):
        return (a + b) % 1

    def inv(self, a):
        return (-a) % 1

    def level_coords(self, t):
        deepest = self.levels[-1]
        return tuple((t * Fraction(deepest, n_j)) % 1 for n_j in self.levels)

    def distance(self, a, b):
        deepest = self.levels[-1]
        delta = (a - b) % 1
        total = Fraction(0)
        for n_j, w in zip(self.levels, self.weights):
            total += w * circle_arc(delta * Fraction(deepest, n_j), 1)
        return total

    def stretch_factor(self):
        """Lipschitz constant of the deepest coordinate: sum of weights times
        the level order ratios. Controls covering radii of uniform nets."""
        deepest = self.levels[-1]
        return sum(w * Fraction(deepest, n_j) for n_j, w in zip(self.levels, self.weights))

    def net(self, mesh) -> "ModelNet":
        mesh = as_exact(mesh)
        if mesh <= 0:
            raise ValueError("mesh must be positive")
        deepest = self.levels[-1]
        stretch = self.stretch_factor()
        n = deepest * max(1, math.ceil(stretch / (2 * mesh * deepest)))
        if n > MAX_NET_POINTS:
            raise NetSizeError(n)
        pts = [Fraction(k, n) for k in range(n)]
        per_delta = [self.distance(Fraction(k, n), Fraction(0)) for k in range(n)]
        dist = [[per_delta[(i - j) % n] for j in range(n)] for i in range(n)]
        space = FiniteMetricSpace(dist, mode="exact",
                                  provenance=f"net(solenoid{self.levels}, n={n})")
        return ModelNet(space, stretch / (2 * n), pts, self)

    def __repr__(self):
        return f"SolenoidTruncation(levels={self.levels})"


class Sphere2:
    """Round 2-sphere of a given radius with the great-circle metric."""

    kind = "sphere2"

    def __init__(self, radius=1.0):
        self.radius = float(radius)
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def distance(self, a, b):
        # atan2 form is well conditioned near antipodal pairs, unlike acos
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        ang = 2.0 * math.atan2(float(np.linalg.norm(a - b)), float(np.linalg.norm(a + b)))
        return self.radius * ang

    def net(self, mesh) -> "ModelNet":
        mesh = float(mesh)
        if mesh <= 0:
            raise ValueError("mesh must be positive")
        freq = 1
        while True:
            verts, faces = _icosphere(freq)
            bound = self.radius * _covering_bound(verts, faces)
            if bound <= mesh:
                break
            freq += 1
            if 10 * freq * freq + 2 > MAX_NET_POINTS:
                raise NetSizeError(10 * freq * freq + 2)
        space = sphere_points_space(verts, self.radius,
                                    provenance=f"net(sphere2({self.radius}), f={freq})")
        return ModelNet(space, bound, verts, self)

    def __repr__(self):
        return f"Sphere2({self.radius})"


def sphere_points_space(verts: np.ndarray, radius: float = 1.0, provenance: str = "") -> FiniteMetricSpace:
    """Great-circle metric space on unit vectors scaled by radius."""
    diff = np.linalg.norm(verts[:, None, :] - verts[None, :, :], axis=2)
    summ = np.linalg.norm(verts[:, None, :] + verts[None, :, :], axis=2)
    dist = radius * 2.0 * np.arctan2(diff, summ)
    np.fill_diagonal(dist, 0.0)
    dist = (dist + dist.T) / 2.0
    return FiniteMetricSpace(dist.tolist(), mode="approx", provenance=provenance)


@dataclass
class ModelNet:
    """A finite net in a model: the net space, a certified Hausdorff bound
    from the net to the full model, and the model coordinates of net points."""

    space: FiniteMetricSpace
    bound: object
    points: list
    model: object

    def __iter__(self):
        return iter((self.space, self.bound))


# -- icosphere construction ---------------------------------------------------


def _icosahedron() -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    phi = (1 + math.sqrt(5)) / 2
    raw = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            raw.append((0.0, a, b))
            raw.append((a, b, 0.0))
            raw.append((b, 0.0, a))
    verts = np.array(raw)
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    # faces: triples of mutually nearest vertices (edge length is the minimum)
    d2 = ((verts[:, None, :] - verts[None, :, :]) ** 2).sum(axis=2)
    edge2 = np.min(d2[d2 > 1e-9])
    adj = d2 < edge2 + 1e-9
    np.fill_diagonal(adj, False)
    faces = []
    for i in range(12):
        for j in range(i + 1, 12):
            if not adj[i, j]:
                continue
            for k in range(j + 1, 12):
                if adj[i, k] and adj[j, k]:
                    faces.append((i, j, k))
    assert len(faces) == 20
    return verts, faces


def _icosphere(freq: int) -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    """Frequency-f subdivision of the icosahedron projected to the sphere."""
    base_verts, base_faces = _icosahedron()
    verts: list[np.ndarray] = []
    lookup: dict[tuple, int] = {}

    def vertex(p: np.ndarray) -> int:
        p = p / np.linalg.norm(p)
        key = tuple(np.round(p, 9))
        if key not in lookup:
            lookup[key] = len(verts)
            verts.append(p)
        return lookup[key]

    faces: list[tuple[int, int, int]] = []
    for (ia, ib, ic) in base_faces:
        a, b, c = base_verts[ia], base_verts[ib], base_verts[ic]
        grid = {}
        for i in range(freq + 1):
            for j in range(freq + 1 - i):
                k = freq - i - j
                grid[(i, j)] = vertex((i * a + j * b + k * c) / freq)
        for i in range(freq):
            for j in range(freq - i):
                faces.append((grid[(i, j)], grid[(i + 1, j)], grid[(i, j + 1)]))
                if j < freq - i - 1:
                    faces.append((grid[(i + 1, j)], grid[(i + 1, j + 1)], grid[(i, j + 1)]))
    return np.array(verts), faces


def _covering_bound(verts: np.ndarray, faces: list[tuple[int, int, int]]) -> float:
    """Geodesic covering radius bound: max spherical circumradius over faces.

    Any point of a geodesic triangle is within the circumradius of a vertex,
    so the subdivision vertices cover the sphere within this bound."""
    worst = 0.0
    for (i, j, k) in faces:
        a, b, c = verts[i], verts[j], verts[k]
        center = np.cross(b - a, c - a)
        norm = np.linalg.norm(center)
        if norm < 1e-15:
            continue
        center /= norm
        if np.dot(center, a + b + c) < 0:
            center = -center
        r = math.acos(float(np.clip(np.dot(center, a), -1.0, 1.0)))
        worst = max(worst, r)
    return worst + 1e-9


def model_net(model, mesh) -> ModelNet:
    """Finite net of a model space with a certified Hausdorff bound <= mesh."""
    return model.net(mesh)
