import itertools
import random
from fractions import Fraction

import pytest

from homspace.gh import (Correspondence, distortion, epsilon_equivalence, gh_exact,
                         gh_lower_bounds, gh_to_model, gh_upper_from_map, greedy_alignment,
                         upper_bound_from_correspondence)
from homspace.generators import cycle_space, small_catalogue
from homspace.models import Circle
from homspace.space import FiniteMetricSpace, packing_number, scale, sup_product

from oracles import gh_exhaustive, random_exact_space


def c(n):
    return cycle_space(n, Fraction(1, n)).space


POINT = FiniteMetricSpace([[0]])


# -- distortion -----------------------------------------------------------------


def test_distortion_diagonal_is_zero():
    space = c(6)
    assert distortion(Correspondence.diagonal(6), space, space) == 0


def test_distortion_all_pairs_vs_point():
    space = c(6)
    corr = Correspondence.all_pairs(6, 1)
    assert distortion(corr, space, POINT) == space.diameter


def test_distortion_requires_surjectivity():
    space = c(6)
    partial = Correspondence(tuple((i, 0) for i in range(3)))
    with pytest.raises(ValueError):
        distortion(partial, space, POINT)


def test_distortion_submatching_roots_of_unity():
    # C6 embedded in the 12-point circle net distorts nothing
    c6 = c(6)
    net12 = Circle(1).net(Fraction(1, 24)).space
    assert net12.n == 12
    sub = Correspondence(tuple((i, 2 * i) for i in range(6)))
    assert distortion(sub, c6, net12, partial=True) == 0


# -- exact search ------------------------------------------------------------------


def test_gh_exact_self_distance_zero():
    for name, space in small_catalogue():
        res = gh_exact(space, space)
        assert res.exact and res.lower == res.upper == 0, name


def test_gh_exact_point_vs_cycle():
    res = gh_exact(POINT, c(6))
    assert res.exact and res.upper == Fraction(1, 4)


def test_gh_exact_two_point_spaces():
    a = FiniteMetricSpace([[0, 1], [1, 0]])
    b = FiniteMetricSpace([[0, Fraction(3, 5)], [Fraction(3, 5), 0]])
    res = gh_exact(a, b)
    assert res.exact and res.lower == res.upper == Fraction(1, 5)


@pytest.mark.parametrize("seed", range(8))
def test_gh_exact_matches_exhaustive(seed):
    rng = random.Random(1000 + seed)
    X = random_exact_space(rng, rng.randint(1, 5))
    Y = random_exact_space(rng, rng.randint(1, 5))
    res = gh_exact(X, Y)
    assert res.exact
    assert res.lower == res.upper == gh_exhaustive(X, Y)


def test_gh_exact_symmetric():
    rng = random.Random(5)
    X, Y = random_exact_space(rng, 4), random_exact_space(rng, 5)
    assert gh_exact(X, Y).upper == gh_exact(Y, X).upper


def test_gh_exact_zero_iff_isometric():
    rng = random.Random(9)
    X = random_exact_space(rng, 5)
    perm = list(range(5))
    rng.shuffle(perm)
    Y = FiniteMetricSpace([[X.dist[perm[i]][perm[j]] for j in range(5)] for i in range(5)])
    assert gh_exact(X, Y).upper == 0
    # across the whole small catalogue: zero distance exactly when some
    # bijection matches the distance matrices
    spaces = [s for _, s in small_catalogue()]
    for A, B in itertools.combinations(spaces, 2):
        value = gh_exact(A, B).upper
        if A.n != B.n:
            assert value > 0
            continue
        isometric = any(
            all(A.dist[p[i]][p[j]] == B.dist[i][j]
                for i in range(A.n) for j in range(A.n))
            for p in itertools.permutations(range(A.n)))
        assert (value == 0) == isometric


def test_gh_exact_budget_exhaustion_is_flagged():
    rng = random.Random(3)
    X, Y = random_exact_space(rng, 5), random_exact_space(rng, 5)
    res = gh_exact(X, Y, budget=3)
    assert not res.exact
    assert res.lower <= res.upper


def test_gh_exact_completes_at_seven_points():
    rng = random.Random(9007)
    X, Y = random_exact_space(rng, 7), random_exact_space(rng, 7)
    res = gh_exact(X, Y)
    assert res.exact
    assert res.notes["nodes"] < 10 ** 6  # enormous headroom under the default budget


def test_gh_exact_float_mode():
    a = FiniteMetricSpace([[0.0, 1.0], [1.0, 0.0]], mode="approx")
    b = FiniteMetricSpace([[0.0, 0.25], [0.25, 0.0]], mode="approx")
    res = gh_exact(a, b)
    assert res.exact
    assert abs(res.upper - 0.375) <= 1e-12


# -- lower bounds ---------------------------------------------------------------------


def test_lower_bounds_identical_spaces():
    space = c(6)
    value, cert = gh_lower_bounds(space, space)
    assert value == 0


def test_lower_bounds_diameter_fires():
    value, cert = gh_lower_bounds(POINT, c(6))
    assert value == Fraction(1, 4)
    assert cert.kind == "diameter"
    assert value == gh_exact(POINT, c(6)).upper


def test_lower_bounds_packing_transfer_fires_on_grid_vs_cycle():
    c12 = c(12)
    grid = scale(sup_product([c12, c12]), 1)
    value, cert = gh_lower_bounds(c12, grid)
    assert value > 0
    assert cert.kind in ("packing-transfer", "diameter")
    # the 2d grid packs quadratically more points at small scales
    assert packing_number(grid, Fraction(1, 12)).count > packing_number(
        c12, Fraction(1, 12)).count


def test_lower_never_exceeds_exact():
    rng = random.Random(21)
    for _ in range(6):
        X = random_exact_space(rng, rng.randint(2, 5))
        Y = random_exact_space(rng, rng.randint(2, 5))
        lo, _ = gh_lower_bounds(X, Y)
        res = gh_exact(X, Y)
        assert lo <= res.upper + Fraction(1, 10 ** 12)
        f = greedy_alignment(X, Y)
        up, _ = gh_upper_from_map(X, Y, f)
        assert res.upper <= up


def test_packing_transfer_inequality_on_random_correspondences():
    rng = random.Random(31)
    names = small_catalogue()
    for _ in range(20):
        _, X = names[rng.randrange(len(names))]
        _, Y = names[rng.randrange(len(names))]
        f = [rng.randrange(Y.n) for _ in range(X.n)]
        g = [rng.randrange(X.n) for _ in range(Y.n)]
        corr = Correspondence.from_maps(f, g)
        dis = distortion(corr, X, Y)
        grid = sorted(set(v for v in X.distance_values() + Y.distance_values() if v > dis))
        for eps in grid:
            px = packing_number(X, eps)
            py = packing_number(Y, eps - dis) if eps - dis > 0 else None
            if py is None or not (px.exact and py.exact):
                continue
            assert px.count <= py.count


# -- upper bounds ----------------------------------------------------------------------


def test_upper_from_identity_map():
    space = c(6)
    up, corr = gh_upper_from_map(space, space, list(range(6)))
    assert up == 0


def test_upper_from_inclusion_into_net():
    m = 8
    grid = c(m)
    net = Circle(1).net(Fraction(1, 4 * m))  # 2m points
    up, corr = gh_upper_from_map(grid, net.space, [2 * i for i in range(m)])
    assert up <= Fraction(1, 2 * m) + Fraction(1, 4 * m)


def test_constant_map_upper_dominates_exact():
    space = c(5)
    up, _ = gh_upper_from_map(space, POINT, [0] * 5)
    assert up >= gh_exact(space, POINT).upper


def test_upper_bound_from_correspondence_helper():
    space = c(4)
    corr = Correspondence.diagonal(4)
    assert upper_bound_from_correspondence(space, space, corr) == 0


# -- model bounds -----------------------------------------------------------------------


def test_gh_to_model_net_of_itself():
    net = Circle(1).net(Fraction(1, 12))
    bounds = gh_to_model(net.space, Circle(1), Fraction(1, 12))
    assert bounds.upper <= 2 * net.bound
    assert bounds.lower <= bounds.upper


def test_gh_to_model_cycles_converge():
    uppers = []
    for n in (12, 24, 48):
        bounds = gh_to_model(c(n), Circle(1), Fraction(1, 192))
        assert bounds.lower <= bounds.upper
        uppers.append(bounds.upper)
    assert uppers[0] > uppers[-1]


# -- epsilon equivalences ------------------------------------------------------------------


def test_epsilon_equivalence_diagonal():
    space = c(6)
    eq = epsilon_equivalence(space, space, Correspondence.diagonal(6))
    assert eq.f == tuple(range(6)) and eq.g == tuple(range(6)) and eq.epsilon == 0


def test_epsilon_equivalence_point_case():
    space = c(6)
    res = gh_exact(POINT, space)
    eq = epsilon_equivalence(POINT, space, res.certificate_upper)
    assert eq.epsilon == space.diameter


def test_epsilon_equivalence_doubling():
    c12, c24 = c(12), c(24)
    pairs = [(i, 2 * i) for i in range(12)] + [(j // 2, j) for j in range(24)]
    eq = epsilon_equivalence(c12, c24, Correspondence(tuple(pairs)))
    assert eq.epsilon == Fraction(1, 24)
    for i in range(12):
        assert c12.dist[i][eq.g[eq.f[i]]] <= eq.epsilon
    for j in range(24):
        assert c24.dist[j][eq.f[eq.g[j]]] <= eq.epsilon


# -- metric axioms on the catalogue (spot check; acceptance runs the full set) ------------


def test_gh_triangle_inequality_on_small_spaces():
    rng = random.Random(8)
    spaces = [random_exact_space(rng, rng.randint(2, 4)) for _ in range(4)]
    vals = {}
    for i, j in itertools.combinations(range(4), 2):
        vals[(i, j)] = vals[(j, i)] = gh_exact(spaces[i], spaces[j]).upper
    for i in range(4):
        vals[(i, i)] = Fraction(0)
    for i, j, k in itertools.permutations(range(4), 3):
        assert vals[(i, k)] <= vals[(i, j)] + vals[(j, k)] + Fraction(1, 10 ** 9)
