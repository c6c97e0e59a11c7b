import random
from fractions import Fraction

import pytest

from homspace.generators import (archimedean_vertices, cayley_space, cycle_space,
                                 small_catalogue, solenoid_approximant)
from homspace.groups import cyclic_group
from homspace.isometry import (IncompleteSearchError, group_as_metric_space, group_metric,
                               is_distance_transitive, is_homogeneous, isometry_group,
                               permutation_subgroup, sphere_orbit_transitivity,
                               verify_isometry_entropy_bound)
from homspace.space import FiniteMetricSpace, sup_product, validate

from oracles import (brute_distance_transitive, brute_isometries, random_exact_space,
                     random_linf_space)


def c(n):
    return cycle_space(n, Fraction(1, n)).space


# -- the group search against the factorial oracle ---------------------------------


def test_two_point_group():
    g = isometry_group(FiniteMetricSpace([[0, 1], [1, 0]]))
    assert g.order == 2 and g.complete and g.full


@pytest.mark.parametrize("name,space", small_catalogue())
def test_group_matches_bruteforce_on_catalogue(name, space):
    if space.n > 8:
        pytest.skip("oracle is factorial")
    got = isometry_group(space)
    assert got.complete
    assert list(got.elements) == brute_isometries(space)


@pytest.mark.parametrize("seed", range(5))
def test_group_matches_bruteforce_on_random(seed):
    rng = random.Random(seed)
    space = (random_exact_space if seed % 2 else random_linf_space)(rng, rng.randint(2, 7))
    assert list(isometry_group(space).elements) == brute_isometries(space)


@pytest.mark.parametrize("seed", range(8))
def test_group_matches_bruteforce_on_random_cayley(seed):
    # symmetric spaces stress the orbit pruning much harder than generic ones
    rng = random.Random(500 + seed)
    n = rng.randint(4, 8)
    group = cyclic_group(n)
    gens = set()
    while not gens:
        for g in range(1, n):
            if rng.random() < 0.5:
                gens.add(g)
                gens.add(group.inv(g))
    try:
        space = cayley_space(group, sorted(gens), Fraction(1, n)).space
    except ValueError:
        pytest.skip("generators did not generate")
    assert list(isometry_group(space).elements) == brute_isometries(space)


@pytest.mark.parametrize("n", range(3, 13))
def test_cycle_groups_are_dihedral(n):
    assert isometry_group(c(n)).order == 2 * n


def test_generic_random_metric_is_rigid():
    rng = random.Random(77)
    space = random_exact_space(rng, 5)
    assert isometry_group(space).order == 1


def test_generators_generate():
    g = isometry_group(c(6))
    got = {g.identity}
    frontier = [g.identity]
    while frontier:
        new = []
        for s in frontier:
            for gen in g.generators:
                p = tuple(gen[s[i]] for i in range(6))
                if p not in got:
                    got.add(p)
                    new.append(p)
        frontier = new
    assert got == set(g.elements)


def test_budget_exhaustion_flags_incomplete():
    space = c(12)
    space._cache.pop("isometry_group", None)
    g = isometry_group(space, node_budget=1)
    assert not g.complete
    assert is_homogeneous(space, g) is None
    assert is_distance_transitive(space, g) is None
    assert sphere_orbit_transitivity(space, 0, Fraction(1, 12), g) is None
    space._cache.pop("isometry_group", None)


# -- predicates ---------------------------------------------------------------------


def test_homogeneous_examples():
    assert is_homogeneous(cayley_space(cyclic_group(5), [1, 4], 1).space) is True
    path = FiniteMetricSpace([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    assert is_homogeneous(path) is False
    ico, _ = archimedean_vertices("icosahedron", check_homogeneous=False)
    assert is_homogeneous(ico) is True


@pytest.mark.parametrize("n", range(3, 13))
def test_cycles_distance_transitive(n):
    assert is_distance_transitive(c(n)) is True


def test_two_point_distance_transitive():
    assert is_distance_transitive(FiniteMetricSpace([[0, 1], [1, 0]])) is True


def test_c4xc4_not_distance_transitive():
    prod = sup_product([c(4), c(4)])
    group = isometry_group(prod)
    assert is_distance_transitive(prod, group) is False
    # cross-checked with the explicit element list
    assert brute_distance_transitive(prod, group.elements) is False


def test_distance_transitive_agrees_with_bruteforce():
    for name, space in small_catalogue():
        group = isometry_group(space)
        assert is_distance_transitive(space, group) == brute_distance_transitive(
            space, group.elements), name


# -- group metric ----------------------------------------------------------------------


def test_group_metric_examples():
    space = c(6)
    g = isometry_group(space)
    ident = g.identity
    rot = tuple((i + 1) % 6 for i in range(6))
    assert group_metric(g, ident, ident) == 0
    assert group_metric(g, rot, ident) == Fraction(1, 6)
    diam = space.diameter
    assert all(group_metric(g, a, b) <= diam for a in g.elements for b in g.elements)


def test_group_metric_rejects_foreign_permutation():
    g = isometry_group(c(6))
    with pytest.raises(ValueError):
        group_metric(g, (1, 0, 2, 3, 4, 5), g.identity)


def test_group_metric_bi_invariance_exhaustive():
    space = c(6)
    g = isometry_group(space)
    els = g.elements

    def compose(p, q):
        return tuple(p[q[i]] for i in range(len(q)))

    for h in els:
        for a in els[:6]:
            for b in els[:6]:
                d = group_metric(g, a, b)
                assert group_metric(g, compose(h, a), compose(h, b)) == d
                assert group_metric(g, compose(a, h), compose(b, h)) == d


def test_group_as_metric_space():
    trivial = isometry_group(random_exact_space(random.Random(77), 5))
    assert group_as_metric_space(trivial).n == 1
    space = c(6)
    gs = group_as_metric_space(isometry_group(space))
    assert gs.n == 12
    assert gs.diameter == Fraction(1, 2)
    assert validate(gs).ok
    # left translation by any element is an isometry of the group space
    assert isometry_group(gs).order >= 12


def test_group_space_diameter_bounded_by_base():
    for name, space in small_catalogue():
        group = isometry_group(space)
        if group.order > 200:
            continue
        gs = group_as_metric_space(group)
        assert gs.diameter <= space.diameter or gs.n == 1, name


# -- entropy bound -----------------------------------------------------------------------


def test_entropy_bound_examples():
    chk = verify_isometry_entropy_bound(c(6), 0.4)
    assert chk.holds and chk.lhs <= 12 and chk.rhs == 6 ** 6
    point = FiniteMetricSpace([[0]])
    chk1 = verify_isometry_entropy_bound(point, 1)
    assert chk1.lhs == 1 and chk1.rhs == 1 and chk1.holds


def test_entropy_bound_requires_complete_group():
    space = c(10)
    space._cache.pop("isometry_group", None)
    bad = isometry_group(space, node_budget=1)
    space._cache.pop("isometry_group", None)
    with pytest.raises(IncompleteSearchError):
        verify_isometry_entropy_bound(space, 0.3, group=bad)


# -- stabilizer orbits on spheres ------------------------------------------------------------


def test_sphere_orbit_examples():
    space = c(8)
    for r in set(space.distance_values()) - {0}:
        assert sphere_orbit_transitivity(space, 0, r) is True
    assert sphere_orbit_transitivity(space, 0, 10) is True  # empty sphere
    prod = sup_product([c(4), c(4)])
    assert sphere_orbit_transitivity(prod, 0, Fraction(1, 4)) is False


# -- declared subgroups -------------------------------------------------------------------


def test_permutation_subgroup_rotations():
    space = c(8)
    rot = tuple((i + 1) % 8 for i in range(8))
    sub = permutation_subgroup(space, [rot])
    assert sub.order == 8 and sub.complete and not sub.full
    assert is_distance_transitive(space, sub) is None  # not the full group


def test_permutation_subgroup_rejects_non_isometry():
    space = c(8)
    swap = (1, 0) + tuple(range(2, 8))
    with pytest.raises(ValueError):
        permutation_subgroup(space, [swap])


def test_solenoid_approximant_group():
    space = solenoid_approximant(3, 12)
    g = isometry_group(space)
    assert g.order == 24  # rotations and the reflection
    assert is_homogeneous(space, g) is True


def test_petersen_graph_group_and_transitivity():
    # 2-subsets of a 5-set, adjacent when disjoint: the automorphism group is
    # the symmetric group on 5 letters (order 120) acting distance-transitively
    import itertools

    from homspace.generators import girth, graph_space

    pairs = list(itertools.combinations(range(5), 2))
    idx = {p: i for i, p in enumerate(pairs)}
    edges = [(idx[a], idx[b]) for a in pairs for b in pairs
             if idx[a] < idx[b] and not set(a) & set(b)]
    pet = graph_space(10, edges, 1)
    group = isometry_group(pet.space)
    assert group.order == 120
    assert is_distance_transitive(pet.space, group) is True
    assert girth(pet) == 5


def test_hypercube_groups():
    from homspace.groups import direct_product

    q3g = direct_product(direct_product(cyclic_group(2), cyclic_group(2)), cyclic_group(2))
    q3 = cayley_space(q3g, [1, 2, 4], 1).space
    assert isometry_group(q3).order == 48  # 2^3 * 3!
    q4g = direct_product(q3g, cyclic_group(2))
    q4 = cayley_space(q4g, [1, 2, 4, 8], 1).space
    assert isometry_group(q4).order == 384  # 2^4 * 4!
    assert is_distance_transitive(q4) is True


def test_cayley_translations_embed_in_computed_group():
    from homspace.groups import direct_product, symmetric_group

    for group, gens in [
        (cyclic_group(7), [1, 6]),
        (direct_product(cyclic_group(2), cyclic_group(3)), [1, 2, 2 * 3 - 2]),
        (symmetric_group(3), [1, 2]),
    ]:
        sym = sorted(set(gens) | {group.inv(g) for g in gens})
        space = cayley_space(group, sym, 1).space
        computed = isometry_group(space)
        assert computed.order >= group.n
        for a in range(group.n):
            translation = tuple(group.mul(a, x) for x in range(group.n))
            assert translation in computed
