import random

import numpy as np
import pytest

from homspace._kernels import BACKEND, _pure

try:
    from homspace._kernels import _cliquer
except ImportError:
    _cliquer = None

BACKENDS = [("pure", _pure)] + ([("cython", _cliquer)] if _cliquer else [])


def random_graph(rng, n, p):
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                adj[i, j] = adj[j, i] = True
    return adj


def brute_max_clique_size(adj):
    import itertools

    n = adj.shape[0]
    for k in range(n, 0, -1):
        for sub in itertools.combinations(range(n), k):
            if all(adj[a, b] for a, b in itertools.combinations(sub, 2)):
                return k
    return 0


@pytest.mark.parametrize("backend_name,mod", BACKENDS)
@pytest.mark.parametrize("seed", range(8))
def test_max_clique_matches_bruteforce(backend_name, mod, seed):
    rng = random.Random(seed)
    n = rng.randint(1, 11)
    adj = random_graph(rng, n, rng.choice([0.2, 0.5, 0.8]))
    members, complete, _ = mod.max_clique(adj, None)
    assert complete
    assert len(members) == brute_max_clique_size(adj)
    assert all(adj[a, b] for i, a in enumerate(members) for b in members[i + 1:])


@pytest.mark.skipif(_cliquer is None, reason="compiled kernel not built")
@pytest.mark.parametrize("seed", range(12))
def test_backends_agree_exactly(seed):
    rng = random.Random(100 + seed)
    n = rng.randint(1, 40)
    adj = random_graph(rng, n, rng.random())
    got_pure = _pure.max_clique(adj, None)
    got_fast = _cliquer.max_clique(adj, None)
    assert got_pure == got_fast


@pytest.mark.skipif(_cliquer is None, reason="compiled kernel not built")
def test_backends_agree_under_budget():
    rng = random.Random(7)
    adj = random_graph(rng, 30, 0.7)
    for budget in (1, 10, 100, 1000):
        assert _pure.max_clique(adj, budget) == _cliquer.max_clique(adj, budget)


@pytest.mark.parametrize("backend_name,mod", BACKENDS)
def test_edge_cases(backend_name, mod):
    assert mod.max_clique(np.zeros((0, 0), dtype=bool), None) == ([], True, 0)
    lone = mod.max_clique(np.zeros((1, 1), dtype=bool), None)
    assert lone[0] == [0] and lone[1]
    empty5 = mod.max_clique(np.zeros((5, 5), dtype=bool), None)
    assert len(empty5[0]) == 1
    full = np.ones((6, 6), dtype=bool)
    np.fill_diagonal(full, False)
    assert mod.max_clique(full, None)[0] == [0, 1, 2, 3, 4, 5]


def test_selected_backend_is_exported():
    assert BACKEND in ("pure", "cython")
