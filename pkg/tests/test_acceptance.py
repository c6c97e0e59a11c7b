"""Acceptance gate: one test (and one printed pass/fail line) per criterion.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import itertools
import math
import random
import time
from fractions import Fraction

from homspace.experiments import exp_solenoid, exp_sphere_gap
from homspace.gh import Correspondence, distortion, epsilon_equivalence, gh_exact, gh_to_model
from homspace.generators import cycle_space, small_catalogue, catalogue
from homspace.isometry import isometry_group, verify_isometry_entropy_bound
from homspace.models import Circle
from homspace.quasimorph import (GroupAction, QuasiMap, defect, density,
                                 limit_quasi_morphism, snap_to_subgroup)
from homspace.groups import cyclic_group
from homspace.space import packing_number

from oracles import brute_isometries, gh_exhaustive, random_exact_space, random_linf_space


def _report(k: int, name: str, ok: bool, detail: str = ""):
    print(f"\n[acceptance {k:02d}] {name}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"criterion {k} failed: {detail}"


def c(n):
    return cycle_space(n, Fraction(1, n)).space


def test_criterion_1_gh_oracle_equivalence():
    rng = random.Random(20240501)
    t0 = time.monotonic()
    mismatches = []
    for trial in range(50):
        X = random_exact_space(rng, rng.randint(1, 5))
        Y = random_exact_space(rng, rng.randint(1, 5))
        res = gh_exact(X, Y)
        oracle = gh_exhaustive(X, Y)
        if not (res.exact and res.lower == res.upper == oracle):
            mismatches.append((trial, X.n, Y.n, str(res.upper), str(oracle)))
    elapsed = time.monotonic() - t0
    ok = not mismatches and elapsed < 120
    _report(1, "gh_exact equals exhaustive function-pair enumeration (50 pairs)",
            ok, f"mismatches={mismatches} elapsed={elapsed:.1f}s")


def test_criterion_2_gh_metric_axioms():
    spaces = [s for _, s in small_catalogue()]
    assert len(spaces) == 12 and all(s.n <= 6 for s in spaces)
    tol = Fraction(1, 10 ** 9)
    d = {}
    for i, j in itertools.combinations(range(len(spaces)), 2):
        fwd = gh_exact(spaces[i], spaces[j]).upper
        bwd = gh_exact(spaces[j], spaces[i]).upper
        assert abs(fwd - bwd) <= tol
        d[(i, j)] = d[(j, i)] = fwd
    for i in range(len(spaces)):
        d[(i, i)] = Fraction(0)
    violations = sum(
        1
        for i, j, k in itertools.permutations(range(len(spaces)), 3)
        if d[(i, k)] > d[(i, j)] + d[(j, k)] + tol
    )
    _report(2, "GH symmetry and triangle inequality on the 12-space catalogue",
            violations == 0, f"violations={violations}")


def test_criterion_3_cycle_convergence():
    t0 = time.monotonic()
    failures = []
    for eps in (0.05, 0.1, 0.2):
        floor_n = math.ceil(10 / eps)
        for n in (floor_n, 2 * floor_n):
            res = packing_number(c(n), eps)
            if not (res.exact and abs(res.count - 1 / eps) <= 1):
                failures.append((eps, n, res.count, res.exact))
    bounds = gh_to_model(c(96), Circle(1), Fraction(1, 384))
    gh_ok = bounds.upper <= Fraction(1, 96)
    elapsed = time.monotonic() - t0
    detail = (f"band_failures={failures} gh_upper={bounds.upper} "
              f"(limit 1/96) elapsed={elapsed:.1f}s")
    _report(3, "cycle convergence: packing band and GH upper bound at n=96",
            not failures and gh_ok and elapsed < 60, detail)


def test_criterion_4_isometry_oracle():
    bad = []
    for name, space in catalogue(max_points=8):
        got = isometry_group(space)
        if not got.complete or list(got.elements) != brute_isometries(space):
            bad.append(name)
    orders = {n: isometry_group(c(n)).order for n in range(3, 13)}
    order_ok = all(orders[n] == 2 * n for n in orders)
    _report(4, "isometry groups equal brute force (n <= 8); cycle orders are 2n",
            not bad and order_ok, f"bruteforce_mismatch={bad} cycle_orders={orders}")


def test_criterion_5_isometry_entropy_lemma():
    rng = random.Random(20240502)
    checked = 0
    violations = 0
    for _ in range(100):
        space = random_linf_space(rng, 6)
        diam = space.diameter
        for eps in (diam / 4, diam / 2, diam):
            chk = verify_isometry_entropy_bound(space, eps)
            checked += 1
            violations += 0 if chk.holds else 1
    for name, space in catalogue(max_points=12):
        diam = space.diameter
        eps_grid = (diam / 4, diam / 2) if diam > 0 else (Fraction(1),)
        for eps in eps_grid:
            chk = verify_isometry_entropy_bound(space, eps)
            checked += 1
            violations += 0 if chk.holds else 1
    _report(5, "isometry-entropy bound E'(e)=E(e/4)^E(e/4) holds everywhere",
            violations == 0, f"checked={checked} violations={violations}")


def test_criterion_6_tower_defect_bound():
    rows = []
    ok = True
    prev = None
    for n in (12, 24, 48, 96):
        cn, c2n = c(n), c(2 * n)
        pairs = [(i, 2 * i) for i in range(n)] + [(j // 2, j) for j in range(2 * n)]
        eq = epsilon_equivalence(cn, c2n, Correspondence(tuple(pairs)))
        act_n = GroupAction.from_permutations(cn, [tuple((i + 1) % n for i in range(n))])
        act = GroupAction.from_permutations(
            c2n, [tuple((i + 1) % (2 * n) for i in range(2 * n))])
        res = limit_quasi_morphism(act_n, act,
                                   [2 * i for i in range(n)], [j // 2 for j in range(2 * n)],
                                   [2 * k for k in range(n)], [j // 2 for j in range(2 * n)])
        d = res.qm.defect_value
        ok = ok and d <= 11 * eq.epsilon
        if prev is not None:
            ok = ok and float(d) <= float(prev) + 1e-9
        prev = d
        rows.append((n, str(eq.epsilon), str(d)))
    _report(6, "tower map defect <= 11 epsilon on n in {12,24,48,96}, monotone to 0",
            ok, f"rows={rows}")


def test_criterion_7_snap_budget():
    rng = random.Random(20240503)
    ok = True
    for _ in range(50):
        m = rng.randrange(4, 40)
        j = rng.randrange(2, 24)
        cmul = rng.randrange(1, m)
        base = [Fraction((cmul * k) % m, m) for k in range(m)]
        wobble = m * rng.randrange(4, 10)
        noisy = tuple((b + Fraction(rng.randrange(-1, 2), wobble)) % 1 for b in base)
        qm = QuasiMap(cyclic_group(m), Circle(1), noisy)
        d0 = defect(qm)
        eps = max(d0, Fraction(1, 2 * j))
        snapped = snap_to_subgroup(qm, [Fraction(k, j) for k in range(j)], eps)
        dens_before = density(qm).value
        dens_after = density(snapped).value
        ok = ok and snapped.defect_value <= 4 * eps and dens_after <= dens_before + eps
    _report(7, "snapped maps stay within the 4-epsilon defect and density budgets",
            ok, "50 exact instances")


def test_criterion_8_solenoid_cauchy():
    t0 = time.monotonic()
    rep = exp_solenoid([1, 2, 3, 4, 5, 6])
    elapsed = time.monotonic() - t0
    ok = rep.verdicts["cauchy_certificate"] and rep.verdicts["all_homogeneous"] \
        and elapsed < 60
    bounds = [r["gh_upper_from_prev"]["value"] for r in rep.rows if r["gh_upper_from_prev"]]
    _report(8, "solenoid tower is GH-Cauchy with certified bounds, all homogeneous",
            ok, f"uppers={bounds} elapsed={elapsed:.1f}s")


def test_criterion_9_packing_transfer_soundness():
    rng = random.Random(20240504)
    names = small_catalogue()
    checks = 0
    violations = 0
    for _ in range(100):
        _, X = names[rng.randrange(len(names))]
        _, Y = names[rng.randrange(len(names))]
        f = [rng.randrange(Y.n) for _ in range(X.n)]
        g = [rng.randrange(X.n) for _ in range(Y.n)]
        corr = Correspondence.from_maps(f, g)
        dis = distortion(corr, X, Y)
        grid = sorted(set(v for v in X.distance_values() + Y.distance_values() if v > dis))
        for eps in grid:
            if eps - dis <= 0:
                continue
            px = packing_number(X, eps)
            py = packing_number(Y, eps - dis)
            if not (px.exact and py.exact):
                continue
            checks += 1
            if px.count > py.count:
                violations += 1
    _report(9, "packing transfer inequality across 100 random correspondences",
            violations == 0, f"grid_checks={checks} violations={violations}")


def test_criterion_10_sphere_gap_report():
    t0 = time.monotonic()
    rep = exp_sphere_gap(mesh=0.4)
    elapsed = time.monotonic() - t0
    ordered = rep.verdicts["rows_ordered"]
    point_row = next(r for r in rep.rows if r["name"] == "point")
    slack = point_row["net_bound"]["value"]
    point_ok = abs(point_row["lower"]["value"] - (math.pi / 2 - slack)) <= 1e-6
    names = [r["name"] for r in rep.rows]
    soccer_present = "truncated_icosahedron" in names
    ok = ordered and point_ok and soccer_present and elapsed < 300
    _report(10, "sphere gap report: full catalogue, ordered bounds, point row exact",
            ok, f"rows={len(rep.rows)} point_lower={point_row['lower']['value']:.6f} "
                f"elapsed={elapsed:.1f}s")
