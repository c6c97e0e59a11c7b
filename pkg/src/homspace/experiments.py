"""Reproducible experiment campaigns over the generators and certificates.

Reports are deterministic: given the same seed and package version the JSON
rendering is byte-identical. Randomized campaigns use Python's Mersenne
Twister (``random.Random``) so seeds are portable across platforms.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .generators import (ARCHIMEDEAN_NAMES, archimedean_vertices, catalogue, cayley_space,
                         cycle_space, girth, solenoid_approximant, torus_grid)
from .gh import (Correspondence, distortion, gh_lower_bounds, gh_to_model,
                 gh_upper_from_map, greedy_alignment)
from .groups import cyclic_group, direct_product
from .isometry import is_distance_transitive, is_homogeneous, verify_isometry_entropy_bound
from .models import Circle, Sphere2, Torus
from .quasimorph import (GroupAction, QuasiMap, defect, density, limit_quasi_morphism,
                         snap_to_subgroup)
from .space import FiniteMetricSpace, packing_number


def cell(value, exact: bool | None = None) -> dict:
    """A numeric report cell carrying its exactness flag."""
    if exact is None:
        exact = isinstance(value, (int, Fraction)) and not isinstance(value, bool)
    return {"value": fmt_value(value), "exact": bool(exact)}


def fmt_value(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


@dataclass
class ExperimentReport:
    name: str
    params: dict
    columns: list
    rows: list
    verdicts: dict
    seed: int | None = None
    version: str = __version__
    notes: dict = field(default_factory=dict)

    @property
    def all_verdicts_pass(self) -> bool:
        return all(bool(v) for v in self.verdicts.values())

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.name,
            "params": self.params,
            "columns": self.columns,
            "rows": self.rows,
            "verdicts": self.verdicts,
            "seed": self.seed,
            "version": self.version,
            "notes": self.notes,
        }

    def to_json_bytes(self) -> bytes:
        return (json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))
                + "\n").encode()

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        flat_cols: list = []
        for c in self.columns:
            flat_cols.append(c)
            if any(isinstance(r.get(c), dict) for r in self.rows):
                flat_cols.append(c + "_exact")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(flat_cols)
        for r in self.rows:
            out = []
            for c in self.columns:
                v = r.get(c)
                if isinstance(v, dict):
                    out.extend([v["value"], v["exact"]])
                else:
                    out.append(v)
                    if c + "_exact" in flat_cols:
                        out.append("")
            writer.writerow(out)
        writer.writerow([])
        writer.writerow(["verdict", "pass"])
        for k in sorted(self.verdicts):
            writer.writerow([k, self.verdicts[k]])
        return buf.getvalue()


# -- cycles -> circle -----------------------------------------------------------


def exp_converge_cycles(n_list, eps_list, mesh) -> ExperimentReport:
    """Scaled cycles against the circumference-1 circle: GH bounds via a net,
    packing numbers per scale, and the girth column (constant 1 under the
    circumference-1 convention)."""
    n_list = sorted(set(int(n) for n in n_list))
    eps_list = list(eps_list)
    circle = Circle(1)
    rows = []
    uppers = []
    band_all = True
    girth_ok = True
    for n in n_list:
        g = cycle_space(n, Fraction(1, n))
        bounds = gh_to_model(g.space, circle, mesh)
        gv = girth(g)
        row = {
            "n": n,
            "gh_lower": cell(bounds.lower),
            "gh_upper": cell(bounds.upper),
            "net_bound": cell(bounds.notes["net_bound"]),
            "girth": cell(gv),
        }
        girth_ok = girth_ok and gv == 1
        uppers.append(bounds.upper)
        for eps in eps_list:
            res = packing_number(g.space, eps)
            row[f"packing@{eps}"] = cell(res.count, res.exact)
            applicable = n >= 10 / eps
            ok = None
            if applicable:
                ok = bool(res.exact and abs(res.count - 1 / eps) <= 1)
                band_all = band_all and ok
            row[f"band_ok@{eps}"] = ok
        rows.append(row)
    columns = ["n", "gh_lower", "gh_upper", "net_bound", "girth"]
    for eps in eps_list:
        columns += [f"packing@{eps}", f"band_ok@{eps}"]
    verdicts = {
        "gh_upper_non_increasing": all(float(b) <= float(a) + 1e-12
                                       for a, b in zip(uppers, uppers[1:])),
        "packing_band_within_1": band_all,
        "girth_constant_1": girth_ok,
    }
    return ExperimentReport("converge_cycles",
                            {"n_list": n_list, "eps_list": eps_list, "mesh": fmt_value(mesh)},
                            columns, rows, verdicts)


# -- torus grids ----------------------------------------------------------------


def exp_torus(d: int, m_list, mesh=None) -> ExperimentReport:
    """Grids (Z_m)^d against the d-torus model; distance transitivity is
    expected to fail for d >= 2."""
    if d not in (1, 2, 3):
        raise ValueError("d must be 1, 2 or 3")
    m_list = sorted(set(int(m) for m in m_list))
    model = Torus([1] * d)
    rows = []
    uppers = []
    dt_flags = []
    for m in m_list:
        grid = torus_grid(d, m, [1] * d)
        net_mesh = mesh if mesh is not None else Fraction(1, 4 * m)
        bounds = gh_to_model(grid, model, net_mesh)
        dt = is_distance_transitive(grid)
        rows.append({
            "m": m,
            "points": grid.n,
            "gh_lower": cell(bounds.lower),
            "gh_upper": cell(bounds.upper),
            "net_bound": cell(bounds.notes["net_bound"]),
            "distance_transitive": dt,
        })
        uppers.append(bounds.upper)
        dt_flags.append(dt)
    verdicts = {
        "gh_upper_non_increasing": all(float(b) <= float(a) + 1e-12
                                       for a, b in zip(uppers, uppers[1:])),
        "distance_transitivity_as_expected": all(
            (flag is True) if d == 1 else (flag is False) for flag in dt_flags),
    }
    return ExperimentReport("torus", {"d": d, "m_list": m_list,
                                      "mesh": fmt_value(mesh) if mesh is not None else None},
                            ["m", "points", "gh_lower", "gh_upper", "net_bound",
                             "distance_transitive"],
                            rows, verdicts)


# -- solenoid tower --------------------------------------------------------------


def exp_solenoid(depth_list, multiplier: int = 1) -> ExperimentReport:
    """Cauchy certificate for the factorial solenoid tower: consecutive
    approximants are close in GH, with the bound sum_{j>K} 2^-(j+1)."""
    depths = sorted(set(int(k) for k in depth_list))
    if any(k < 1 for k in depths):
        raise ValueError("depths must be >= 1")
    if depths != list(range(depths[0], depths[0] + len(depths))):
        raise ValueError("depths must be consecutive for the Cauchy certificate")
    spaces = {}
    rows = []
    uppers = []
    homog_all = True
    cauchy_all = True
    for k in depths:
        n_k = multiplier * math.factorial(k)
        spaces[k] = solenoid_approximant(k, n_k)
        hom = is_homogeneous(spaces[k])
        homog_all = homog_all and hom is True
        row = {"depth": k, "n": n_k, "homogeneous": hom}
        if k - 1 in spaces:
            prev = spaces[k - 1]
            n_prev = multiplier * math.factorial(k - 1)
            pairs = tuple((m % n_prev, m) for m in range(n_k))
            corr = Correspondence(pairs)
            dis = distortion(corr, prev, spaces[k])
            upper = dis / 2
            bound = Fraction(1, 2 ** k)  # sum_{j > k-1} 2^-(j+1)
            row["gh_upper_from_prev"] = cell(upper)
            row["cauchy_bound"] = cell(bound)
            row["within_bound"] = bool(upper <= bound)
            cauchy_all = cauchy_all and upper <= bound
            uppers.append(upper)
        else:
            row["gh_upper_from_prev"] = None
            row["cauchy_bound"] = None
            row["within_bound"] = None
        rows.append(row)
    halving = all(float(b) <= float(a) / 2 + 1e-9 for a, b in zip(uppers, uppers[1:]))
    verdicts = {
        "cauchy_certificate": cauchy_all,
        "bounds_halve": halving,
        "all_homogeneous": homog_all,
    }
    return ExperimentReport("solenoid", {"depth_list": depths, "multiplier": multiplier},
                            ["depth", "n", "homogeneous", "gh_upper_from_prev",
                             "cauchy_bound", "within_bound"],
                            rows, verdicts)


# -- sphere gap -------------------------------------------------------------------


def default_sphere_candidates():
    """The declared candidate catalogue: a point, the polyhedron vertex sets,
    a torus grid and two Cayley spaces."""
    cands = [("point", FiniteMetricSpace([[0]], provenance="point"), None)]
    for name in ARCHIMEDEAN_NAMES:
        space, coords = archimedean_vertices(name, check_homogeneous=False)
        cands.append((name, space, coords))
    cands.append(("torus_grid_2x4", torus_grid(2, 4, [1, 1]), None))
    z2cube = direct_product(direct_product(cyclic_group(2), cyclic_group(2)), cyclic_group(2))
    cands.append(("cayley_z2_cube", cayley_space(z2cube, [1, 2, 4], Fraction(1, 3)).space, None))
    cands.append(("cycle_12", cycle_space(12, Fraction(1, 12)).space, None))
    return cands


def exp_sphere_gap(candidates=None, mesh: float = 0.4) -> ExperimentReport:
    """Measured GH gaps from finite homogeneous candidates to the unit sphere.

    Reports lower/upper bounds per candidate (sorted by lower bound) plus the
    declared net slack; no convergence verdict is claimed.
    """
    sphere = Sphere2(1.0)
    net = sphere.net(mesh)
    N, h = net.space, net.bound
    if candidates is None:
        candidates = default_sphere_candidates()
    rows = []
    excluded = []
    for name, space, coords in candidates:
        if is_homogeneous(space) is not True:
            excluded.append({"name": name, "note": "excluded: not homogeneous"})
            continue
        lower, cert = gh_lower_bounds(space, N)
        if coords is not None:
            nv = np.asarray(net.points)
            fmap = [int(np.argmax(nv @ c)) for c in coords]
        else:
            fmap = greedy_alignment(space, N)
        upper, _ = gh_upper_from_map(space, N, fmap)
        lo = max(float(lower) - float(h), 0.0)
        up = float(upper) + float(h)
        rows.append({
            "name": name,
            "points": space.n,
            "lower": cell(lo, False),
            "upper": cell(up, False),
            "net_bound": cell(float(h), False),
            "lower_certificate": cert.kind,
        })
    rows.sort(key=lambda r: (r["lower"]["value"], r["name"]))
    verdicts = {
        "rows_ordered": all(r["lower"]["value"] <= r["upper"]["value"] for r in rows),
    }
    return ExperimentReport("sphere_gap", {"mesh": mesh, "net_points": N.n},
                            ["name", "points", "lower", "upper", "net_bound",
                             "lower_certificate"],
                            rows, verdicts, notes={"excluded": excluded})


# -- lemma suite -------------------------------------------------------------------


def _random_rational_linf_space(rng: random.Random, n: int, denom: int = 64) -> FiniteMetricSpace:
    """Random exact metric: rational points in the unit square under L-infinity."""
    while True:
        pts = [(Fraction(rng.randrange(denom + 1), denom),
                Fraction(rng.randrange(denom + 1), denom)) for _ in range(n)]
        if len(set(pts)) == n:
            break
    dist = [[max(abs(a[0] - b[0]), abs(a[1] - b[1])) for b in pts] for a in pts]
    return FiniteMetricSpace(dist, mode="exact", provenance=f"random_linf(n={n})")


def exp_lemma_suite(seed: int = 0, trials: int = 100) -> ExperimentReport:
    """Randomized and catalogued campaigns for the three quantitative lemmas:
    the isometry-entropy bound, the tower quasi-morphism defect bound, and the
    snap-to-subgroup budget."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    rows = []

    entropy_checks = 0
    entropy_ok = True
    for t in range(trials):
        space = _random_rational_linf_space(rng, 6)
        diam = space.diameter
        for eps in (diam / 4, diam / 2, diam):
            chk = verify_isometry_entropy_bound(space, eps)
            entropy_checks += 1
            entropy_ok = entropy_ok and chk.holds
    for name, space in catalogue(max_points=12):
        diam = space.diameter
        eps_grid = (diam / 4, diam / 2) if diam > 0 else (Fraction(1),)
        for eps in eps_grid:
            chk = verify_isometry_entropy_bound(space, eps)
            entropy_checks += 1
            entropy_ok = entropy_ok and chk.holds
    rows.append({"campaign": "isometry_entropy", "instances": entropy_checks,
                 "violations": 0 if entropy_ok else 1, "ok": entropy_ok})

    tower_ok = True
    defects = []
    for n in (12, 24, 48, 96):
        res = _cycle_tower_row(n)
        defects.append(res.qm.defect_value)
        tower_ok = tower_ok and res.qm.defect_value <= res.certified_bound
        rows.append({"campaign": "tower_quasi_morphism", "n": n,
                     "defect": cell(res.qm.defect_value),
                     "epsilon": cell(res.epsilon),
                     "bound_11eps": cell(res.certified_bound),
                     "ok": bool(res.qm.defect_value <= res.certified_bound)})
    monotone = all(float(b) <= float(a) + 1e-9 for a, b in zip(defects, defects[1:]))

    snap_ok = True
    for t in range(trials):
        m = rng.randrange(4, 32)
        j = rng.randrange(2, 16)
        c = rng.randrange(1, m)
        denom = m * rng.randrange(2, 8)
        base = [Fraction((c * k) % m, m) for k in range(m)]
        noisy = [(b + Fraction(rng.randrange(-2, 3), denom * 4)) % 1 for b in base]
        qm = QuasiMap(cyclic_group(m), Circle(1), tuple(noisy))
        d0 = defect(qm)
        eps = max(d0, Fraction(1, 2 * j))
        snapped = snap_to_subgroup(qm, [Fraction(k, j) for k in range(j)], eps)
        ok = snapped.defect_value <= 4 * eps
        dens_before = density(qm)
        dens_after = density(snapped)
        ok = ok and dens_after.value <= dens_before.value + eps
        snap_ok = snap_ok and ok
    rows.append({"campaign": "snap_budget", "instances": trials,
                 "violations": 0 if snap_ok else 1, "ok": snap_ok})

    verdicts = {
        "entropy_bound_all_hold": entropy_ok,
        "tower_defect_within_11eps": tower_ok,
        "tower_defect_monotone": monotone,
        "snap_within_4eps_and_density": snap_ok,
    }
    return ExperimentReport("lemma_suite", {"trials": trials},
                            ["campaign", "n", "instances", "violations", "defect",
                             "epsilon", "bound_11eps", "ok"],
                            rows, verdicts, seed=seed)


def _cycle_tower_row(n: int):
    """One tower step: C_n rotations against the rotations of the 2n-point
    circle net, linked by index doubling."""
    cn = cycle_space(n, Fraction(1, n)).space
    c2n = cycle_space(2 * n, Fraction(1, 2 * n)).space
    act_n = GroupAction.from_permutations(cn, [tuple((i + 1) % n for i in range(n))])
    act = GroupAction.from_permutations(c2n, [tuple((i + 1) % (2 * n) for i in range(2 * n))])
    phi = [2 * i for i in range(n)]
    phi_tilde = [j // 2 for j in range(2 * n)]
    psi = [(2 * k) % (2 * n) for k in range(n)]
    psi_tilde = [j // 2 for j in range(2 * n)]
    return limit_quasi_morphism(act_n, act, phi, phi_tilde, psi, psi_tilde)


EXPERIMENTS = {
    "converge-cycles": exp_converge_cycles,
    "torus": exp_torus,
    "solenoid": exp_solenoid,
    "sphere-gap": exp_sphere_gap,
    "lemma-suite": exp_lemma_suite,
}
