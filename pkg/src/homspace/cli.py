"""Command-line front end.

Exit codes: 0 success, 1 verdict/validation failure, 2 usage errors.
``--threads`` is accepted for interface stability; all computations are
deterministic and currently single-threaded, and results never depend on
scheduling.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .experiments import (ExperimentReport, exp_converge_cycles, exp_lemma_suite,
                          exp_solenoid, exp_sphere_gap, exp_torus, fmt_value)
from .generators import (ARCHIMEDEAN_NAMES, archimedean_vertices, cayley_space, cycle_space,
                         solenoid_approximant, torus_grid)
from .gh import gh_exact
from .groups import cyclic_group, direct_product, symmetric_group
from .isometry import is_distance_transitive, is_homogeneous, isometry_group
from .models import Circle, SolenoidTruncation, Torus
from .quasimorph import QuasiMap, defect, density
from .space import entropy_profile, load_space, save_space, space_to_json, validate


def parse_number(text: str):
    """Exact number parsing: "1/6", "0.1" and "3" all become Fractions."""
    return Fraction(text)


def _parse_list(text: str, conv):
    return [conv(t) for t in text.split(",") if t]


def _emit(args, payload: dict | ExperimentReport) -> None:
    if isinstance(payload, ExperimentReport):
        if args.format == "csv":
            text = payload.to_csv_text()
        else:
            text = payload.to_json_bytes().decode()
    else:
        text = json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _group_from_spec(spec: str):
    kind, _, rest = spec.partition(":")
    if kind == "cyclic":
        return cyclic_group(int(rest))
    if kind == "sym":
        return symmetric_group(int(rest))
    if kind == "prod":
        orders = [int(x) for x in rest.split(",")]
        g = cyclic_group(orders[0])
        for m in orders[1:]:
            g = direct_product(g, cyclic_group(m))
        return g
    raise ValueError(f"unknown group spec {spec!r} (use cyclic:N, sym:K or prod:N1,N2,...)")


def cmd_gen(args) -> int:
    if args.kind == "cycle":
        space = cycle_space(args.n, parse_number(args.scale)).space
    elif args.kind == "cayley":
        group = _group_from_spec(args.group)
        gens = [int(x) for x in args.generators.split(",")]
        space = cayley_space(group, gens, parse_number(args.scale)).space
    elif args.kind == "torus-grid":
        cs = _parse_list(args.circumferences, parse_number)
        space = torus_grid(args.d, args.m, cs)
    elif args.kind == "solenoid":
        space = solenoid_approximant(args.depth, args.n)
    elif args.kind == "archimedean":
        space, _ = archimedean_vertices(args.name)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown kind {args.kind}")
    report = validate(space)
    if not report.ok:
        print(f"generated space failed validation: {report.summary()}", file=sys.stderr)
        return 1
    if args.out:
        save_space(space, args.out)
    else:
        _emit(args, space_to_json(space))
    return 0


def cmd_validate(args) -> int:
    space = load_space(args.space)
    report = validate(space)
    payload = {
        "file": args.space,
        "n": space.n,
        "ok": report.ok,
        "summary": report.summary(),
        "violations": [
            {"kind": v.kind, "indices": list(v.indices), "amount": v.amount}
            for v in report.violations
        ],
    }
    _emit(args, payload)
    return 0 if report.ok else 1


def cmd_entropy(args) -> int:
    space = load_space(args.space)
    eps_list = _parse_list(args.eps, parse_number)
    profile = entropy_profile(space, eps_list)
    payload = {
        "file": args.space,
        "profile": [
            {"epsilon": fmt_value(p.epsilon), "packing": p.packing, "exactness": p.exactness}
            for p in profile
        ],
    }
    _emit(args, payload)
    return 0


def cmd_isom(args) -> int:
    space = load_space(args.space)
    group = isometry_group(space)
    payload = {
        "file": args.space,
        "complete": group.complete,
        "order": group.order,
        "homogeneous": is_homogeneous(space, group),
        "distance_transitive": is_distance_transitive(space, group),
        "generators": [list(g) for g in group.generators],
    }
    _emit(args, payload)
    return 0


def cmd_gh(args) -> int:
    X = load_space(args.space_x)
    Y = load_space(args.space_y)
    bounds = gh_exact(X, Y, budget=args.budget)
    payload = {
        "lower": fmt_value(bounds.lower),
        "upper": fmt_value(bounds.upper),
        "exact": bounds.exact,
        "certificate_lower": repr(bounds.certificate_lower),
        "certificate_upper": {
            "pairs": [list(p) for p in bounds.certificate_upper.pairs]
        } if bounds.certificate_upper else None,
        "notes": {k: fmt_value(v) for k, v in bounds.notes.items()},
    }
    _emit(args, payload)
    return 0


def _target_from_json(obj: dict):
    kind = obj["kind"]
    if kind == "circle":
        return Circle(parse_number(str(obj.get("circumference", "1"))))
    if kind == "torus":
        return Torus([parse_number(str(c)) for c in obj["circumferences"]])
    if kind == "solenoid":
        if "levels" in obj:
            return SolenoidTruncation([int(x) for x in obj["levels"]],
                                      [parse_number(str(w)) for w in obj["weights"]])
        return SolenoidTruncation.factorial(int(obj["depth"]))
    raise ValueError(f"unknown target kind {kind!r}")


def cmd_quasi(args) -> int:
    with open(args.map, encoding="utf-8") as fh:
        obj = json.load(fh)
    src_spec = obj["source"]
    if src_spec["kind"] == "cyclic":
        source = cyclic_group(int(src_spec["n"]))
    elif src_spec["kind"] == "product_cyclic":
        orders = [int(x) for x in src_spec["orders"]]
        source = cyclic_group(orders[0])
        for m in orders[1:]:
            source = direct_product(source, cyclic_group(m))
    else:
        raise ValueError(f"unknown source kind {src_spec['kind']!r}")
    target = _target_from_json(obj["target"])
    raw = obj["table"]
    if isinstance(raw[0], list):
        table = tuple(tuple(parse_number(str(x)) for x in row) for row in raw)
    else:
        table = tuple(parse_number(str(x)) for x in raw)
    qm = QuasiMap(source, target, table)
    d = defect(qm)
    resolution = parse_number(args.resolution) if args.resolution else None
    dens = density(qm, resolution)
    payload = {
        "source_order": source.n,
        "target": repr(target),
        "defect": fmt_value(d),
        "density": fmt_value(dens.value),
        "density_slack": fmt_value(dens.slack),
        "density_exact": dens.exact,
    }
    _emit(args, payload)
    return 0


def cmd_exp(args) -> int:
    if args.experiment == "converge-cycles":
        report = exp_converge_cycles(_parse_list(args.n_list, int),
                                     _parse_list(args.eps_list, float),
                                     parse_number(args.mesh))
    elif args.experiment == "torus":
        report = exp_torus(args.d, _parse_list(args.m_list, int),
                           parse_number(args.mesh) if args.mesh else None)
    elif args.experiment == "solenoid":
        report = exp_solenoid(_parse_list(args.depths, int), args.multiplier)
    elif args.experiment == "sphere-gap":
        report = exp_sphere_gap(mesh=float(args.mesh))
    elif args.experiment == "lemma-suite":
        report = exp_lemma_suite(seed=args.seed, trials=args.trials)
    else:  # pragma: no cover
        raise ValueError(f"unknown experiment {args.experiment}")
    report.seed = args.seed
    _emit(args, report)
    return 0 if report.all_verdicts_pass else 1


def _add_global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # global flags live on the root parser (real defaults) and on every leaf
    # subparser (SUPPRESS defaults), so they are accepted in either position
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--out", default=d(None), help="output file (default stdout)")
    parser.add_argument("--format", choices=["json", "csv"], default=d("json"),
                        help="report format (json is the format of record)")
    parser.add_argument("--seed", type=int, default=d(0),
                        help="seed for randomized campaigns")
    parser.add_argument("--threads", type=int, default=d(1),
                        help="reserved; execution is deterministic and single-threaded")
    parser.add_argument("--budget", type=int, default=d(10_000_000),
                        help="branch-and-bound node budget")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, suppress=True)

    parser = argparse.ArgumentParser(
        prog="homspace",
        description="Finite homogeneous metric spaces: generators, isometry groups, "
                    "epsilon-entropy, Gromov-Hausdorff bounds and experiments.")
    parser.add_argument("--version", action="version", version=f"homspace {__version__}")
    _add_global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a space and write its JSON")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    g_cycle = gen_sub.add_parser("cycle", parents=[common])
    g_cycle.add_argument("--n", type=int, required=True)
    g_cycle.add_argument("--scale", default="1")
    g_cayley = gen_sub.add_parser("cayley", parents=[common])
    g_cayley.add_argument("--group", required=True, help="cyclic:N | sym:K | prod:N1,N2,...")
    g_cayley.add_argument("--generators", required=True, help="comma-separated element indices")
    g_cayley.add_argument("--scale", default="1")
    g_torus = gen_sub.add_parser("torus-grid", parents=[common])
    g_torus.add_argument("--d", type=int, required=True)
    g_torus.add_argument("--m", type=int, required=True)
    g_torus.add_argument("--circumferences", required=True)
    g_sol = gen_sub.add_parser("solenoid", parents=[common])
    g_sol.add_argument("--depth", type=int, required=True)
    g_sol.add_argument("--n", type=int, required=True)
    g_arch = gen_sub.add_parser("archimedean", parents=[common])
    g_arch.add_argument("--name", choices=ARCHIMEDEAN_NAMES, required=True)
    gen.set_defaults(func=cmd_gen)

    val = sub.add_parser("validate", parents=[common],
                         help="check the metric axioms of a space file")
    val.add_argument("space")
    val.set_defaults(func=cmd_validate)

    ent = sub.add_parser("entropy", parents=[common],
                         help="packing numbers over a grid of scales")
    ent.add_argument("space")
    ent.add_argument("--eps", required=True, help="comma-separated scales")
    ent.set_defaults(func=cmd_entropy)

    iso = sub.add_parser("isom", parents=[common],
                         help="isometry group and transitivity predicates")
    iso.add_argument("space")
    iso.set_defaults(func=cmd_isom)

    gh_p = sub.add_parser("gh", parents=[common],
                          help="Gromov-Hausdorff bounds between two space files")
    gh_p.add_argument("space_x")
    gh_p.add_argument("space_y")
    gh_p.set_defaults(func=cmd_gh)

    quasi = sub.add_parser("quasi", parents=[common],
                           help="defect/density of a map given as a JSON table")
    quasi.add_argument("map")
    quasi.add_argument("--resolution", help="net resolution for model targets")
    quasi.set_defaults(func=cmd_quasi)

    exp = sub.add_parser("exp", help="run a named experiment campaign")
    exp_sub = exp.add_subparsers(dest="experiment", required=True)
    e_cyc = exp_sub.add_parser("converge-cycles", parents=[common])
    e_cyc.add_argument("--n-list", default="12,24,48,96")
    e_cyc.add_argument("--eps-list", default="0.1,0.2")
    e_cyc.add_argument("--mesh", default="1/384")
    e_tor = exp_sub.add_parser("torus", parents=[common])
    e_tor.add_argument("--d", type=int, default=2)
    e_tor.add_argument("--m-list", default="4,6,8")
    e_tor.add_argument("--mesh", default=None)
    e_sol = exp_sub.add_parser("solenoid", parents=[common])
    e_sol.add_argument("--depths", default="1,2,3,4,5,6")
    e_sol.add_argument("--multiplier", type=int, default=1)
    e_sph = exp_sub.add_parser("sphere-gap", parents=[common])
    e_sph.add_argument("--mesh", default="0.4")
    e_lem = exp_sub.add_parser("lemma-suite", parents=[common])
    e_lem.add_argument("--trials", type=int, default=100)
    exp.set_defaults(func=cmd_exp)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
