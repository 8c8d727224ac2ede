"""Command line front end.

All structured output is JSON on stdout; DOT goes to files.  Exit codes:
0 success, 1 inconsistency or failed check, 2 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import ai_cohomology, bass_serre, cayley_abels, ends_cuts, qlinalg, theorem_lab
from .bass_serre import PiOne
from .errors import BudgetExceeded
from .serre_graphs import SerreGraph


def _load(path):
    with open(path) as fp:
        return json.load(fp)


def _emit(data):
    json.dump(data, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")


def _spec_backend_pairs(path, pair_index):
    spec = _load(path)
    backend = theorem_lab.backend_from_spec(spec["backend"])
    pairs = [
        theorem_lab.pair_from_spec(backend, p, name=f"pair{i}")
        for i, p in enumerate(spec["pairs"])
    ]
    if not 0 <= pair_index < len(pairs):
        raise ValueError(f"no pair {pair_index} in spec (found {len(pairs)})")
    return backend, pairs[pair_index]


def cmd_ends(args):
    _, pair = _spec_backend_pairs(args.spec, args.pair)
    est = ends_cuts.classify_ends(
        pair, r_max=args.rmax, radius=args.R, cap=args.cap
    )
    _emit({"pair": pair.name, **est.to_json(), "coarse": est.coarse_class()})
    return 0


def cmd_cut(args):
    _, pair = _spec_backend_pairs(args.spec, args.pair)
    t = cayley_abels.build(pair, args.R, cap=args.cap)
    cut = ends_cuts.find_cut(t)
    _emit({"pair": pair.name, "cut": cut.to_json() if cut else None})
    return 0


def cmd_witness(args):
    spec = _load(args.spec)
    backend = theorem_lab.backend_from_spec(spec["backend"])
    if not isinstance(backend, PiOne):
        raise ValueError("witness extraction needs a graph-of-groups backend")
    w = ai_cohomology.witness_from_splitting(
        backend, args.edge, probe_radius=args.probe, cap=args.cap
    )
    t = cayley_abels.build(w.pair, args.probe, cap=args.cap)
    inv = ai_cohomology.check_almost_invariance(w, t)
    cut = ai_cohomology.cut_from_witness(w, t)
    out = {
        "witness": {"kind": w.kind, "pair": w.pair.name, "details": {
            k: v for k, v in w.details.items() if k != "properness"}},
        "almost_invariance": inv.to_json(),
        "cut": cut.to_json(),
    }
    try:
        out["dh1"] = ai_cohomology.dh1_nonvanishing_certificate(w, t).to_json()
    except ValueError as exc:
        out["dh1"] = {"passed": False, "error": str(exc)}
    _emit(out)
    return 0 if inv.passed and out["dh1"].get("passed") else 1


def cmd_tree(args):
    spec = _load(args.spec)
    backend = theorem_lab.backend_from_spec(spec["backend"])
    if not isinstance(backend, PiOne):
        raise ValueError("tree truncation needs a graph-of-groups backend")
    tt = bass_serre.tree_truncation(backend, args.radius, cap=args.cap)
    if args.dot:
        with open(args.dot, "w") as fp:
            fp.write(tt.to_dot())
    _emit({
        "group": backend.name,
        "radius": args.radius,
        "vertices": len(tt.graph.vertices),
        "geometric_edges": len(tt.graph.geometric_edges()),
        "is_tree": tt.graph.is_tree(),
        "dot": args.dot,
    })
    return 0


def cmd_homology(args):
    graph = SerreGraph.from_json(_load(args.graph))
    d = qlinalg.delta_matrix(graph)
    rank, ker, coker = qlinalg.rank_kernel_cokernel(d)
    _emit({
        "vertices": len(graph.vertices),
        "geometric_edges": len(graph.geometric_edges()),
        "components": len(graph.components()),
        "delta_rank": rank,
        "cycle_space_dim": ker,
        "component_space_dim": coker,
        "is_tree": graph.is_tree(),
    })
    return 0


def cmd_verify(args):
    if args.default or args.catalog is None:
        entries = theorem_lab.default_catalog()
    else:
        entries = theorem_lab.catalog_from_json(_load(args.catalog))
    scales = theorem_lab.Scales(cap=args.cap)
    if args.rmax is not None:
        scales.r_max = args.rmax
    if args.R is not None:
        scales.radius = args.R
    report = theorem_lab.run_catalog(entries, scales)
    _emit(report.to_json())
    return report.exit_code()


def build_parser():
    p = argparse.ArgumentParser(prog="endlab")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("ends", help="classify the ends of a group spec")
    sp.add_argument("spec")
    sp.add_argument("--pair", type=int, default=0)
    sp.add_argument("--rmax", type=int, default=3)
    sp.add_argument("--R", type=int, default=12)
    sp.add_argument("--cap", type=int, default=200_000)
    sp.set_defaults(func=cmd_ends)

    sp = sub.add_parser("cut", help="extract a cut from the coset graph")
    sp.add_argument("spec")
    sp.add_argument("--pair", type=int, default=0)
    sp.add_argument("--R", type=int, default=12)
    sp.add_argument("--cap", type=int, default=200_000)
    sp.set_defaults(func=cmd_cut)

    sp = sub.add_parser("witness", help="build and check a splitting witness")
    sp.add_argument("spec")
    sp.add_argument("--edge", type=int, required=True)
    sp.add_argument("--probe", type=int, default=8)
    sp.add_argument("--cap", type=int, default=200_000)
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("tree", help="truncate the universal covering tree")
    sp.add_argument("spec")
    sp.add_argument("--radius", type=int, required=True)
    sp.add_argument("--dot")
    sp.add_argument("--cap", type=int, default=200_000)
    sp.set_defaults(func=cmd_tree)

    sp = sub.add_parser("homology", help="kernel/cokernel of the boundary map of a graph")
    sp.add_argument("graph")
    sp.set_defaults(func=cmd_homology)

    sp = sub.add_parser("verify", help="run the catalog equivalence suite")
    sp.add_argument("catalog", nargs="?")
    sp.add_argument("--default", action="store_true")
    sp.add_argument("--rmax", type=int)
    sp.add_argument("--R", type=int)
    sp.add_argument("--cap", type=int, default=200_000)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        _emit({"error": "budget_exceeded", "message": str(exc)})
        return 2
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        _emit({"error": "invalid_input", "message": str(exc)})
        return 1


if __name__ == "__main__":
    sys.exit(main())
