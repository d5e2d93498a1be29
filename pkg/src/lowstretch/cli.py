"""Command line front end.

Exit status: 0 on success, 1 when a verification fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bartal import (decompose_simple, dump_decomposition, make_diameter_sequence, moment_switch,
                     validate_decomposition)
from .generators import generate
from .graph import GraphError, format_edge_list, normalize, read_edge_list
from .metrics import format_csv, laplacian_sandwich_check, tree_stretch, verify_embedding
from .treebuild import SteinerTree
from .trees import TreeError
from .twostage import full_pipeline, participation_stats

SUITES = ("stretch-scaling", "participation", "edge-tossing", "embedding")


class UsageError(Exception):
    pass


def _header(args) -> str:
    keys = sorted(k for k in vars(args) if k not in ("func", "out"))
    cfg = " ".join(f"{k}={getattr(args, k)}" for k in keys)
    return f"lowstretch {__version__}\n{cfg}"


def _load_graph(args):
    if bool(getattr(args, "graph", None)) == bool(getattr(args, "gen", None)):
        raise UsageError("give exactly one of --graph or --gen")
    if args.graph:
        path = Path(args.graph)
        if not path.exists():
            raise UsageError(f"no such file: {path}")
        return args.graph, read_edge_list(path)
    return args.gen, generate(args.gen, args.seed)


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args):
    _, g = _load_graph(args)
    _emit(format_edge_list(g, _header(args)), args.out)
    return 0


def cmd_decompose(args):
    _, g = _load_graph(args)
    rng = np.random.default_rng(args.seed)
    if args.route == "simple":
        gn, delta = normalize(g)
        log_n = math.log(gn.n)
        if args.p is None:
            dec = decompose_simple(gn, make_diameter_sequence(gn.n, delta), rng, log_n)
        else:
            q = (1 + args.p) / 2
            dec = moment_switch(gn, args.p, q, lambda h: decompose_simple(
                h, make_diameter_sequence(h.n, float(h.length.max())), rng, log_n), log_n)
    else:
        res = full_pipeline(g, args.p, args.mode, args.k, rng=rng, build_tree=False)
        gn = res.graph
        dec = res.decomposition.expand()
        if args.trace:
            st = participation_stats(res.decomposition)
            sys.stderr.write(f"participation mean={st.mean!r} max={st.max} total={st.total} "
                             f"skipped_levels={st.skipped_levels}\n")
            if res.ignored is not None:
                sys.stderr.write(f"ignored edges={len(res.ignored)} of {gn.m}\n")
    rep = validate_decomposition(gn, dec)
    head = _header(args) + f"\nvalidation: {rep}"
    _emit("\n".join(f"# {h}" for h in head.splitlines()) + "\n" + dump_decomposition(gn, dec), args.out)
    sys.stderr.write(f"{rep}\n")
    return 0 if rep.ok else 1


def cmd_tree(args):
    _, g = _load_graph(args)
    res = full_pipeline(g, args.p, args.mode, args.k, seed=args.seed, max_attempts=args.attempts)
    rep = verify_embedding(g, res.tree)
    header = _header(args) + f"\nattempts_used={res.attempts} budget_met={res.budget_met}\n{rep}"
    if args.out:
        res.tree.write(args.out, header)
    st = tree_stretch(g, res.tree, res.p, res.ignored)
    print(f"vertices={res.tree.n_total} edges={res.tree.m} p={res.p!r} mean_lp_stretch={st.mean!r} "
          f"max_stretch={st.max!r}")
    if args.trace:
        ps = participation_stats(res.decomposition)
        print(f"participation mean={ps.mean!r} max={ps.max} levels={len(ps.level_sizes)}")
    print(rep)
    return 0 if rep.ok else 1


def _graph_and_tree(args):
    _, g = _load_graph(args)
    try:
        tree = SteinerTree.read(args.tree)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read tree: {exc}") from None
    return g, tree


def cmd_stretch(args):
    g, tree = _graph_and_tree(args)
    st = tree_stretch(g, tree, args.p)
    qs = st.quantiles()
    print(f"p={args.p!r} mean_lp={st.mean!r} mean={st.mean_stretch!r} max={st.max!r} "
          + " ".join(f"q{int(q * 100)}={v!r}" for q, v in qs.items()))
    return 0


def cmd_verify(args):
    g, tree = _graph_and_tree(args)
    rep = verify_embedding(g, tree)
    print(rep)
    return 0 if rep.ok else 1


def cmd_laplacian(args):
    g, tree = _graph_and_tree(args)
    rep = laplacian_sandwich_check(g, tree, args.trials, args.tol, np.random.default_rng(args.seed))
    print(f"ratio min={rep.min_ratio!r} max={rep.max_ratio!r} trials={rep.trials} "
          f"{'pass' if rep.ok else 'FAIL'}")
    return 0 if rep.ok else 1


def _bench_rows(suite, sizes, seeds, p, ks):
    rows = []
    if suite in ("stretch-scaling", "participation", "embedding"):
        for side in sizes:
            spec = f"grid:{side}x{side}"
            g = generate(spec)
            for seed in seeds:
                res = full_pipeline(g, p, seed=seed)
                st = tree_stretch(g, res.tree, p)
                ps = participation_stats(res.decomposition)
                base = (spec, g.n, g.m, p, seed)
                if suite == "stretch-scaling":
                    rows.append(base + ("mean_lp_stretch", st.mean))
                    rows.append(base + ("tree_vertices", res.tree.n_total))
                elif suite == "participation":
                    rows.append(base + ("mean_participation", ps.mean))
                    rows.append(base + ("levels", len(ps.level_sizes)))
                else:
                    rep = verify_embedding(g, res.tree)
                    rows.append(base + ("congestion", rep.congestion))
                    rows.append(base + ("ok", int(rep.ok)))
    elif suite == "edge-tossing":
        for side in sizes:
            spec = f"grid:{side}x{side}"
            g = generate(spec)
            for k in ks:
                for seed in seeds:
                    res = full_pipeline(g, None, "simplified", k, seed=seed)
                    st = tree_stretch(g, res.tree, 1.0, res.ignored)
                    base = (f"{spec}:k={k}", g.n, g.m, res.p, seed)
                    rows.append(base + ("ignored_fraction", len(res.ignored) / g.m))
                    rows.append(base + ("mean_stretch_kept", st.mean_stretch))
    return rows


def cmd_bench(args):
    sizes = [int(s) for s in args.sizes.split(",")]
    ks = [float(k) for k in args.ks.split(",")]
    seeds = list(range(args.seed, args.seed + args.seeds))
    rows = _bench_rows(args.suite, sizes, seeds, args.p, ks)
    _emit(format_csv(rows, _header(args)), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lowstretch", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def graph_opts(sp, need_tree=False):
        sp.add_argument("--graph", help="edge list file")
        sp.add_argument("--gen", help="generator spec, e.g. grid:16x16 or er:100:300:8")
        sp.add_argument("--seed", type=int, default=0)
        if need_tree:
            sp.add_argument("--tree", required=True, help="tree file written by 'tree'")

    def algo_opts(sp):
        sp.add_argument("--p", type=float, default=None, help="stretch exponent in (0, 1)")
        sp.add_argument("--mode", choices=("full", "simplified"), default="full")
        sp.add_argument("--k", type=float, default=None, help="simplified mode parameter")
        sp.add_argument("--trace", action="store_true", help="report participation counters")

    sp = sub.add_parser("gen", help="write a generated graph as an edge list")
    graph_opts(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("decompose", help="build, validate and dump a decomposition")
    graph_opts(sp)
    algo_opts(sp)
    sp.add_argument("--route", choices=("simple", "two-stage"), default="two-stage")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("tree", help="run the full pipeline and write the Steiner tree")
    graph_opts(sp)
    algo_opts(sp)
    sp.add_argument("--attempts", type=int, default=10, help="simplified mode: retries while too many edges are ignored")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_tree)

    sp = sub.add_parser("stretch", help="stretch statistics of a tree")
    graph_opts(sp, need_tree=True)
    sp.add_argument("--p", type=float, default=1.0)
    sp.set_defaults(func=cmd_stretch)

    sp = sub.add_parser("verify", help="check a tree's embedding certificate")
    graph_opts(sp, need_tree=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("laplacian-check", help="dense operator sandwich check")
    graph_opts(sp, need_tree=True)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.set_defaults(func=cmd_laplacian)

    sp = sub.add_parser("bench", help="parameter sweeps written as CSV")
    sp.add_argument("--suite", choices=SUITES, required=True)
    sp.add_argument("--sizes", default="8,16", help="grid side lengths")
    sp.add_argument("--seeds", type=int, default=3, help="number of seeds")
    sp.add_argument("--seed", type=int, default=0, help="first seed")
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--ks", default="4,16,64", help="edge-tossing k values")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command in ("tree", "decompose"):
        if args.mode == "full" and args.p is None and not (args.command == "decompose" and args.route == "simple"):
            args.p = 0.5
        if args.mode == "simplified" and args.k is None:
            ap.error("simplified mode needs --k")
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"lowstretch: {exc}\n")
        return 2
    except (GraphError, TreeError, ValueError) as exc:
        sys.stderr.write(f"lowstretch: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
