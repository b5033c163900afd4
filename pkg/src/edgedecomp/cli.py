"""Command-line interface: ``edgedecomp <command> ...``.

Exit status is 0 on success, 1 on invalid input and 2 when a run stopped
early with a partial result.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
import warnings
from pathlib import Path

from . import io
from .errors import PARTIAL_CODES, DecompError, ParameterRangeWarning
from .extract import DEFAULT_FLOOR, MODES, asymptotic_bounds, decompose
from .functional import r_of_epsilon
from .generators import MODELS, forest, low_c5, planted_regular, random_bipartite, two_blocks
from .graph import BipartiteGraph, TripartiteGraph, as_fraction, density
from .packing import pack_trees
from .regularity import ORACLE_LIMIT, verify_regularity
from .removal import REMOVAL_FLOOR, conditional_triangle_removal

log = logging.getLogger("edgedecomp")


def _rational(text: str):
    try:
        return as_fraction(text)
    except DecompError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load(path, kind):
    g = io.read_graph(path)
    if not isinstance(g, kind):
        raise DecompError("parse-error", f"{path}: expected a {kind.__name__} file")
    return g


def _emit(args, report: io.Report) -> None:
    if args.timing:
        report.timing = {"seconds": round(time.perf_counter() - args.start, 6)}
    text = io.dumps_report(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _figures(args, render, *items) -> list[str]:
    if not args.figures:
        return []
    from . import plots

    outdir = Path(args.figures)
    outdir.mkdir(parents=True, exist_ok=True)
    return [str(p) for p in getattr(plots, render)(*items, outdir)]


def _r_values(eps) -> dict:
    out = {}
    if 0 < eps < 1:
        out["r_functional"] = float(r_of_epsilon(eps))
    return out


def cmd_verify(args) -> int:
    g = _load(args.input, BipartiteGraph)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ParameterRangeWarning)
        verdict = verify_regularity(g, args.epsilon, oracle_limit=args.oracle_limit)
    figs = _figures(args, "plot_verdict", g, verdict)
    _emit(args, io.Report("verify", {"epsilon": args.epsilon, "input": str(args.input)}, verdict,
                          extra={"figures": figs}))
    return 0


def cmd_decompose(args) -> int:
    g = _load(args.input, BipartiteGraph)
    dec = decompose(g, args.epsilon, args.delta, args.mode, floor=args.floor, oracle_limit=args.oracle_limit)
    if not dec.check_partition(g):  # pragma: no cover - guarded inside decompose
        raise DecompError("corrupt-count", "bundles and residual do not partition the edge set")
    params = {"epsilon": args.epsilon, "delta": args.delta, "mode": args.mode, "floor": args.floor,
              "input": str(args.input), "d": density(g) if g.n_a else None, **_r_values(args.epsilon)}
    bounds = asymptotic_bounds(g.n_a, density(g), args.epsilon, args.delta) if g.n_a and g.edge_count else {}
    extra = {"bounds": bounds,
             "partition_exact": True,
             "figures": _figures(args, "plot_decomposition", g, dec)}
    _emit(args, io.Report("decompose", params, dec, extra=extra))
    return 2 if dec.is_partial() else 0


def cmd_pack_trees(args) -> int:
    g = _load(args.input, BipartiteGraph)
    trees = io.parse_forest(Path(args.trees).read_text())
    packing = pack_trees(g, trees, args.epsilon, args.delta, args.mode, floor=args.floor,
                         oracle_limit=args.oracle_limit)
    params = {"epsilon": args.epsilon, "delta": args.delta, "mode": args.mode, "input": str(args.input),
              "trees": str(args.trees), "d": density(g) if g.n_a else None}
    extra = {"figures": _figures(args, "plot_packing", g, packing)}
    _emit(args, io.Report("pack-trees", params, packing, extra=extra))
    return 0 if packing.complete else 2


def cmd_removal(args) -> int:
    tg = _load(args.input, TripartiteGraph)
    out, report = conditional_triangle_removal(tg, args.epsilon, args.mode, floor=args.floor,
                                               oracle_limit=args.oracle_limit)
    params = {"epsilon": args.epsilon, "mode": args.mode, "input": str(args.input)}
    extra = {"figures": _figures(args, "plot_removal", report)}
    if args.output_graph:
        Path(args.output_graph).write_text(io.format_tripartite(out))
        extra["output_graph"] = str(args.output_graph)
    _emit(args, io.Report("removal", params, report, extra=extra))
    return 0


def cmd_gen(args) -> int:
    n = args.n
    if args.model == "random":
        text = io.format_bipartite(random_bipartite(n, args.p, args.seed))
    elif args.model == "planted-regular":
        g = planted_regular(n, args.epsilon, args.delta, args.seed, args.p_planted)
        text = io.format_bipartite(g)
    elif args.model == "two-blocks":
        text = io.format_bipartite(two_blocks(n))
    elif args.model == "low-c5":
        text = io.format_tripartite(low_c5(n, args.seed, args.p, args.matchings))
    else:
        text = io.format_forest(forest(args.count, args.max_size, args.max_level, args.seed))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgedecomp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, mode=True, delta=False, floor=DEFAULT_FLOOR):
        p.add_argument("--input", required=True, help="graph file")
        p.add_argument("--epsilon", required=True, type=_rational, help="rational, e.g. 1/4 or 0.25")
        if delta:
            p.add_argument("--delta", required=True, type=_rational)
        if mode:
            p.add_argument("--mode", choices=MODES, default="algorithmic")
            p.add_argument("--floor", type=int, default=floor, help="smallest part size extracted")
        p.add_argument("--oracle-limit", type=int, default=ORACLE_LIMIT)
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--figures", help="directory for PNG figures")
        p.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")

    p = sub.add_parser("verify", help="certify regularity or find witnesses of irregularity")
    common(p, mode=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose", help="split the edges into dense regular pairs plus a sparse residual")
    common(p, delta=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("pack-trees", help="pack rooted trees edge-disjointly")
    common(p, delta=True)
    p.add_argument("--trees", required=True, help="forest file")
    p.set_defaults(func=cmd_pack_trees)

    p = sub.add_parser("removal", help="make a tripartite graph triangle-free")
    common(p, floor=REMOVAL_FLOOR)
    p.add_argument("--output-graph", help="also write the pruned tripartite graph")
    p.set_defaults(func=cmd_removal)

    p = sub.add_parser("gen", help="generate a test instance")
    p.add_argument("--model", required=True, choices=MODELS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--n", type=int, default=12, help="part size (block size for two-blocks)")
    p.add_argument("--p", type=_rational, default=_rational("1/2"), help="edge probability")
    p.add_argument("--p-planted", type=_rational, default=None,
                   help="planted-regular density (default min(1, delta + 2 eps))")
    p.add_argument("--epsilon", type=_rational, default=_rational("1/2"))
    p.add_argument("--delta", type=_rational, default=_rational("1/4"))
    p.add_argument("--matchings", type=int, default=1, help="low-c5: matchings per sparse block")
    p.add_argument("--count", type=int, default=3, help="forest: number of trees")
    p.add_argument("--max-size", type=int, default=6, help="forest: largest tree")
    p.add_argument("--max-level", type=int, default=3, help="forest: largest level")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    args.start = time.perf_counter()
    try:
        return args.func(args)
    except DecompError as exc:
        print(f"edgedecomp: {exc}", file=sys.stderr)
        return 2 if exc.code in PARTIAL_CODES else 1
    except OSError as exc:
        print(f"edgedecomp: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
