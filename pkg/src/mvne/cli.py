"""Command-line entry point: ingestion -> embedding -> evaluation.

Subcommands: embed, eval, stats, synth. Every run is reproducible from its
flags: all randomness flows from --seed, and identical flags and inputs give
byte-identical output files. Exit codes: 0 success, 2 input/validation
error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .evaluate import EvalProtocol, run_protocol
from .factorize import (FactorizeConfig, embedding, read_embedding,
                        write_embedding, write_run_metadata)
from .graph import (LabelStore, MultiViewGraph, ParseError, build_multiview,
                    read_manifest, view_stats, write_edge_list)
from .multiview import (MvneConfig, ViewWeights, combine_views, default_betas,
                        mvne_embed)
from .testkit import SbmSpec, dump_dataset, generate_multiview_sbm


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=42, help="base PRNG seed")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker-count bound; results do not depend on it")
    parser.add_argument("--config", metavar="FILE",
                        help="key=value defaults file; flags override it")


def _parse_floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mvne",
        description="Sparse-graph node embeddings via shared-community factorization",
    )
    parser.add_argument("--version", action="version", version=f"mvne {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed a single view or a view manifest")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--edges", help="edge-list file (single view)")
    src.add_argument("--manifest", help="view manifest file (multi-view)")
    p.add_argument("-d", "--dim", type=int, default=128, help="embedding dimension")
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--rel-tol", type=float, default=1e-6)
    p.add_argument("--update-form", choices=("ratio", "literal-log"), default="ratio")
    p.add_argument("--beta", help="comma-separated explicit view weights")
    p.add_argument("--no-normalize-views", action="store_true",
                   help="combine raw view weights instead of unit-total views")
    p.add_argument("--out", required=True, help="embedding output path")
    p.add_argument("--meta", help="run metadata JSON output path")
    p.add_argument("--export-weighted", action="store_true",
                   help="also write the mass-weighted matrix H*Lambda next to --out")
    p.add_argument("--export-combined", metavar="PATH",
                   help="write the combined view as an edge list for inspection")
    _add_common(p)

    p = sub.add_parser("eval", help="score an embedding on node-label prediction")
    p.add_argument("--embedding", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--fractions", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--reg", type=float, default=0.01)
    p.add_argument("--json", help="report JSON output path")
    p.add_argument("--tsv", help="plot-ready TSV output path")
    _add_common(p)

    p = sub.add_parser("stats", help="per-view node/edge statistics")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--edges")
    src.add_argument("--manifest")
    p.add_argument("--json", help="stats JSON output path")
    _add_common(p)

    p = sub.add_parser("synth", help="generate a synthetic multi-view dataset")
    p.add_argument("--nodes", type=int, default=200)
    p.add_argument("--communities", type=int, default=4)
    p.add_argument("--p-in", type=float, default=0.3)
    p.add_argument("--p-out", type=float, default=0.01)
    p.add_argument("--views", type=int, default=3)
    p.add_argument("--keep", type=float, default=1.0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--out-dir", required=True)
    _add_common(p)

    return parser


def _apply_config_file(parser, argv):
    """Inject key=value file entries as parser defaults (flags still win)."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise ParseError("--config needs a file path")
    overrides = {}
    with open(argv[idx + 1], "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError("expected key=value", line_no)
            key, value = line.split("=", 1)
            overrides[key.strip().replace("-", "_")] = value.strip()
    for action in parser._subparsers._group_actions[0].choices.values():
        known = {a.dest for a in action._actions}
        action.set_defaults(**{k: _coerce(action, k, v)
                               for k, v in overrides.items() if k in known})
    return argv


def _coerce(subparser, dest, value):
    for action in subparser._actions:
        if action.dest == dest:
            if action.type is not None:
                return action.type(value)
            if isinstance(action, (argparse._StoreTrueAction,)):
                return value.lower() in ("1", "true", "yes", "on")
            return value
    return value


def _load_graph(args) -> MultiViewGraph:
    if getattr(args, "manifest", None):
        return build_multiview(read_manifest(args.manifest))
    return build_multiview([("view0", args.edges)])


def cmd_embed(args) -> int:
    t0 = time.perf_counter()
    graph = _load_graph(args)
    betas = ViewWeights(_parse_floats(args.beta)) if args.beta else None
    if betas is not None and betas.k != graph.k:
        raise ParseError(f"got {betas.k} betas for {graph.k} views")
    config = MvneConfig(
        factorize=FactorizeConfig(
            d=args.dim, max_iters=args.max_iters, rel_tol=args.rel_tol,
            seed=args.seed, update_form=args.update_form,
        ),
        betas=betas,
        normalize_views=not args.no_normalize_views,
    )
    fac = mvne_embed(graph, config)
    used_betas = betas if betas is not None else default_betas(graph)
    if args.export_combined:
        combined = combine_views(graph, used_betas, config.normalize_views)
        write_edge_list(combined, graph.registry, args.export_combined)
    names = graph.registry.names
    write_embedding(args.out, embedding(fac), names)
    if args.export_weighted:
        write_embedding(args.out + ".weighted", fac.H * fac.lam[None, :], names)
    if args.meta:
        meta = fac.run.to_dict()
        meta.update({
            "views": graph.view_names,
            "betas": [float(b) for b in used_betas.beta],
            "normalize_views": config.normalize_views,
            "d": args.dim,
            "seed": args.seed,
            "update_form": args.update_form,
            "wall_time_s": time.perf_counter() - t0,
        })
        write_run_metadata(args.meta, meta)
    print(f"embedded {graph.n} nodes from {graph.k} view(s) into d={args.dim} "
          f"({fac.run.iterations} iterations, objective {fac.run.objective:.6g})")
    return 0


def cmd_eval(args) -> int:
    names, X = read_embedding(args.embedding)
    index = {name: i for i, name in enumerate(names)}

    labels = LabelStore()
    missing = []
    with open(args.labels, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) == 1:
                parts = line.split(None, 1)
            if len(parts) != 2:
                raise ParseError("expected `node<TAB>labels`", line_no)
            name, labs = parts
            if name not in index:
                missing.append(name)
                continue
            labels.add(index[name], [x.strip() for x in labs.split(",") if x.strip()])
    if missing:
        shown = ", ".join(missing[:10])
        raise ParseError(f"{len(missing)} labeled node(s) missing from the "
                         f"embedding: {shown}")

    protocol = EvalProtocol(fractions=tuple(_parse_floats(args.fractions)),
                            repeats=args.repeats, seed=args.seed, reg=args.reg)
    report = run_protocol(X, labels, protocol)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    if args.tsv:
        with open(args.tsv, "w", encoding="utf-8") as fh:
            fh.write(report.to_tsv())
    print("fraction  micro-F1 (sd)      macro-F1 (sd)")
    for f in protocol.fractions:
        print(f"{f:8.2f}  {report.mean_micro(f):.4f} ({report.sd_micro(f):.4f})"
              f"   {report.mean_macro(f):.4f} ({report.sd_macro(f):.4f})")
    return 0


def cmd_stats(args) -> int:
    graph = _load_graph(args)
    rows = view_stats(graph)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)
            fh.write("\n")
    header = f"{'view':<16}{'nodes':>8}{'edges':>10}{'weight':>14}{'deg min':>9}{'deg max':>9}{'deg mean':>10}"
    print(header)
    for r in rows:
        print(f"{r['view']:<16}{r['nodes']:>8}{r['edges']:>10}{r['total_weight']:>14.6g}"
              f"{r['degree']['min']:>9}{r['degree']['max']:>9}{r['degree']['mean']:>10.3f}")
    print(f"registry: {graph.n} nodes across {graph.k} view(s)")
    return 0


def cmd_synth(args) -> int:
    spec = SbmSpec(n=args.nodes, communities=args.communities,
                   p_in=args.p_in, p_out=args.p_out, views=args.views,
                   keep=args.keep, noise=args.noise, seed=args.seed)
    graph, labels = generate_multiview_sbm(spec)
    manifest = dump_dataset(graph, labels, args.out_dir)
    print(f"wrote {graph.k} view(s) of {graph.n} nodes to {args.out_dir} "
          f"(manifest: {manifest})")
    return 0


COMMANDS = {"embed": cmd_embed, "eval": cmd_eval, "stats": cmd_stats, "synth": cmd_synth}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        if args.threads < 1:
            raise ParseError("--threads must be >= 1")
        return COMMANDS[args.command](args)
    except (ParseError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"mvne: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"mvne: invalid input: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"mvne: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
