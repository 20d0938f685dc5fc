"""Command-line entry point: ``interlock {topology,centrality,compare,synth,bench}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import pipeline, synth
from .graph import GraphError
from .ingest import IngestError

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_DEGENERATE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()]


def _float_list(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x.strip()]


def _pivots(s: str):
    return s if s == "auto" else int(s)


def _common(p: argparse.ArgumentParser) -> None:
    # defaults are None so that only flags actually given override the config file
    p.add_argument("--config", help="JSON config or a previous run.json")
    p.add_argument("--input")
    p.add_argument("--mode", choices=["affiliation", "edgelist"])
    p.add_argument("--metadata")
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--sample-pairs", type=int, dest="sample_pairs")
    p.add_argument("--pivots", type=_pivots, help="'auto', 0 for exact, or a pivot count")
    p.add_argument("--measures", type=lambda s: [x for x in s.split(",") if x])
    p.add_argument("--k-list", type=_int_list, dest="k_list")
    p.add_argument("--max-boards", type=int, dest="max_boards",
                   help="ignore persons on more boards than this (off by default)")
    p.add_argument("--no-eccentricities", action="store_false", dest="eccentricities", default=None)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="interlock", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in [
        ("topology", "network statistics and per-partition table"),
        ("centrality", "normalized centrality vectors, full and per partition"),
        ("compare", "persistence, dominance, top-k overlap and correlations"),
    ]:
        _common(sub.add_parser(name, help=help_))

    s = sub.add_parser("synth", help="planted-partition graph with metadata")
    s.add_argument("--spec", help="JSON SyntheticSpec")
    s.add_argument("--sizes", type=_int_list)
    s.add_argument("--p-intra", type=_float_list, dest="p_intra")
    s.add_argument("--p-cross", type=float, dest="p_cross")
    s.add_argument("--noise", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", default="synth")
    s.add_argument("-v", "--verbose", action="store_true")

    b = sub.add_parser("bench", help="stage timings on an input or a synthetic graph")
    _common(b)
    b.add_argument("--nodes", type=int, default=400_000, help="synthetic size when no --input")
    b.add_argument("--edges", type=int, default=1_700_000)
    b.add_argument("--partitions", type=int, default=34)
    b.add_argument("--bench-pivots", type=int, default=10_000, dest="bench_pivots",
                   help="pivots for the betweenness stage; 0 skips it")
    return parser


CONFIG_FLAGS = ("input", "mode", "metadata", "out", "format", "seed", "threads", "sample_pairs",
                "pivots", "measures", "k_list", "max_boards", "eccentricities")


def make_config(args: argparse.Namespace) -> pipeline.RunConfig:
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
    config = pipeline.RunConfig.from_dict(base) if base else pipeline.RunConfig()
    for name in CONFIG_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            setattr(config, name, value)
    config.validate()
    return config


def make_spec(args: argparse.Namespace) -> synth.SyntheticSpec:
    spec = synth.SyntheticSpec.from_json(args.spec) if args.spec else None
    if spec is None:
        if not args.sizes:
            raise ValueError("synth needs --spec or --sizes")
        spec = synth.SyntheticSpec(sizes=args.sizes)
    if args.sizes:
        spec.sizes = args.sizes
    if args.p_intra:
        spec.p_intra = args.p_intra[0] if len(args.p_intra) == 1 else args.p_intra
    if args.p_cross is not None:
        spec.p_cross = args.p_cross
    if args.noise is not None:
        spec.noise = args.noise
    if args.seed is not None:
        spec.seed = args.seed
    spec.validate()
    return spec


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            spec = make_spec(args)
            g = pipeline.cmd_synth(spec, args.out)
            print(f"wrote {g.n} nodes / {g.m} edges to {args.out}")
            return EXIT_OK
        config = make_config(args)
        if args.command == "bench":
            spec = None
            if not config.input:
                spec = synth.reference_shape_spec(args.nodes, args.edges, args.partitions, seed=config.seed)
            res = pipeline.cmd_bench(config, spec, args.bench_pivots)
            for name, st in res["stages"].items():
                print(f"{name:24s} {st['seconds']:10.2f}s  {st['peak_rss_mb']:8.1f} MB")
            return EXIT_OK
        cmd = {"topology": pipeline.cmd_topology, "centrality": pipeline.cmd_centrality,
               "compare": pipeline.cmd_compare}[args.command]
        cmd(config)
        print(f"{args.command}: outputs in {config.out}")
        return EXIT_OK
    except pipeline.DegenerateResult as exc:
        print(f"interlock: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (IngestError, GraphError, OSError, json.JSONDecodeError) as exc:
        print(f"interlock: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, TypeError) as exc:
        print(f"interlock: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
