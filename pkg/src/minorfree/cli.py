"""Command-line entry point: ``minorfree <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, harness
from .errors import MinorFreeError, UsageError
from .generators import FAMILIES, GenSpec, generate
from .graphio import format_graph, write_graph


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "-o", help="write output here instead of stdout")
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--scaled-mode-ack", action="store_true",
                   help="allow parameters that deviate from the formula defaults")
    p.add_argument("--timing", action="store_true", help="add wall time to per-run records")
    return p


def _oracle_args(p: argparse.ArgumentParser, default: str | None = None) -> None:
    g = p.add_argument_group("oracle")
    g.add_argument("--oracle", choices=("walk", "ball", "exhaustive"), default=default)
    g.add_argument("--radius", type=int, help="ball radius")
    g.add_argument("--k", type=int, help="exhaustive part size")
    g.add_argument("--cap", type=int, help="ball size cap")
    g.add_argument("--ell", type=int, help="walk length base")
    g.add_argument("--c", type=int, help="walk length exponent")
    g.add_argument("--walks", type=int, help="walks per length")
    g.add_argument("--part-size-cap", type=int, help="walk oracle size cap")


def _spanner_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("spanner")
    g.add_argument("--heavy-threshold", type=float)
    g.add_argument("--oracle-k", type=int)
    g.add_argument("--q", type=int, help="samples per center")
    g.add_argument("--r", type=int, help="excluded-minor edge count")


def _oracle_dict(args, kind: str | None = None) -> dict:
    kind = kind or args.oracle
    if kind is None:
        return {}
    out = {"kind": kind}
    fields = {"radius": args.radius, "k": args.k, "cap": args.cap}
    if kind == "walk":
        fields.update(ell=args.ell, c=args.c, walks=args.walks, part_size_cap=args.part_size_cap)
    out.update({k: v for k, v in fields.items() if v is not None})
    return out


def _spanner_dict(args) -> dict:
    fields = {"heavy_threshold": args.heavy_threshold, "oracle_k": args.oracle_k, "q": args.q, "r": args.r}
    return {k: v for k, v in fields.items() if v is not None}


def _params(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minorfree", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    p = sub.add_parser("generate", parents=[common], help="write a seeded planar instance")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--wmax", type=int, default=1)
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="family parameter")

    p = sub.add_parser("oracle-stats", parents=[common], help="per-query cover sizes and costs")
    p.add_argument("--graph", required=True)
    p.add_argument("--mode", choices=("walk", "ball", "exhaustive"), required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--queries", type=int, help="number of seeded query vertices (default: all)")
    _oracle_args(p)

    p = sub.add_parser("test-ham", parents=[common], help="Hamiltonicity testers")
    p.add_argument("--graph", required=True)
    p.add_argument("--mode", choices=harness.HAM_MODES, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--runs", type=int, default=1)
    _oracle_args(p)

    p = sub.add_parser("build-spanner", parents=[common], help="approximate minimum spanning graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--mode", choices=harness.SPANNER_MODES, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--wmax", type=float, required=True, help="upper bound W on edge weights")
    _oracle_args(p)
    _spanner_args(p)

    p = sub.add_parser("property-test", parents=[common], help="monotone additive property tester")
    p.add_argument("--graph", required=True)
    p.add_argument("--property", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--runs", type=int, default=1)
    _oracle_args(p)

    p = sub.add_parser("run-suite", parents=[common], help="run a YAML experiment suite")
    p.add_argument("config")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("scaling-probe", parents=[common], help="mean queries per edge as n grows")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--ns", type=int, nargs="+", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--algorithm", choices=harness.PROBE_ALGORITHMS, required=True)
    p.add_argument("--wmax", type=int, default=2)
    p.add_argument("--edges", type=int, default=200, help="sampled edges per n")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="family parameter")
    _oracle_args(p)
    _spanner_args(p)
    return parser


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _require_ack(args, command: str, params: dict) -> None:
    if harness.is_scaled(command, params) and not args.scaled_mode_ack:
        raise UsageError("parameters deviate from the formula defaults; pass --scaled-mode-ack")


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cmd = args.command

    if cmd == "generate":
        spec = GenSpec(args.family, args.n, args.seed, args.weighted, args.wmax, _params(args.param))
        g, truth = generate(spec)
        if args.out:
            write_graph(g, args.out)
            Path(args.out + ".truth.json").write_text(truth.to_json() + "\n")
        else:
            sys.stdout.write(format_graph(g))
        return 0

    if cmd == "run-suite":
        reports = harness.run_suite(Path(args.config), args.scaled_mode_ack, args.jobs, args.timing or None)
        _emit(args, "".join(r.render(args.format) for r in reports))
        return 0

    if cmd == "scaling-probe":
        oracle = _oracle_dict(args)
        spanner = _spanner_dict(args)
        _require_ack(args, cmd, {"oracle": oracle, "spanner": spanner})
        rep = harness.query_scaling_probe(args.family, args.ns, args.epsilon, args.algorithm, args.seed,
                                          args.wmax, args.edges, oracle, spanner, _params(args.param),
                                          args.timing)
        _emit(args, rep.render(args.format))
        return 0

    g, info = harness.load_graph(args.graph)
    if cmd == "oracle-stats":
        oracle = _oracle_dict(args, args.mode)
        oracle.pop("kind")
        _require_ack(args, cmd, {"mode": args.mode, "oracle": oracle})
        rep = harness.run_oracle_stats(g, args.mode, args.epsilon, args.seed, oracle, args.queries,
                                       args.timing, info)
    elif cmd == "test-ham":
        oracle = _oracle_dict(args)
        _require_ack(args, cmd, {"oracle": oracle})
        rep = harness.run_test_ham(g, args.mode, args.epsilon, oracle, args.seed, args.runs, args.timing, info)
    elif cmd == "build-spanner":
        oracle = _oracle_dict(args)
        spanner = _spanner_dict(args)
        _require_ack(args, cmd, {"oracle": oracle, "spanner": spanner})
        rep = harness.run_build_spanner(g, args.mode, args.epsilon, args.wmax, args.seed, oracle, spanner,
                                        args.timing, info)
    else:
        oracle = _oracle_dict(args)
        _require_ack(args, cmd, {"oracle": oracle})
        rep = harness.run_property_test(g, args.property, args.epsilon, oracle, args.seed, args.runs,
                                        args.timing, info)
    _emit(args, rep.render(args.format))
    return 0


def main(argv=None) -> int:
    try:
        return run(argv)
    except MinorFreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
