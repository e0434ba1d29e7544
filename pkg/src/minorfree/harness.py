"""Experiment orchestration: repeated seeded runs, suites and machine-readable reports.

Every runner returns an :class:`ExperimentReport`: one record per run plus a
trailing aggregate that embeds the full parameter set, so a report can be
replayed without its config.  Per-run records are byte-identical under replay;
wall time is only recorded when ``timing=True``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import __version__
from .errors import BudgetError, ConfigError, UsageError
from .generators import FAMILIES, GenSpec, generate
from .graph import QueryGraph, format_fixed
from .graphio import format_graph, read_graph
from .hamiltonicity import (
    ham_distance,
    test_ham_one_sided,
    tolerant_test_ham,
)
from .oracles import OracleParams, OracleSpec, is_valid_cover
from .prf import Stream
from .properties import DECIDERS, test_property
from .spanning import (
    BoundedLocalSpanner,
    ClusterSpanner,
    SpanConfig,
    build_global,
    kruskal_msf,
    summarize,
)

COMMANDS = ("oracle-stats", "test-ham", "build-spanner", "property-test", "scaling-probe")
HAM_MODES = ("one-sided", "tolerant", "exact")
SPANNER_MODES = ("global", "local-bounded", "local-unbounded")
PROBE_ALGORITHMS = ("local-bounded", "local-unbounded", "kruskal")


@dataclass
class ExperimentReport:
    subcommand: str
    params: dict[str, Any]
    seeds: list[int]
    records: list[dict[str, Any]] = field(default_factory=list)
    aggregate: dict[str, Any] = field(default_factory=dict)
    version: str = __version__

    def trailer(self) -> dict[str, Any]:
        return {
            "type": "aggregate",
            "version": self.version,
            "subcommand": self.subcommand,
            "params": self.params,
            "seeds": self.seeds,
            **self.aggregate,
        }

    def rows(self) -> list[dict[str, Any]]:
        return [{"type": "run", **r} for r in self.records] + [self.trailer()]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.rows())

    def to_csv(self) -> str:
        rows = [_flatten(r) for r in self.rows()]
        keys = sorted({k for r in rows for k in r})
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()

    def render(self, fmt: str = "jsonl") -> str:
        if fmt == "jsonl":
            return self.to_jsonl()
        if fmt == "csv":
            return self.to_csv()
        raise UsageError(f"unknown format {fmt!r}")


def _flatten(record: dict) -> dict:
    out = {}
    for k, v in record.items():
        out[k] = json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v
    return out


# -- graph sources and oracle recipes ---------------------------------------------------


def graph_digest(g: QueryGraph) -> str:
    return hashlib.sha256(format_graph(g).encode()).hexdigest()[:16]


def load_graph(source: str | GenSpec | dict) -> tuple[QueryGraph, dict]:
    """Read a graph file or generate an instance; returns the graph and a replayable descriptor."""
    if isinstance(source, dict):
        source = GenSpec(**source)
    if isinstance(source, GenSpec):
        g, _ = generate(source)
        return g, {"generator": asdict(source), "digest": graph_digest(g)}
    if not Path(source).is_file():
        raise UsageError(f"graph file not found: {source}")
    g = read_graph(source)
    return g, {"path": str(source), "digest": graph_digest(g)}


def oracle_from_dict(d: dict | None, seed: int = 0) -> OracleSpec | None:
    if not d:
        return None
    d = dict(d)
    kind = d.pop("kind", "exhaustive")
    walk = None
    if kind == "walk":
        walk = OracleParams(
            epsilon=1.0,
            ell=int(d.pop("ell", 2)),
            c=int(d.pop("c", 1)),
            walks_per_length=int(d.pop("walks", 4)),
            part_size_cap=int(d.pop("part_size_cap", 256)),
        )
    spec = OracleSpec(kind, k=d.pop("k", None), radius=d.pop("radius", None), cap=d.pop("cap", None),
                      walk=walk, seed=seed)
    if d:
        raise UsageError(f"unknown oracle parameters: {', '.join(sorted(d))}")
    return spec


def _queries(g: QueryGraph) -> dict[str, int]:
    return g.counter.snapshot()


def _seeds(seed: int, runs: int) -> list[int]:
    if runs < 1:
        raise UsageError("runs must be >= 1")
    return list(range(seed, seed + runs))


def _query_stats(records: list[dict]) -> dict:
    totals = [r["queries"]["total"] for r in records if "queries" in r]
    if not totals:
        return {}
    return {"mean_queries": float(np.mean(totals)), "max_queries": int(max(totals))}


def _clock(timing: bool):
    start = time.perf_counter()

    def stop(record: dict) -> dict:
        if timing:
            record["wall_time"] = round(time.perf_counter() - start, 6)
        return record

    return stop


# -- runners -------------------------------------------------------------------------------


def run_oracle_stats(
    g: QueryGraph,
    mode: str,
    epsilon: float,
    seed: int = 0,
    oracle: dict | None = None,
    queries: int | None = None,
    timing: bool = False,
    graph_info: dict | None = None,
) -> ExperimentReport:
    """Query the oracle at ``queries`` seeded vertices (all vertices if unset)."""
    spec = oracle_from_dict({"kind": mode, **(oracle or {})}, seed)
    built = spec.build(g, epsilon)
    if queries is None:
        targets = list(range(g.n))
    else:
        rng = Stream(seed, "oracle-stats")
        targets = [rng.randbelow(g.n) for _ in range(queries)]
    records = []
    for i, v in enumerate(targets):
        stop = _clock(timing)
        before = g.counter.total
        res = built.query(v)
        records.append(stop({
            "run": i,
            "seed": seed,
            "vertex": v,
            "size": len(res.S),
            "queries": {"total": g.counter.total - before},
            "cap_violation": bool(res.cap_violation),
            "connected": is_valid_cover(g, res),
        }))
    agg = {
        "runs": len(records),
        "mean_size": float(np.mean([r["size"] for r in records])) if records else 0.0,
        "max_size": max((r["size"] for r in records), default=0),
        "cap_violations": sum(r["cap_violation"] for r in records),
        **_query_stats(records),
    }
    if mode == "exhaustive":
        agg["cut_edges"] = built.handle.cut_edge_count
        agg["parts"] = len(built.handle.parts)
    params = {"mode": mode, "epsilon": epsilon, "oracle": spec.describe(), "queries": queries,
              "graph": graph_info or {"digest": graph_digest(g)}}
    return ExperimentReport("oracle-stats", params, [seed], records, agg)


def _ham_run(g: QueryGraph, mode: str, epsilon: float, spec: OracleSpec | None, seed: int) -> dict:
    if mode == "one-sided":
        v = test_ham_one_sided(g, epsilon, spec, seed=seed)
        return {"verdict": v.label, "witness": v.witness, "samples": v.samples}
    if mode == "tolerant":
        v = tolerant_test_ham(g, epsilon, spec, seed=seed)
        return {"verdict": v.label, "witness": None, "samples": v.samples,
                "estimate": v.detail["estimate"], "threshold": v.detail["threshold"]}
    if mode == "exact":
        dist = ham_distance(g)
        return {"verdict": "accept" if dist == 0 else "reject", "witness": None, "distance": dist}
    raise UsageError(f"unknown test-ham mode {mode!r}; choose from {', '.join(HAM_MODES)}")


def run_test_ham(
    g: QueryGraph,
    mode: str,
    epsilon: float,
    oracle: dict | None = None,
    seed: int = 0,
    runs: int = 1,
    timing: bool = False,
    graph_info: dict | None = None,
) -> ExperimentReport:
    records = []
    seeds = _seeds(seed, runs)
    for i, s in enumerate(seeds):
        spec = oracle_from_dict(oracle, s)
        g.counter.reset()
        stop = _clock(timing)
        try:
            rec = _ham_run(g, mode, epsilon, spec, s)
        except BudgetError as exc:
            rec = {"verdict": "error", "error": str(exc)}
        rec = {"run": i, "seed": s, **rec, "queries": _queries(g)}
        records.append(stop(rec))
    done = [r for r in records if r["verdict"] != "error"]
    agg = {
        "runs": len(records),
        "errors": len(records) - len(done),
        "accept_frequency": sum(r["verdict"] == "accept" for r in done) / len(done) if done else None,
        **_query_stats(records),
    }
    if mode == "tolerant" and done:
        agg["mean_estimate"] = float(np.mean([r["estimate"] for r in done]))
    params = {"mode": mode, "epsilon": epsilon, "oracle": oracle or {}, "runs": runs,
              "graph": graph_info or {"digest": graph_digest(g)}}
    return ExperimentReport("test-ham", params, seeds, records, agg)


def _span_config(epsilon: float, wmax: float, seed: int, spanner: dict | None) -> SpanConfig:
    extra = dict(spanner or {})
    allowed = {"r", "heavy_threshold", "q", "oracle_k", "x", "q_constant"}
    bad = set(extra) - allowed
    if bad:
        raise UsageError(f"unknown spanner parameters: {', '.join(sorted(bad))}")
    return SpanConfig(epsilon, W=wmax, seed=seed, **extra)


def spanner_edges(
    g: QueryGraph,
    mode: str,
    epsilon: float,
    wmax: float,
    seed: int = 0,
    oracle: dict | None = None,
    spanner: dict | None = None,
):
    """Run one spanner mode over every edge; returns (yes-set, decisions or None, detail)."""
    if mode == "global":
        res = build_global(g, _span_config(epsilon, wmax, seed, spanner))
        detail = {"steps": {k: len(v) for k, v in res.steps.items()}, "heavy": len(res.heavy),
                  "partition_cut": res.partition_cut, "inter_cluster": len(res.inter_cluster)}
        return res.edges, None, detail
    if mode == "local-unbounded":
        sp = ClusterSpanner(g, _span_config(epsilon, wmax, seed, spanner))
    elif mode == "local-bounded":
        sp = BoundedLocalSpanner(g, epsilon, wmax, oracle_from_dict(oracle, seed) or OracleSpec("ball", seed=seed))
    else:
        raise UsageError(f"unknown spanner mode {mode!r}; choose from {', '.join(SPANNER_MODES)}")
    decisions = [sp.decide(*e) for e in g.edges()]
    return {d.edge for d in decisions if d.verdict}, decisions, {}


def run_build_spanner(
    g: QueryGraph,
    mode: str,
    epsilon: float,
    wmax: float,
    seed: int = 0,
    oracle: dict | None = None,
    spanner: dict | None = None,
    timing: bool = False,
    graph_info: dict | None = None,
) -> ExperimentReport:
    g.counter.reset()
    stop = _clock(timing)
    yes, decisions, detail = spanner_edges(g, mode, epsilon, wmax, seed, oracle, spanner)
    queries = _queries(g)
    if decisions is None:
        from .spanning import RULES, spans_components

        _, opt = kruskal_msf(g, counted=False)
        summary = {"weight": g.total_weight(yes), "opt": opt, "connected": spans_components(g, yes),
                   "tallies": {r: 0 for r in RULES}}
    else:
        s = summarize(g, decisions)
        summary = {"weight": s.weight, "opt": s.opt, "connected": s.connected, "tallies": s.tallies}
    ranked = sorted(yes, key=g.key)
    rec = {
        "run": 0,
        "seed": seed,
        "edges": [[e.u, e.v] for e in ranked],
        "edge_count": len(ranked),
        "weight": format_fixed(summary["weight"]),
        "opt": format_fixed(summary["opt"]),
        "weight_ratio": summary["weight"] / summary["opt"] if summary["opt"] else 1.0,
        "edge_ratio": len(ranked) / max(g.n - 1, 1),
        "connected": summary["connected"],
        "tallies": summary["tallies"],
        "queries": queries,
        "per_edge_queries": queries["total"] / g.m if g.m else 0.0,
        **detail,
    }
    rec = stop(rec)
    agg = {"runs": 1, "weight_ratio": rec["weight_ratio"], "edge_ratio": rec["edge_ratio"],
           "connected": rec["connected"], **_query_stats([rec])}
    params = {"mode": mode, "epsilon": epsilon, "wmax": wmax, "oracle": oracle or {},
              "spanner": spanner or {}, "graph": graph_info or {"digest": graph_digest(g)}}
    return ExperimentReport("build-spanner", params, [seed], [rec], agg)


def run_property_test(
    g: QueryGraph,
    prop: str,
    epsilon: float,
    oracle: dict | None = None,
    seed: int = 0,
    runs: int = 1,
    timing: bool = False,
    graph_info: dict | None = None,
) -> ExperimentReport:
    if prop not in DECIDERS:
        raise UsageError(f"unknown property {prop!r}; choose from {', '.join(DECIDERS)}")
    decider = DECIDERS[prop]()
    records = []
    seeds = _seeds(seed, runs)
    for i, s in enumerate(seeds):
        g.counter.reset()
        stop = _clock(timing)
        v = test_property(g, decider, epsilon, oracle_from_dict(oracle, s), seed=s)
        records.append(stop({"run": i, "seed": s, "verdict": v.label, "witness": v.witness,
                             "samples": v.samples, "queries": _queries(g)}))
    agg = {"runs": runs, "accept_frequency": sum(r["verdict"] == "accept" for r in records) / runs,
           **_query_stats(records)}
    params = {"property": prop, "epsilon": epsilon, "oracle": oracle or {}, "runs": runs,
              "graph": graph_info or {"digest": graph_digest(g)}}
    return ExperimentReport("property-test", params, seeds, records, agg)


def _probe_one(g: QueryGraph, algorithm: str, epsilon: float, wmax: float, seed: int,
               edges: int, oracle: dict | None, spanner: dict | None) -> list[int]:
    if algorithm == "kruskal":
        g.counter.reset()
        kruskal_msf(g)
        return [g.counter.total]
    if algorithm == "local-bounded":
        sp = BoundedLocalSpanner(g, epsilon, wmax, oracle_from_dict(oracle, seed) or OracleSpec("ball", seed=seed))
    elif algorithm == "local-unbounded":
        sp = ClusterSpanner(g, _span_config(epsilon, wmax, seed, spanner))
    else:
        raise UsageError(f"unknown algorithm {algorithm!r}; choose from {', '.join(PROBE_ALGORITHMS)}")
    all_edges = list(g.edges())
    rng = Stream(seed, "scaling-probe", g.n)
    picks = [all_edges[rng.randbelow(len(all_edges))] for _ in range(edges)]
    costs = []
    for e in picks:
        before = g.counter.total
        sp.decide(*e)
        costs.append(g.counter.total - before)
    return costs


def query_scaling_probe(
    family: str,
    ns,
    epsilon: float,
    algorithm: str,
    seed: int = 0,
    wmax: int = 2,
    edges: int = 200,
    oracle: dict | None = None,
    spanner: dict | None = None,
    params: dict | None = None,
    timing: bool = False,
) -> ExperimentReport:
    """Mean queries per answered edge as ``n`` grows, at fixed epsilon and oracle.

    Local algorithms are charged per sampled edge; the exact control is
    charged its whole run, since answering any one edge needs all of it.
    """
    if family not in FAMILIES:
        raise UsageError(f"unknown family {family!r}")
    records = []
    for i, n in enumerate(ns):
        g, _ = generate(GenSpec(family, int(n), seed, weighted=True, wmax=wmax, params=dict(params or {})))
        stop = _clock(timing)
        costs = _probe_one(g, algorithm, epsilon, wmax, seed, edges, oracle, spanner)
        records.append(stop({"run": i, "seed": seed, "n": g.n, "m": g.m,
                             "mean_queries": float(np.mean(costs)), "max_queries": int(max(costs)),
                             "edges_sampled": len(costs)}))
    means = [r["mean_queries"] for r in records]
    agg = {"runs": len(records),
           "spread": (max(means) / min(means) - 1.0) if means and min(means) > 0 else None,
           "growth": (means[-1] / means[0]) if means and means[0] > 0 else None}
    p = {"family": family, "ns": [int(n) for n in ns], "epsilon": epsilon, "algorithm": algorithm,
         "wmax": wmax, "edges": edges, "oracle": oracle or {}, "spanner": spanner or {},
         "params": params or {}}
    return ExperimentReport("scaling-probe", p, [seed], records, agg)


# -- scaled-mode detection -------------------------------------------------------------------


def is_scaled(command: str, params: dict) -> bool:
    """True when a command's parameters deviate from the formula defaults."""
    oracle = params.get("oracle") or {}
    if command == "oracle-stats":
        oracle = {"kind": params.get("mode"), **oracle}
    if oracle.get("kind") == "walk":
        return True
    if any(oracle.get(k) is not None for k in ("k", "radius")):
        return True
    return any(v is not None for v in (params.get("spanner") or {}).values())


# -- suites ------------------------------------------------------------------------------------


class _LineLoader(yaml.SafeLoader):
    pass


class _Node(dict):
    """Mapping that remembers the source line of itself and of each key."""

    line: int = 0
    key_lines: dict


def _construct_mapping(loader, node):
    loader.flatten_mapping(node)
    out = _Node()
    out.line = node.start_mark.line + 1
    out.key_lines = {}
    for k_node, v_node in node.value:
        key = loader.construct_object(k_node, deep=True)
        out[key] = loader.construct_object(v_node, deep=True)
        out.key_lines[key] = k_node.start_mark.line + 1
    return out


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)

_EXPERIMENT_KEYS = {"name", "command", "graph", "params", "sweep", "seeds", "runs"}
_COMMAND_PARAMS = {
    "oracle-stats": {"mode", "epsilon", "oracle", "queries"},
    "test-ham": {"mode", "epsilon", "oracle"},
    "build-spanner": {"mode", "epsilon", "wmax", "oracle", "spanner"},
    "property-test": {"property", "epsilon", "oracle"},
    "scaling-probe": {"family", "ns", "epsilon", "algorithm", "wmax", "edges", "oracle", "spanner", "params"},
}
_REQUIRED = {
    "oracle-stats": {"mode", "epsilon"},
    "test-ham": {"mode", "epsilon"},
    "build-spanner": {"mode", "epsilon"},
    "property-test": {"property", "epsilon"},
    "scaling-probe": {"family", "ns", "epsilon", "algorithm"},
}
_GRAPH_KEYS = {"family", "n", "seed", "weighted", "wmax", "params"}


@dataclass
class SuiteCell:
    index: int
    name: str
    command: str
    graph: dict | None
    params: dict
    seeds: list[int]


def _line(node, key=None) -> int | None:
    if isinstance(node, _Node):
        if key is not None and key in node.key_lines:
            return node.key_lines[key]
        return node.line
    return None


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_plain(v) for v in x]
    return x


def parse_suite(text: str) -> tuple[list[SuiteCell], dict]:
    """Validate a suite config and expand every experiment's sweep into cells."""
    try:
        doc = yaml.load(text, Loader=_LineLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"invalid YAML: {getattr(exc, 'problem', exc)}",
                          mark.line + 1 if mark else None) from None
    if doc is None:
        return [], {"scaled_mode_ack": False, "timing": False}
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a mapping", 1)
    unknown = set(doc) - {"experiments", "scaled_mode_ack", "timing"}
    for k in sorted(unknown):
        raise ConfigError(f"unknown top-level key {k!r}", _line(doc, k))
    exps = doc.get("experiments") or []
    if not isinstance(exps, list):
        raise ConfigError("'experiments' must be a list", _line(doc, "experiments"))
    cells: list[SuiteCell] = []
    for i, exp in enumerate(exps):
        if not isinstance(exp, dict):
            raise ConfigError(f"experiment {i} must be a mapping", _line(doc, "experiments"))
        for k in sorted(set(exp) - _EXPERIMENT_KEYS):
            raise ConfigError(f"unknown experiment key {k!r}", _line(exp, k))
        command = exp.get("command")
        if command not in _COMMAND_PARAMS:
            raise ConfigError(f"'command' must be one of {', '.join(COMMANDS)}", _line(exp, "command"))
        name = str(exp.get("name", f"experiment-{i}"))
        params = exp.get("params") or {}
        sweep = exp.get("sweep") or {}
        if not isinstance(params, dict) or not isinstance(sweep, dict):
            raise ConfigError("'params' and 'sweep' must be mappings", _line(exp))
        graph = exp.get("graph")
        if command == "scaling-probe":
            if graph is not None:
                raise ConfigError("scaling-probe takes its family from params, not 'graph'", _line(exp, "graph"))
        else:
            if not isinstance(graph, dict):
                raise ConfigError("'graph' must be a generator mapping", _line(exp, "graph") or _line(exp))
            for k in sorted(set(graph) - _GRAPH_KEYS):
                raise ConfigError(f"unknown graph key {k!r}", _line(graph, k))
            if graph.get("family") not in FAMILIES:
                raise ConfigError(f"graph family must be one of {', '.join(FAMILIES)}", _line(graph, "family"))
        allowed = _COMMAND_PARAMS[command]
        for k in sorted(set(params) - allowed):
            raise ConfigError(f"unknown parameter {k!r} for {command}", _line(params, k))
        for k, values in sweep.items():
            if k not in allowed and k not in _GRAPH_KEYS:
                raise ConfigError(f"cannot sweep {k!r}", _line(sweep, k))
            if not isinstance(values, list):
                raise ConfigError(f"sweep values for {k!r} must be a list", _line(sweep, k))
        seeds = exp.get("seeds", [0])
        if not isinstance(seeds, list) or not all(isinstance(s, int) and not isinstance(s, bool) for s in seeds):
            raise ConfigError("'seeds' must be a list of integers", _line(exp, "seeds"))
        unique = list(dict.fromkeys(seeds))
        if len(unique) != len(seeds):
            warnings.warn(f"experiment {name!r}: duplicate seeds removed", UserWarning, stacklevel=2)
        keys = sorted(sweep)
        combos = [{}]
        for k in keys:
            combos = [{**c, k: v} for c in combos for v in sweep[k]]
        for combo in combos:
            p = _plain({**params, **{k: v for k, v in combo.items() if k in allowed}})
            gspec = None
            if graph is not None:
                gspec = _plain({**graph, **{k: v for k, v in combo.items() if k in _GRAPH_KEYS and k not in allowed}})
            missing = _REQUIRED[command] - set(p)
            if missing:
                raise ConfigError(f"{command} needs {', '.join(sorted(missing))}", _line(exp))
            cells.append(SuiteCell(len(cells), name, command, gspec, p, unique))
    return cells, {"scaled_mode_ack": bool(doc.get("scaled_mode_ack", False)),
                   "timing": bool(doc.get("timing", False))}


def execute_cell(cell: SuiteCell, timing: bool = False) -> list[ExperimentReport]:
    """Run one suite cell once per seed; each seed gives its own report."""
    out = []
    p = cell.params
    for seed in cell.seeds:
        if cell.command == "scaling-probe":
            rep = query_scaling_probe(p["family"], p["ns"], p["epsilon"], p["algorithm"], seed=seed,
                                      wmax=p.get("wmax", 2), edges=p.get("edges", 200),
                                      oracle=p.get("oracle"), spanner=p.get("spanner"),
                                      params=p.get("params"), timing=timing)
        else:
            g, info = load_graph({**cell.graph, "seed": cell.graph.get("seed", seed)})
            if cell.command == "oracle-stats":
                rep = run_oracle_stats(g, p["mode"], p["epsilon"], seed, p.get("oracle"), p.get("queries"),
                                       timing, info)
            elif cell.command == "test-ham":
                rep = run_test_ham(g, p["mode"], p["epsilon"], p.get("oracle"), seed, 1, timing, info)
            elif cell.command == "build-spanner":
                rep = run_build_spanner(g, p["mode"], p["epsilon"], p.get("wmax", cell.graph.get("wmax", 1)),
                                        seed, p.get("oracle"), p.get("spanner"), timing, info)
            else:
                rep = run_property_test(g, p["property"], p["epsilon"], p.get("oracle"), seed, 1, timing, info)
        rep.params = {"experiment": cell.name, "cell": cell.index, **rep.params}
        out.append(rep)
    return out


def run_suite(source: str | Path, scaled_mode_ack: bool = False, jobs: int = 1,
              timing: bool | None = None) -> list[ExperimentReport]:
    """Execute every cell of a suite; ``source`` is a config path or the YAML text itself.

    Output order is canonical (by cell, then seed) whatever ``jobs`` is.
    """
    text = source.read_text() if isinstance(source, Path) else source
    cells, opts = parse_suite(text)
    ack = scaled_mode_ack or opts["scaled_mode_ack"]
    for c in cells:
        if not ack and is_scaled(c.command, c.params):
            raise UsageError(f"experiment {c.name!r} uses scaled parameters; pass --scaled-mode-ack")
    timing = opts["timing"] if timing is None else timing
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(execute_cell, cells, [timing] * len(cells)))
    else:
        results = [execute_cell(c, timing) for c in cells]
    return [rep for reps in results for rep in reps]

