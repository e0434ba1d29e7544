"""Seeded planar instances with known ground truth."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Any

import networkx as nx

from .errors import UsageError
from .graph import SCALE, QueryGraph, components
from .pathcover import min_path_cover
from .prf import Stream

FAMILIES = (
    "grid",
    "random_tree",
    "cycle_chords_planar",
    "apollonian",
    "star_forest",
    "disjoint_paths",
)

MSF_LIMIT = 10**5


@dataclass
class GenSpec:
    family: str
    n: int
    seed: int = 0
    weighted: bool = False
    wmax: int = 1
    params: dict[str, Any] = field(default_factory=dict)


@dataclass
class GroundTruth:
    family: str
    n: int
    m: int
    seed: int
    is_hamiltonian_path: bool | None = None
    hamiltonian_order: list[int] | None = None
    ham_distance: int | None = None
    msf_weight: int | None = None
    params: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _grid(spec: GenSpec):
    rows = spec.params.get("rows") or math.isqrt(spec.n)
    cols = spec.params.get("cols") or spec.n // rows
    if rows < 1 or cols < 1:
        raise UsageError("grid needs n >= 1")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    order = []
    for r in range(rows):
        cs = range(cols) if r % 2 == 0 else range(cols - 1, -1, -1)
        order.extend(r * cols + c for c in cs)
    truth = {"is_hamiltonian_path": True, "hamiltonian_order": order, "ham_distance": 0}
    return rows * cols, edges, truth, {"rows": rows, "cols": cols}


def _random_tree(spec: GenSpec):
    n = spec.n
    rng = Stream(spec.seed, "gen/random_tree")
    edges = [(rng.randbelow(i), i) for i in range(1, n)]
    return n, edges, {}, {}


def _cycle_chords(spec: GenSpec):
    n = spec.n
    if n < 3:
        raise UsageError("cycle_chords_planar needs n >= 3")
    p = float(spec.params.get("chord_prob", 0.5))
    rng = Stream(spec.seed, "gen/cycle_chords")
    # positions 0..n-1 around the cycle; chords come from a random triangulation
    # of the convex polygon, so any subset of them is non-crossing
    pos_edges = {(i, (i + 1) % n) for i in range(n)}
    stack = [list(range(n))]
    while stack:
        poly = stack.pop()
        if len(poly) < 4:
            continue
        k = 1 + rng.randbelow(len(poly) - 2)
        for a, b in ((poly[0], poly[k]), (poly[k], poly[-1])):
            if abs(poly.index(a) - poly.index(b)) > 1 and rng.random() < p:
                pos_edges.add((a, b))
        stack.append(poly[: k + 1])
        stack.append(poly[k:])
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.randbelow(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    edges = {tuple(sorted((perm[a], perm[b]))) for a, b in pos_edges}
    order = [perm[i] for i in range(n)]
    truth = {"is_hamiltonian_path": True, "hamiltonian_order": order, "ham_distance": 0}
    return n, sorted(edges), truth, {"chord_prob": p}


def _apollonian(spec: GenSpec):
    n = spec.n
    if n < 3:
        raise UsageError("apollonian needs n >= 3")
    rng = Stream(spec.seed, "gen/apollonian")
    edges = [(0, 1), (0, 2), (1, 2)]
    faces = [(0, 1, 2)]
    for v in range(3, n):
        i = rng.randbelow(len(faces))
        a, b, c = faces[i]
        faces[i] = (a, b, v)
        faces.append((a, v, c))
        faces.append((v, b, c))
        edges.extend([(a, v), (b, v), (c, v)])
    return n, edges, {}, {}


def _star_forest(spec: GenSpec):
    leaves = int(spec.params.get("leaves", 4))
    linked = bool(spec.params.get("linked", False))
    stars = spec.n // (leaves + 1)
    if stars < 1:
        raise UsageError(f"star_forest with {leaves} leaves needs n >= {leaves + 1}")
    edges = []
    centers = []
    for s in range(stars):
        c = s * (leaves + 1)
        centers.append(c)
        edges.extend((c, c + j) for j in range(1, leaves + 1))
    if linked:
        edges.extend(zip(centers, centers[1:]))
    return stars * (leaves + 1), edges, {}, {"leaves": leaves, "linked": linked, "stars": stars}


def _disjoint_paths(spec: GenSpec):
    length = int(spec.params.get("path_len", 4))
    count = spec.n // length
    if count < 1:
        raise UsageError(f"disjoint_paths needs n >= path_len = {length}")
    edges = []
    for p in range(count):
        base = p * length
        edges.extend((base + i, base + i + 1) for i in range(length - 1))
    truth = {"ham_distance": count - 1, "is_hamiltonian_path": count == 1}
    return count * length, edges, truth, {"path_len": length, "paths": count}


_BUILDERS = {
    "grid": _grid,
    "random_tree": _random_tree,
    "cycle_chords_planar": _cycle_chords,
    "apollonian": _apollonian,
    "star_forest": _star_forest,
    "disjoint_paths": _disjoint_paths,
}


def _is_forest(n: int, edges) -> bool:
    return len(components(QueryGraph(n, edges))) == n - len(edges)


def generate(spec: GenSpec) -> tuple[QueryGraph, GroundTruth]:
    """Build the instance described by ``spec``; deterministic in ``spec.seed``."""
    if spec.family not in _BUILDERS:
        raise UsageError(f"unknown family {spec.family!r}; choose from {', '.join(FAMILIES)}")
    if spec.n < 1:
        raise UsageError("n must be >= 1")
    n, edges, truth, params = _BUILDERS[spec.family](spec)
    edges = sorted(tuple(sorted(e)) for e in edges)
    if spec.weighted:
        if spec.wmax < 1:
            raise UsageError("wmax must be >= 1")
        rng = Stream(spec.seed, "gen/weights")
        span = (spec.wmax - 1) * SCALE + 1
        edges = [(u, v, SCALE + rng.randbelow(span)) for u, v in edges]
    plain = QueryGraph(n, [e[:2] for e in edges])
    g = QueryGraph(n, edges, degree_bound=max(1, plain.max_degree), weighted=spec.weighted)

    if truth.get("ham_distance") is None and _is_forest(n, [e[:2] for e in edges]):
        truth["ham_distance"] = min_path_cover(g).size - 1
    if truth.get("ham_distance") is not None and truth.get("is_hamiltonian_path") is None:
        truth["is_hamiltonian_path"] = truth["ham_distance"] == 0

    msf = None
    if spec.weighted and n <= MSF_LIMIT:
        from .spanning import kruskal_msf

        msf = kruskal_msf(g, counted=False)[1]

    gt = GroundTruth(
        family=spec.family,
        n=n,
        m=g.m,
        seed=spec.seed,
        is_hamiltonian_path=truth.get("is_hamiltonian_path"),
        hamiltonian_order=truth.get("hamiltonian_order"),
        ham_distance=truth.get("ham_distance"),
        msf_weight=msf,
        params=params,
    )
    return g, gt


def degree_histogram(g: QueryGraph) -> dict[int, int]:
    return dict(sorted(Counter(len(g.adj(v)) for v in range(g.n)).items()))


def is_planar(g: QueryGraph) -> bool:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return nx.check_planarity(h)[0]
