"""Approximate minimum spanning graphs.

``kruskal_msf`` is the exact reference.  :class:`ClusterSpanner` holds the
structure shared by the global construction (:func:`build_global`) and the
unbounded-degree local algorithm (:meth:`ClusterSpanner.decide`): the
heavy/light split, the partition of the light subgraph, sub-parts grown by
controlled Borůvka rounds, their centers, and the sampled lightest edge
between two clusters.  Everything is a pure function of (graph, config), so
per-edge answers match the global edge set under the same seed.

:class:`BoundedLocalSpanner` is the bounded-degree local algorithm: an edge
is dropped iff it is the heaviest edge on a cycle inside the union of its
endpoints' covers.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .errors import UsageError
from .graph import SCALE, DisjointSet, EdgeRef, QueryGraph, components, induced_subgraph
from .oracles import ExhaustivePartitionOracle, OracleSpec
from .prf import derive_key, hash_fields

RULES = (
    "heavy-heavy",
    "cut-edge",
    "subpart-tree",
    "subpart-reject",
    "center-link",
    "cluster-sample-win",
    "cluster-sample-lose",
    "cluster-null",
    "cycle-rule-no",
    "cycle-rule-yes",
)


def kruskal_msf(g: QueryGraph, counted: bool = True) -> tuple[set[EdgeRef], int]:
    """The unique minimum spanning forest under (weight, rank) order, and its weight."""
    if counted:
        for v in range(g.n):
            g.neighbors(v)
    dsu = DisjointSet(range(g.n))
    forest = set()
    total = 0
    for e in sorted(g.edges(), key=g.key):
        if dsu.union(e.u, e.v):
            forest.add(e)
            total += g.weight(e.u, e.v)
    return forest, total


def spans_components(g: QueryGraph, edges) -> bool:
    """True iff ``edges`` connects every connected component of ``g``."""
    dsu = DisjointSet(range(g.n))
    for u, v in edges:
        dsu.union(u, v)
    for comp in components(g):
        root = dsu.find(comp[0])
        if any(dsu.find(x) != root for x in comp[1:]):
            return False
    return True


@dataclass
class SpanConfig:
    """Parameters of the unbounded-degree construction.

    ``W`` is the weight upper bound (real units), ``r`` the number of edges
    of the excluded minor, ``x`` the oracle part-size bound.  Derived values
    follow the formulas unless overridden, which marks the run as scaled.
    """

    epsilon: float
    W: float = 1.0
    r: int = 10
    seed: int = 0
    x: int | None = None
    heavy_threshold: float | None = None
    q: int | None = None
    oracle_k: int | None = None
    q_constant: float = 8.0

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise UsageError("epsilon must lie in (0, 1]")
        if self.W < 1:
            raise UsageError("W must be >= 1")

    @property
    def scaled(self) -> bool:
        return any(v is not None for v in (self.heavy_threshold, self.q, self.oracle_k, self.x))

    @property
    def delta(self) -> float:
        if self.heavy_threshold is not None:
            return self.heavy_threshold
        return 6 * self.r**2 * self.W / self.epsilon

    @property
    def oracle_param(self) -> float:
        return self.epsilon / (6 * self.W)

    @property
    def part_size(self) -> int:
        if self.oracle_k is not None:
            return self.oracle_k
        return math.ceil(1 / self.oracle_param) ** 2

    @property
    def part_bound(self) -> int:
        return self.x if self.x is not None else self.part_size

    def sample_size(self, n: int) -> int:
        if self.q is not None:
            return self.q
        value = self.W**2 * self.r**3 * self.part_bound * self.delta * math.log(max(n, 2))
        return math.ceil(self.q_constant * value / self.epsilon**2)

    def describe(self, n: int) -> dict:
        return {
            "epsilon": self.epsilon,
            "W": self.W,
            "r": self.r,
            "seed": self.seed,
            "delta": self.delta,
            "oracle_param": self.oracle_param,
            "part_size": self.part_size,
            "q": self.sample_size(n),
            "scaled": self.scaled,
        }


@dataclass
class SubpartForest:
    part: frozenset[int]
    edges: frozenset[EdgeRef]
    subparts: list[frozenset[int]]
    subpart_of: dict[int, int]
    center: list[int | None]
    link: list[EdgeRef | None]
    rounds: int = 0


@dataclass(frozen=True)
class SpannerDecision:
    edge: EdgeRef
    verdict: bool
    rule: str


def subparts(g: QueryGraph, S, heavy, counted: bool = True) -> SubpartForest:
    """Controlled Borůvka on the light part ``S``.

    ``heavy`` is a predicate on vertex ids.  A sub-part stays active while it
    has an edge to the rest of ``S`` and that lightest edge beats its
    lightest edge into the heavy set (or it has none).
    """
    S = frozenset(S)
    if not S:
        raise UsageError("empty part")
    nbrs = {v: (g.neighbors(v) if counted else g.adj(v)) for v in S}
    internal = []
    hmin: dict[int, tuple] = {}
    for v in S:
        if heavy(v):
            raise UsageError(f"part contains heavy vertex {v}")
        for u in nbrs[v]:
            if u in S:
                if v < u:
                    internal.append(g.key((v, u)))
            elif heavy(u):
                k = g.key((v, u))
                if v not in hmin or k < hmin[v]:
                    hmin[v] = k
    dsu = DisjointSet(S)
    if len(components(g, S)) != 1:
        raise UsageError("part does not induce a connected subgraph")
    A: set[EdgeRef] = set()
    rounds = 0
    while True:
        best_cut: dict[int, tuple] = {}
        for k in internal:
            ru, rv = dsu.find(k[1]), dsu.find(k[2])
            if ru == rv:
                continue
            for r in (ru, rv):
                if r not in best_cut or k < best_cut[r]:
                    best_cut[r] = k
        best_h: dict[int, tuple] = {}
        for v, k in hmin.items():
            r = dsu.find(v)
            if r not in best_h or k < best_h[r]:
                best_h[r] = k
        chosen = [
            k for r, k in best_cut.items() if r not in best_h or k < best_h[r]
        ]
        if not chosen:
            break
        rounds += 1
        for k in chosen:
            A.add(EdgeRef(k[1], k[2]))
            dsu.union(k[1], k[2])

    groups: dict[int, list[int]] = {}
    for v in S:
        groups.setdefault(dsu.find(v), []).append(v)
    ordered = sorted((sorted(vs) for vs in groups.values()), key=lambda vs: vs[0])
    subparts_, center, link = [], [], []
    subpart_of = {}
    for sid, vs in enumerate(ordered):
        subparts_.append(frozenset(vs))
        for v in vs:
            subpart_of[v] = sid
        ks = [hmin[v] for v in vs if v in hmin]
        if ks:
            k = min(ks)
            e = EdgeRef(k[1], k[2])
            link.append(e)
            center.append(e.v if heavy(e.v) else e.u)
        else:
            link.append(None)
            center.append(None)
    return SubpartForest(S, frozenset(A), subparts_, subpart_of, center, link, rounds)


class ClusterSpanner:
    """Shared state of the unbounded-degree construction under one seed."""

    def __init__(self, g: QueryGraph, config: SpanConfig):
        self.g = g
        self.config = config
        self.delta = config.delta
        self.q = config.sample_size(g.n)
        self._sample_key = derive_key(config.seed, "cluster-sample")
        self._heavy: dict[int, bool] = {}
        self._part_of: dict[int, frozenset[int]] | None = None
        self.partition_cut = 0
        self._forests: dict[frozenset[int], SubpartForest] = {}
        self._samples: dict[int, tuple[int, ...]] = {}
        self._lightest: dict[tuple[int, int], EdgeRef | None] = {}

    # -- structure ------------------------------------------------------------

    def is_heavy(self, v: int) -> bool:
        if v not in self._heavy:
            self._heavy[v] = self.g.degree(v) > self.delta
        return self._heavy[v]

    def _ensure_partition(self) -> None:
        if self._part_of is not None:
            return
        g = self.g
        light = [v for v in range(g.n) if len(g.adj(v)) <= self.delta]
        sub, labels = induced_subgraph(g, light)
        oracle = ExhaustivePartitionOracle(sub, self.config.part_size, self.config.oracle_param)
        g.counter.charge(degree=sub.counter.degree_queries, neighbor=sub.counter.neighbor_queries)
        self._part_of = {}
        for part in oracle.handle.parts:
            mapped = frozenset(labels[i] for i in part)
            for v in mapped:
                self._part_of[v] = mapped
        self.partition_cut = oracle.handle.cut_edge_count

    def part(self, v: int) -> frozenset[int]:
        self._ensure_partition()
        return self._part_of[v]

    def forest(self, part: frozenset[int]) -> SubpartForest:
        if part not in self._forests:
            self._forests[part] = subparts(self.g, part, self.is_heavy)
        return self._forests[part]

    def center(self, v: int) -> int | None:
        """Cluster center of ``v``: itself when heavy, else its sub-part's center."""
        if self.is_heavy(v):
            return v
        F = self.forest(self.part(v))
        return F.center[F.subpart_of[v]]

    # -- sampled lightest edge between clusters -----------------------------------

    def sample(self, a: int) -> tuple[int, ...]:
        if a not in self._samples:
            deg = self.g.degree(a)
            if self.q >= deg:
                self._samples[a] = self.g.neighbors(a)
            else:
                picks = []
                for slot in range(self.q):
                    j = hash_fields(self._sample_key, a, slot) % deg
                    u = self.g.neighbor(a, j + 1)
                    picks.append(u[0] if self.g.weighted else u)
                self._samples[a] = tuple(picks)
        return self._samples[a]

    def _collect(self, a: int, b: int, found: set[EdgeRef]) -> None:
        g = self.g
        for u in self.sample(a):
            if self.is_heavy(u):
                if u == b:
                    found.add(EdgeRef.of(a, u))
                continue
            F = self.forest(self.part(u))
            sid = F.subpart_of[u]
            c = F.center[sid]
            if c == b:
                found.add(EdgeRef.of(a, u))
            elif c == a:
                for y in F.subparts[sid]:
                    for z in g.adj(y):
                        if z in F.subparts[sid]:
                            continue
                        if self.center(z) == b:
                            found.add(EdgeRef.of(y, z))

    def sample_lightest(self, a: int, b: int) -> EdgeRef | None:
        """Lightest edge between clusters of centers ``a`` and ``b`` found by sampling."""
        if a == b:
            raise UsageError("sample_lightest needs two distinct centers")
        key = (a, b) if a < b else (b, a)
        if key not in self._lightest:
            found: set[EdgeRef] = set()
            self._collect(a, b, found)
            self._collect(b, a, found)
            self._lightest[key] = min(found, key=self.g.key) if found else None
        return self._lightest[key]

    def _sampled_rule(self, e: EdgeRef, cu: int, cv: int) -> SpannerDecision:
        f = self.sample_lightest(cu, cv)
        if f is None:
            return SpannerDecision(e, True, "cluster-null")
        if self.g.key(e) <= self.g.key(f):
            return SpannerDecision(e, True, "cluster-sample-win")
        return SpannerDecision(e, False, "cluster-sample-lose")

    # -- local per-edge algorithm --------------------------------------------------

    def decide(self, u: int, v: int) -> SpannerDecision:
        g = self.g
        if not g.has_edge(u, v):
            raise UsageError(f"({u}, {v}) is not an edge")
        e = EdgeRef.of(u, v)
        hu, hv = self.is_heavy(u), self.is_heavy(v)
        if hu and hv:
            return SpannerDecision(e, True, "heavy-heavy")
        if not hu and not hv:
            pu, pv = self.part(u), self.part(v)
            if pu != pv:
                return SpannerDecision(e, True, "cut-edge")
            F = self.forest(pu)
            su, sv = F.subpart_of[u], F.subpart_of[v]
            if su == sv:
                if e in F.edges:
                    return SpannerDecision(e, True, "subpart-tree")
                return SpannerDecision(e, False, "subpart-reject")
            cu, cv = F.center[su], F.center[sv]
            if cu == cv:
                return SpannerDecision(e, False, "center-link")
            return self._sampled_rule(e, cu, cv)
        x, h = (u, v) if hv else (v, u)
        F = self.forest(self.part(x))
        sid = F.subpart_of[x]
        cx = F.center[sid]
        if cx == h:
            return SpannerDecision(e, F.link[sid] == e, "center-link")
        return self._sampled_rule(e, cx, h)


def local_edge_unbounded(g: QueryGraph, e, config: SpanConfig, spanner: ClusterSpanner | None = None):
    spanner = spanner or ClusterSpanner(g, config)
    return spanner.decide(*e)


@dataclass
class GlobalResult:
    edges: set[EdgeRef]
    steps: dict[str, set[EdgeRef]]
    heavy: set[int]
    clusters: dict[int, int | None]
    partition_cut: int
    inter_cluster: set[EdgeRef] = field(default_factory=set)

    def weight(self, g: QueryGraph) -> int:
        return g.total_weight(self.edges)


def build_global(g: QueryGraph, config: SpanConfig, spanner: ClusterSpanner | None = None) -> GlobalResult:
    """The global construction, step by step; returns the edge set and per-step breakdown."""
    sp = spanner or ClusterSpanner(g, config)
    heavy = {v for v in range(g.n) if sp.is_heavy(v)}
    steps: dict[str, set[EdgeRef]] = {k: set() for k in ("heavy", "partition", "subpart", "link", "sampled")}
    for e in g.edges():
        if e.u in heavy and e.v in heavy:
            steps["heavy"].add(e)
        elif e.u not in heavy and e.v not in heavy and sp.part(e.u) != sp.part(e.v):
            steps["partition"].add(e)
    seen_parts = set()
    for v in range(g.n):
        if v in heavy:
            continue
        part = sp.part(v)
        if part in seen_parts:
            continue
        seen_parts.add(part)
        F = sp.forest(part)
        steps["subpart"] |= F.edges
        steps["link"] |= {e for e in F.link if e is not None}
    clusters = {v: sp.center(v) for v in range(g.n)}
    for e in g.edges():
        cu, cv = clusters[e.u], clusters[e.v]
        if cu is None or cv is None or cu == cv:
            continue
        if sp._sampled_rule(e, cu, cv).verdict:
            steps["sampled"].add(e)
    edges = set().union(*steps.values())
    inter = {e for e in edges if clusters[e.u] is not None and clusters[e.v] is not None
             and clusters[e.u] != clusters[e.v]}
    return GlobalResult(edges, steps, heavy, clusters, sp.partition_cut, inter)


class BoundedLocalSpanner:
    """Per-edge answers for bounded-degree graphs from covering-oracle answers."""

    def __init__(self, g: QueryGraph, epsilon: float, W: float, oracle: OracleSpec):
        if g.degree_bound is None:
            raise UsageError("bounded-degree local algorithm needs a degree bound")
        self.g = g
        self.epsilon = epsilon
        self.W = W
        self.oracle = oracle.build(g, epsilon / W)

    def decide(self, u: int, v: int) -> SpannerDecision:
        g = self.g
        if not g.has_edge(u, v):
            raise UsageError(f"({u}, {v}) is not an edge")
        e = EdgeRef.of(u, v)
        U = self.oracle.query(u).S | self.oracle.query(v).S
        g.counter.charge(degree=len(U), neighbor=sum(len(g.adj(x)) for x in U))
        # e is the heaviest edge on some cycle iff u and v are joined by lighter edges
        limit = g.key(e)
        seen = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            for y in g.adj(x):
                if y in U and y not in seen and g.key((x, y)) < limit:
                    if y == v:
                        return SpannerDecision(e, False, "cycle-rule-no")
                    seen.add(y)
                    stack.append(y)
        return SpannerDecision(e, True, "cycle-rule-yes")


def local_edge_bounded(g: QueryGraph, e, epsilon: float, W: float, oracle: OracleSpec) -> SpannerDecision:
    return BoundedLocalSpanner(g, epsilon, W, oracle).decide(*e)


@dataclass
class SpannerSummary:
    yes: set[EdgeRef]
    weight: int
    opt: int
    connected: bool
    tallies: dict[str, int]

    @property
    def weight_ratio(self) -> float:
        return self.weight / self.opt if self.opt else 1.0


def summarize(g: QueryGraph, decisions) -> SpannerSummary:
    decisions = list(decisions)
    yes = {d.edge for d in decisions if d.verdict}
    _, opt = kruskal_msf(g, counted=False)
    tallies = Counter(d.rule for d in decisions)
    return SpannerSummary(yes, g.total_weight(yes), opt, spans_components(g, yes),
                          {r: tallies.get(r, 0) for r in RULES})


def fixed_to_real(w: int) -> float:
    return w / SCALE
