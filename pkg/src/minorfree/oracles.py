"""Partition and covering-partition oracles.

Three implementations share one interface, ``oracle.query(v) -> CoverResult``:

* :class:`WalkCoverOracle` -- lazy random walks from ``v`` and from every
  walk endpoint; the answer is the component of ``v`` among visited vertices.
* :class:`BallCoverOracle` -- the BFS ball of fixed radius.
* :class:`ExhaustivePartitionOracle` -- a materialised BFS-chunk partition,
  used wherever a true partition oracle is required.

Walk randomness is keyed by ``(seed, start vertex, length, walk index,
step)``, so a walk from ``r`` is the same walk whichever query reached ``r``.
Query costs of cached work are charged again on every reuse, so counters
reflect what an independent local run would spend.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import UsageError
from .graph import QueryGraph, components, cut_size
from .prf import derive_key, hash_arrays, hash_fields


@dataclass(frozen=True)
class CoverResult:
    S: frozenset[int]
    anchor: int
    cap_violation: bool = False
    queries: int = 0

    def __len__(self) -> int:
        return len(self.S)


@dataclass
class OracleParams:
    """Walk-oracle parameters.

    ``ell`` is the base walk length, walks of every length ``t < 10 * ell**c``
    are run ``walks_per_length`` times from each start.  At literal scale
    ``c = 8``; anything smaller is scaled mode.
    """

    epsilon: float = 0.3
    r: int = 10
    ell: int = 2
    walks_per_length: int = 4
    c: int = 1
    part_size_cap: int = 256
    seed: int = 0
    scaled: bool = True

    @property
    def max_length(self) -> int:
        return 10 * self.ell**self.c

    @classmethod
    def literal(cls, epsilon: float, r: int, alpha: int = 1, seed: int = 0) -> "OracleParams":
        """Literal parameterisation; astronomically large for any useful epsilon.

        ``alpha`` is the unspecified absolute constant in the walk length.
        """
        ell = alpha * r**3 + math.ceil(epsilon**-20)
        x = math.ceil(ell**8 * math.log(max(ell, 2)))
        cap = math.ceil(epsilon**-640 * math.log(1 / epsilon) ** 2) if epsilon < 1 else 1
        return cls(epsilon, r, ell, x, 8, cap, seed, scaled=False)


@dataclass
class PartitionHandle:
    parts: list[frozenset[int]]
    cut_edge_count: int
    part_of: dict[int, int] = field(repr=False, default_factory=dict)
    epsilon: float | None = None
    k: int | None = None

    def within_budget(self, n: int) -> bool:
        return self.epsilon is not None and self.cut_edge_count <= self.epsilon * n


def _require_bounded(g: QueryGraph) -> int:
    if g.degree_bound is None:
        raise UsageError("operation needs a bounded-degree graph (degree_bound unset)")
    return g.degree_bound


def _component_of(g: QueryGraph, S, v: int) -> frozenset[int]:
    allowed = S if isinstance(S, (set, frozenset)) else set(S)
    seen = {v}
    stack = [v]
    while stack:
        x = stack.pop()
        for y in g.adj(x):
            if y in allowed and y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


# -- lazy walks -----------------------------------------------------------------


def walk_key(seed: int) -> int:
    return derive_key(seed, "walk")


def lazy_walk(g: QueryGraph, start: int, t: int, seed: int, index: int = 0) -> int:
    """Endpoint of the ``index``-th lazy walk of length ``t`` from ``start``.

    Each step holds with probability ``1 - deg/(2d)`` and otherwise moves to
    a uniform neighbor.  Charges one degree query per step and one neighbor
    query per move.
    """
    d = _require_bounded(g)
    key = walk_key(seed)
    pos = start
    for step in range(t):
        deg = g.degree(pos)
        j = hash_fields(key, start, t, index, step) % (2 * d)
        if j < deg:
            step_to = g.neighbor(pos, j + 1)
            pos = step_to[0] if g.weighted else step_to
    return pos


@dataclass
class _WalkBatch:
    endpoints: np.ndarray
    visited: np.ndarray
    degree_q: int
    neighbor_q: int


def _walk_batches(
    g: QueryGraph, starts: np.ndarray, params: OracleParams, key: int
) -> dict[int, _WalkBatch]:
    """All walks (every length below the maximum, every index) from each start at once."""
    d = _require_bounded(g)
    indptr, indices, deg = g.csr()
    T = params.max_length
    x = params.walks_per_length
    lengths = np.repeat(np.arange(T, dtype=np.int64), x)
    idx = np.tile(np.arange(x, dtype=np.int64), T)
    k = len(starts)
    per = len(lengths)
    start_arr = np.repeat(starts.astype(np.int64), per)
    t_arr = np.tile(lengths, k)
    i_arr = np.tile(idx, k)
    pos = start_arr.copy()
    trail = [pos.copy()]
    dq = np.zeros(len(pos), dtype=np.int64)
    nq = np.zeros(len(pos), dtype=np.int64)
    for step in range(T - 1):
        live = np.nonzero(t_arr > step)[0]
        if len(live) == 0:
            break
        p = pos[live]
        h = hash_arrays(key, start_arr[live], t_arr[live], i_arr[live], step)
        j = (h % np.uint64(2 * d)).astype(np.int64)
        dg = deg[p]
        move = j < dg
        dq[live] += 1
        nq[live[move]] += 1
        p = p.copy()
        p[move] = indices[indptr[p[move]] + j[move]]
        pos[live] = p
        trail.append(pos.copy())
    trail_arr = np.stack(trail, axis=1) if len(trail) > 1 else pos[:, None]
    out = {}
    for b, s in enumerate(starts.tolist()):
        sl = slice(b * per, (b + 1) * per)
        out[s] = _WalkBatch(
            endpoints=np.unique(pos[sl]),
            visited=np.unique(trail_arr[sl]),
            degree_q=int(dq[sl].sum()),
            neighbor_q=int(nq[sl].sum()),
        )
    return out


class WalkCoverOracle:
    """Covering-partition oracle from lazy random walks."""

    kind = "walk"

    def __init__(self, g: QueryGraph, params: OracleParams):
        _require_bounded(g)
        if params.ell < 1 or params.walks_per_length < 1 or params.part_size_cap < 1:
            raise UsageError("ell, walks_per_length and part_size_cap must be >= 1")
        self.g = g
        self.params = params
        self.key = walk_key(params.seed)
        self._batches: dict[int, _WalkBatch] = {}
        self._answers: dict[int, CoverResult] = {}
        self.events: list[dict] = []

    @property
    def size_bound(self) -> int:
        return self.params.part_size_cap

    @property
    def scaled(self) -> bool:
        return self.params.scaled

    def _ensure(self, starts) -> None:
        todo = np.array(sorted(set(int(s) for s in starts) - self._batches.keys()), dtype=np.int64)
        # bound the batch width so memory stays modest
        chunk = max(1, 200_000 // (self.params.max_length * self.params.walks_per_length))
        for lo in range(0, len(todo), chunk):
            self._batches.update(_walk_batches(self.g, todo[lo : lo + chunk], self.params, self.key))

    def query(self, v: int) -> CoverResult:
        self.g._check(v)
        if v in self._answers:
            res = self._answers[v]
            self._charge(v)
            return res
        self._ensure([v])
        first = self._batches[v]
        self._ensure(first.endpoints.tolist())
        parts = [first.visited] + [self._batches[r].visited for r in first.endpoints.tolist()]
        encountered = set(np.unique(np.concatenate(parts)).tolist())
        S = _component_of(self.g, encountered, v)
        cost = self._cost(v)
        violation = len(S) > self.params.part_size_cap
        res = CoverResult(S, v, violation, cost)
        if violation:
            self.events.append({"event": "cap_violation", "anchor": v, "size": len(S)})
        self._answers[v] = res
        self._charge(v)
        return res

    def _cost(self, v: int) -> int:
        first = self._batches[v]
        total = first.degree_q + first.neighbor_q
        for r in first.endpoints.tolist():
            b = self._batches[r]
            total += b.degree_q + b.neighbor_q
        return total

    def _charge(self, v: int) -> None:
        first = self._batches[v]
        dq, nq = first.degree_q, first.neighbor_q
        for r in first.endpoints.tolist():
            b = self._batches[r]
            dq += b.degree_q
            nq += b.neighbor_q
        self.g.counter.charge(neighbor=nq, degree=dq)

    def walk_closure(self, v: int) -> frozenset[int]:
        """Every vertex touched by a scheduled walk of query ``v`` (before restriction)."""
        self.query(v)
        first = self._batches[v]
        parts = [first.visited] + [self._batches[r].visited for r in first.endpoints.tolist()]
        return frozenset(np.unique(np.concatenate(parts)).tolist())


def covering_query(g: QueryGraph, v: int, params: OracleParams) -> CoverResult:
    return WalkCoverOracle(g, params).query(v)


# -- BFS balls --------------------------------------------------------------------


def _ball(g: QueryGraph, v: int, radius: int, cap: int | None):
    dist = {v: 0}
    order = [v]
    queue = deque([v])
    degree_q = neighbor_q = 0
    truncated = False
    while queue:
        x = queue.popleft()
        if dist[x] >= radius:
            continue
        nb = g.adj(x)
        degree_q += 1
        neighbor_q += len(nb)
        for y in nb:
            if y not in dist:
                if cap is not None and len(order) >= cap:
                    truncated = True
                    break
                dist[y] = dist[x] + 1
                order.append(y)
                queue.append(y)
        if truncated:
            break
    return frozenset(order), truncated, degree_q, neighbor_q


class BallCoverOracle:
    """BFS ball of fixed radius, truncated (and flagged) at ``cap`` vertices."""

    kind = "ball"

    def __init__(self, g: QueryGraph, radius: int, cap: int | None = None):
        if radius < 0:
            raise UsageError("radius must be >= 0")
        self.g = g
        self.radius = int(radius)
        self.cap = cap
        self._cache: dict[int, tuple] = {}
        self.events: list[dict] = []

    @property
    def size_bound(self) -> int:
        d = self.g.degree_bound or self.g.max_degree
        bound = 1 + sum(d * max(d - 1, 1) ** (i - 1) for i in range(1, self.radius + 1)) if d else 1
        bound = min(bound, self.g.n)
        return min(bound, self.cap) if self.cap is not None else bound

    scaled = False

    def query(self, v: int) -> CoverResult:
        self.g._check(v)
        if v not in self._cache:
            S, truncated, dq, nq = _ball(self.g, v, self.radius, self.cap)
            if truncated:
                # truncation in BFS order keeps the set connected
                self.events.append({"event": "cap_violation", "anchor": v, "size": len(S)})
            self._cache[v] = (S, truncated, dq, nq)
        S, truncated, dq, nq = self._cache[v]
        self.g.counter.charge(neighbor=nq, degree=dq)
        return CoverResult(S, v, truncated, dq + nq)


def ball_cover_query(g: QueryGraph, v: int, radius: int, cap: int | None = None) -> CoverResult:
    return BallCoverOracle(g, radius, cap).query(v)


# -- exhaustive baseline partition --------------------------------------------------------


def exhaustive_partition(g: QueryGraph, epsilon: float | None, k: int) -> PartitionHandle:
    """Greedy BFS chunks of at most ``k`` vertices, grown from the least unassigned id."""
    if k < 1:
        raise UsageError("part size k must be >= 1")
    part_of: dict[int, int] = {}
    parts: list[frozenset[int]] = []
    for s in range(g.n):
        if s in part_of:
            continue
        pid = len(parts)
        part_of[s] = pid
        chunk = [s]
        queue = deque([s])
        while queue and len(chunk) < k:
            x = queue.popleft()
            for y in g.adj(x):
                if y not in part_of:
                    part_of[y] = pid
                    chunk.append(y)
                    queue.append(y)
                    if len(chunk) == k:
                        break
        parts.append(frozenset(chunk))
    g.counter.charge(degree=g.n, neighbor=2 * g.m)
    cut = sum(1 for u, v in g.edges() if part_of[u] != part_of[v])
    return PartitionHandle(parts, cut, part_of, epsilon, k)


def partition_query(handle: PartitionHandle, v: int) -> frozenset[int]:
    return handle.parts[handle.part_of[v]]


class ExhaustivePartitionOracle:
    """Materialised partition; doubles as a covering oracle (a part covers itself)."""

    kind = "exhaustive"
    scaled = False

    def __init__(self, g: QueryGraph, k: int, epsilon: float | None = None):
        self.g = g
        self.k = k
        self.handle = exhaustive_partition(g, epsilon, k)
        self.events: list[dict] = []

    @property
    def size_bound(self) -> int:
        return self.k

    def part(self, v: int) -> frozenset[int]:
        self.g._check(v)
        return partition_query(self.handle, v)

    def query(self, v: int) -> CoverResult:
        return CoverResult(self.part(v), v, False, 0)


# -- oracle construction ------------------------------------------------------------


@dataclass
class OracleSpec:
    """Recipe for building an oracle at a requested proximity parameter.

    Unset fields derive from epsilon: ball radius ``ceil(1/eps)``, exhaustive
    part size ``ceil(1/eps)**2``.  Explicit overrides mark the run as scaled.
    """

    kind: str = "exhaustive"
    k: int | None = None
    radius: int | None = None
    cap: int | None = None
    walk: OracleParams | None = None
    seed: int = 0

    @property
    def scaled(self) -> bool:
        if self.kind == "walk":
            return self.walk is None or self.walk.scaled
        return self.k is not None or self.radius is not None

    def build(self, g: QueryGraph, epsilon: float):
        if self.kind == "exhaustive":
            k = self.k if self.k is not None else math.ceil(1 / epsilon) ** 2
            return ExhaustivePartitionOracle(g, k, epsilon)
        if self.kind == "ball":
            radius = self.radius if self.radius is not None else math.ceil(1 / epsilon)
            return BallCoverOracle(g, radius, self.cap)
        if self.kind == "walk":
            params = self.walk or OracleParams(epsilon=epsilon, seed=self.seed)
            params = OracleParams(**{**params.__dict__, "epsilon": epsilon, "seed": self.seed})
            return WalkCoverOracle(g, params)
        raise UsageError(f"unknown oracle kind {self.kind!r}")

    def describe(self) -> dict:
        out = {"kind": self.kind, "seed": self.seed, "scaled": self.scaled}
        if self.k is not None:
            out["k"] = self.k
        if self.radius is not None:
            out["radius"] = self.radius
        if self.cap is not None:
            out["cap"] = self.cap
        if self.walk is not None:
            out["walk"] = {
                "ell": self.walk.ell,
                "c": self.walk.c,
                "walks_per_length": self.walk.walks_per_length,
                "part_size_cap": self.walk.part_size_cap,
            }
        return out


# -- derived partition and calibration ----------------------------------------------


def derived_partition(
    g: QueryGraph, reference: PartitionHandle, cover: Callable[[int], CoverResult]
) -> tuple[list[frozenset[int]], int, int]:
    """Refine ``reference``: a part survives only if every member's cover contains it.

    Returns ``(parts, cut_edge_count, failed_vertices)``; parts with a failing
    member are split into singletons.
    """
    failed = 0
    broken = set()
    for pid, part in enumerate(reference.parts):
        for v in sorted(part):
            if not part <= cover(v).S:
                failed += 1
                broken.add(pid)
    parts: list[frozenset[int]] = []
    label: dict[int, int] = {}
    for pid, part in enumerate(reference.parts):
        pieces = [frozenset([v]) for v in sorted(part)] if pid in broken else [part]
        for piece in pieces:
            for v in piece:
                label[v] = len(parts)
            parts.append(piece)
    cut = sum(1 for u, v in g.edges() if label[u] != label[v])
    return parts, cut, failed


@dataclass
class CalibrationRow:
    k: int
    ell: int
    c: int
    walks_per_length: int
    passes: int
    seeds: int
    mean_cut: float
    mean_size: float

    @property
    def pass_rate(self) -> float:
        return self.passes / self.seeds


def calibrate_walk_params(
    g: QueryGraph,
    epsilon: float,
    seeds,
    ks=(6, 8, 12),
    ells=(2,),
    cs=(1,),
    xs=(2, 4, 8),
    target: float = 0.9,
    cap: int = 256,
) -> tuple[CalibrationRow | None, list[CalibrationRow]]:
    """Sweep ``(k, ell, c, x)`` and pick the cheapest setting whose derived partition
    has at most ``epsilon * d * n`` cut edges on a ``target`` fraction of seeds."""
    d = _require_bounded(g)
    budget = epsilon * d * g.n
    rows = []
    seeds = list(seeds)
    for k in ks:
        ref = exhaustive_partition(g, epsilon, k)
        for ell in ells:
            for c in cs:
                for x in xs:
                    passes = 0
                    cuts = []
                    sizes = []
                    for s in seeds:
                        params = OracleParams(epsilon, ell=ell, c=c, walks_per_length=x,
                                              part_size_cap=cap, seed=s)
                        oracle = WalkCoverOracle(g, params)
                        _, cut, _ = derived_partition(g, ref, oracle.query)
                        cuts.append(cut)
                        sizes.append(np.mean([len(oracle.query(v)) for v in range(g.n)]))
                        passes += cut <= budget
                    rows.append(CalibrationRow(k, ell, c, x, passes, len(seeds),
                                               float(np.mean(cuts)), float(np.mean(sizes))))
    ok = [r for r in rows if r.pass_rate >= target]
    best = min(ok, key=lambda r: (r.walks_per_length * 10 * r.ell**r.c, r.mean_size)) if ok else None
    return best, rows


def partition_cut(g: QueryGraph, parts) -> int:
    label = {}
    for i, p in enumerate(parts):
        for v in p:
            label[v] = i
    return sum(1 for u, v in g.edges() if label[u] != label[v])


def is_valid_cover(g: QueryGraph, res: CoverResult) -> bool:
    return res.anchor in res.S and len(components(g, res.S)) == 1


__all__ = [
    "BallCoverOracle",
    "CoverResult",
    "ExhaustivePartitionOracle",
    "OracleParams",
    "OracleSpec",
    "PartitionHandle",
    "WalkCoverOracle",
    "ball_cover_query",
    "calibrate_walk_params",
    "covering_query",
    "cut_size",
    "derived_partition",
    "exhaustive_partition",
    "is_valid_cover",
    "lazy_walk",
    "partition_cut",
    "partition_query",
]
