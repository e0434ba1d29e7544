"""Query-access graph model.

A :class:`QueryGraph` is an immutable simple undirected graph stored as
sorted incidence lists.  Algorithms see it through counted queries
(:meth:`QueryGraph.degree`, :meth:`QueryGraph.neighbor`,
:meth:`QueryGraph.random_neighbor`); ground-truth code may use the
uncounted :meth:`QueryGraph.adj`.

Weights are fixed-point integers scaled by ``SCALE``.  Edges are totally
ordered by ``(weight, u, v)`` with ``u < v``, so "lightest" is never
ambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import UsageError
from .prf import Stream

SCALE = 10**6


class _Absent:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ABSENT"

    def __bool__(self) -> bool:
        return False


ABSENT = _Absent()


class EdgeRef(NamedTuple):
    """Canonical undirected edge; tuple order is the edge ranking."""

    u: int
    v: int

    @classmethod
    def of(cls, a: int, b: int) -> "EdgeRef":
        return cls(a, b) if a < b else cls(b, a)


def to_fixed(value) -> int:
    """Exact conversion of a decimal weight (str, int, float, Decimal) to fixed point."""
    d = Decimal(str(value)) * SCALE
    if d != d.to_integral_value():
        raise UsageError(f"weight {value} has more than 6 decimal places")
    return int(d)


def format_fixed(w: int) -> str:
    whole, frac = divmod(int(w), SCALE)
    if frac == 0:
        return str(whole)
    return f"{whole}.{frac:06d}".rstrip("0")


@dataclass
class QueryCounter:
    neighbor_queries: int = 0
    degree_queries: int = 0
    random_neighbor_queries: int = 0

    @property
    def total(self) -> int:
        return self.neighbor_queries + self.degree_queries + self.random_neighbor_queries

    def reset(self) -> None:
        self.neighbor_queries = 0
        self.degree_queries = 0
        self.random_neighbor_queries = 0

    def snapshot(self) -> dict[str, int]:
        return {
            "neighbor_queries": self.neighbor_queries,
            "degree_queries": self.degree_queries,
            "random_neighbor_queries": self.random_neighbor_queries,
            "total": self.total,
        }

    def charge(self, neighbor: int = 0, degree: int = 0, random_neighbor: int = 0) -> None:
        self.neighbor_queries += int(neighbor)
        self.degree_queries += int(degree)
        self.random_neighbor_queries += int(random_neighbor)


class QueryGraph:
    """Immutable simple graph behind a counted query interface.

    ``edges`` holds pairs ``(u, v)`` or, for weighted graphs, triples
    ``(u, v, w)`` with ``w`` a fixed-point integer (see :func:`to_fixed`).
    """

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple] = (),
        *,
        degree_bound: int | None = None,
        weighted: bool = False,
    ):
        if n < 0:
            raise UsageError("vertex count must be non-negative")
        self._n = int(n)
        self._weighted = bool(weighted)
        nbrs: list[set[int]] = [set() for _ in range(self._n)]
        weights: dict[tuple[int, int], int] = {}
        for item in edges:
            if weighted:
                if len(item) != 3:
                    raise UsageError(f"weighted graph needs (u, v, w) triples, got {item!r}")
                a, b, w = item
                w = int(w)
                if w < SCALE:
                    raise UsageError(f"edge ({a}, {b}) has weight below 1")
            else:
                if len(item) != 2:
                    raise UsageError(f"unweighted graph needs (u, v) pairs, got {item!r}")
                a, b = item
            a, b = int(a), int(b)
            if not (0 <= a < self._n and 0 <= b < self._n):
                raise UsageError(f"edge ({a}, {b}) has an endpoint outside [0, {self._n})")
            if a == b:
                raise UsageError(f"self-loop at {a}")
            if b in nbrs[a]:
                raise UsageError(f"parallel edge ({a}, {b})")
            nbrs[a].add(b)
            nbrs[b].add(a)
            if weighted:
                weights[(a, b) if a < b else (b, a)] = w
        self._adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(s)) for s in nbrs)
        self._weights = weights
        self._m = sum(len(a) for a in self._adj) // 2
        if degree_bound is not None:
            degree_bound = int(degree_bound)
            worst = self.max_degree
            if worst > degree_bound:
                raise UsageError(f"max degree {worst} exceeds degree bound {degree_bound}")
        self._d = degree_bound
        self._csr: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
        self.counter = QueryCounter()

    # -- structure -------------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return self._m

    @property
    def weighted(self) -> bool:
        return self._weighted

    @property
    def degree_bound(self) -> int | None:
        return self._d

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self._adj), default=0)

    @property
    def max_weight(self) -> int:
        """W_G in fixed point (``SCALE`` for unweighted graphs)."""
        return max(self._weights.values(), default=SCALE)

    def with_degree_bound(self, d: int | None) -> "QueryGraph":
        return QueryGraph(self._n, self.edge_list(), degree_bound=d, weighted=self._weighted)

    def _check(self, v: int) -> None:
        if not (isinstance(v, (int, np.integer)) and 0 <= v < self._n):
            raise UsageError(f"invalid vertex id {v!r}")

    # -- uncounted access (ground truth, oracles over materialized data) --

    def adj(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        a = self._adj[u]
        # sorted tuple, small degrees: linear scan beats bisect overhead
        return v in a

    def weight(self, u: int, v: int) -> int:
        if not self._weighted:
            return SCALE
        return self._weights[(u, v) if u < v else (v, u)]

    def key(self, e: tuple[int, int]) -> tuple[int, int, int]:
        """Sort key realising the strict total order on edges."""
        u, v = e
        if u > v:
            u, v = v, u
        return (self.weight(u, v), u, v)

    def edges(self) -> Iterator[EdgeRef]:
        """All edges in rank order."""
        for u, nb in enumerate(self._adj):
            for v in nb:
                if u < v:
                    yield EdgeRef(u, v)

    def edge_list(self) -> list[tuple]:
        if self._weighted:
            return [(u, v, self._weights[(u, v)]) for u, v in self.edges()]
        return [(u, v) for u, v in self.edges()]

    def total_weight(self, edges: Iterable[tuple[int, int]]) -> int:
        return sum(self.weight(u, v) for u, v in edges)

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, indices, degree)`` arrays for vectorised walks."""
        if self._csr is None:
            deg = np.fromiter((len(a) for a in self._adj), dtype=np.int64, count=self._n)
            indptr = np.zeros(self._n + 1, dtype=np.int64)
            np.cumsum(deg, out=indptr[1:])
            indices = np.fromiter(
                (v for a in self._adj for v in a), dtype=np.int64, count=int(indptr[-1])
            )
            self._csr = (indptr, indices, deg)
        return self._csr

    # -- counted queries ---------------------------------------------------

    def degree(self, v: int) -> int:
        self._check(v)
        self.counter.degree_queries += 1
        return len(self._adj[v])

    def neighbor(self, v: int, i: int):
        """The ``i``-th neighbor (1-based), ``(u, w)`` when weighted, or ``ABSENT``."""
        self._check(v)
        if i < 1:
            raise UsageError(f"neighbor index must be >= 1, got {i}")
        self.counter.neighbor_queries += 1
        a = self._adj[v]
        if i > len(a):
            return ABSENT
        u = a[i - 1]
        if self._weighted:
            return (u, self.weight(v, u))
        return u

    def neighbors(self, v: int) -> tuple[int, ...]:
        """Whole incidence list; charged as one degree query plus ``deg(v)`` neighbor queries."""
        self._check(v)
        a = self._adj[v]
        self.counter.degree_queries += 1
        self.counter.neighbor_queries += len(a)
        return a

    def random_neighbor(self, v: int, stream: Stream) -> int:
        self._check(v)
        a = self._adj[v]
        if not a:
            raise UsageError(f"random neighbor query on isolated vertex {v}")
        self.counter.random_neighbor_queries += 1
        return a[stream.randbelow(len(a))]

    def __repr__(self) -> str:
        extra = f", d={self._d}" if self._d is not None else ""
        w = ", weighted" if self._weighted else ""
        return f"QueryGraph(n={self._n}, m={self._m}{extra}{w})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, QueryGraph):
            return NotImplemented
        return (
            self._n == other._n
            and self._adj == other._adj
            and self._weights == other._weights
            and self._d == other._d
            and self._weighted == other._weighted
        )

    __hash__ = None


def neighbor_query(g: QueryGraph, v: int, i: int):
    return g.neighbor(v, i)


def random_neighbor_query(g: QueryGraph, v: int, stream: Stream) -> int:
    return g.random_neighbor(v, stream)


def compare_weight(g: QueryGraph, e1: tuple[int, int], e2: tuple[int, int]) -> int:
    """-1, 0 or 1: by weight, then by rank."""
    k1, k2 = g.key(e1), g.key(e2)
    if k1 == k2:
        return 0
    return -1 if k1 < k2 else 1


def induced_subgraph(g: QueryGraph, S: Iterable[int]) -> tuple[QueryGraph, list[int]]:
    """``G[S]`` relabelled to ``0..|S|-1`` in id order, plus the new-to-old id list."""
    labels = sorted(set(S))
    index = {v: i for i, v in enumerate(labels)}
    edges = []
    for v in labels:
        for u in g.adj(v):
            if v < u and u in index:
                if g.weighted:
                    edges.append((index[v], index[u], g.weight(v, u)))
                else:
                    edges.append((index[v], index[u]))
    sub = QueryGraph(len(labels), edges, degree_bound=g.degree_bound, weighted=g.weighted)
    return sub, labels


def cut_edges(g: QueryGraph, S: Iterable[int]) -> set[EdgeRef]:
    inside = set(S)
    out = set()
    for v in inside:
        for u in g.adj(v):
            if u not in inside:
                out.add(EdgeRef.of(v, u))
    return out


def cut_size(g: QueryGraph, S) -> int:
    inside = S if isinstance(S, (set, frozenset)) else set(S)
    return sum(1 for v in inside for u in g.adj(v) if u not in inside)


def components(g: QueryGraph, vertices: Iterable[int] | None = None) -> list[list[int]]:
    """Connected components of ``G[vertices]`` (all of ``G`` by default), uncounted."""
    allowed = set(range(g.n)) if vertices is None else set(vertices)
    seen: set[int] = set()
    comps = []
    for s in sorted(allowed):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        stack = [s]
        while stack:
            x = stack.pop()
            for y in g.adj(x):
                if y in allowed and y not in seen:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        comps.append(sorted(comp))
    return comps


def is_connected_set(g: QueryGraph, S) -> bool:
    S = set(S)
    if not S:
        return True
    return len(components(g, S)) == 1


class DisjointSet:
    def __init__(self, items: Iterable[int] = ()):
        self.parent: dict[int, int] = {x: x for x in items}
        self.size: dict[int, int] = {x: 1 for x in self.parent}

    def find(self, x: int) -> int:
        parent = self.parent
        if x not in parent:
            parent[x] = x
            self.size[x] = 1
            return x
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True
