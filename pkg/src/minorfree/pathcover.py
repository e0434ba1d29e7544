"""Exact minimum path covers.

Each connected component is solved separately: trees by the linear greedy
(link every vertex to at most two still-open children), everything else by
a Held-Karp style table over ``(subset, last vertex)`` holding the fewest
paths that cover ``subset`` with the current path ending at ``last``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import BudgetError
from .graph import QueryGraph, components

DP_LIMIT = 22
_INF = 127


@dataclass(frozen=True)
class PathCoverCert:
    paths: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.paths)

    def verify(self, g: QueryGraph, vertices=None) -> bool:
        """Disjoint, covering, consecutive vertices adjacent."""
        target = set(range(g.n)) if vertices is None else set(vertices)
        seen: set[int] = set()
        for p in self.paths:
            if not p:
                return False
            for x in p:
                if x in seen or x not in target:
                    return False
                seen.add(x)
            for a, b in zip(p, p[1:]):
                if not g.has_edge(a, b):
                    return False
        return seen == target


@njit(cache=True)
def _cover_table(n, indptr, indices):
    full = 1 << n
    dp = np.full((full, n), _INF, dtype=np.int8)
    for v in range(n):
        dp[1 << v, v] = 1
    for mask in range(1, full):
        best = _INF
        for v in range(n):
            c = dp[mask, v]
            if c == _INF:
                continue
            if c < best:
                best = c
            for j in range(indptr[v], indptr[v + 1]):
                u = indices[j]
                bit = 1 << u
                if mask & bit == 0:
                    if c < dp[mask | bit, u]:
                        dp[mask | bit, u] = c
        if best == _INF:
            continue
        nxt = best + 1
        for u in range(n):
            bit = 1 << u
            if mask & bit == 0:
                if nxt < dp[mask | bit, u]:
                    dp[mask | bit, u] = nxt
    return dp


def _dp_component(g: QueryGraph, comp: list[int]) -> list[tuple[int, ...]]:
    n = len(comp)
    if n > DP_LIMIT:
        raise BudgetError(
            f"component of {n} vertices exceeds the path-cover DP budget of {DP_LIMIT}", n
        )
    local = {v: i for i, v in enumerate(comp)}
    nbrs = [[local[u] for u in g.adj(v) if u in local] for v in comp]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum([len(a) for a in nbrs], out=indptr[1:])
    indices = np.array([u for a in nbrs for u in a], dtype=np.int64)
    dp = _cover_table(n, indptr, indices)

    mask = (1 << n) - 1
    v = int(np.argmin(dp[mask]))
    c = int(dp[mask, v])
    paths = []
    current = [v]
    while True:
        prev = mask ^ (1 << v)
        if prev == 0:
            break
        step = -1
        for u in nbrs[v]:
            if prev >> u & 1 and dp[prev, u] == c:
                step = u
                break
        if step >= 0:
            current.append(step)
        else:
            step = int(np.argmin(dp[prev]))
            assert dp[prev, step] == c - 1
            paths.append(current)
            current = [step]
            c -= 1
        mask, v = prev, step
    paths.append(current)
    return [tuple(comp[i] for i in p) for p in paths]


def _tree_component(g: QueryGraph, comp: list[int]) -> list[tuple[int, ...]]:
    inside = set(comp)
    root = comp[0]
    parent = {root: -1}
    order = [root]
    for x in order:
        for y in g.adj(x):
            if y in inside and y not in parent:
                parent[y] = x
                order.append(y)
    links: dict[int, list[int]] = {v: [] for v in comp}
    open_end = {}
    for v in reversed(order):
        used = 0
        for c in g.adj(v):
            if used == 2:
                break
            if c in inside and parent.get(c) == v and open_end[c]:
                links[v].append(c)
                links[c].append(v)
                used += 1
        open_end[v] = used <= 1
    paths = []
    seen: set[int] = set()
    for v in comp:
        if v in seen or len(links[v]) == 2:
            continue
        path = [v]
        seen.add(v)
        prev, cur = None, v
        while True:
            nxt = [y for y in links[cur] if y != prev and y not in seen]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            seen.add(cur)
            path.append(cur)
        paths.append(tuple(path))
    return paths


def min_path_cover(g: QueryGraph, vertices=None) -> PathCoverCert:
    """Exact minimum path cover of ``g`` (or of ``G[vertices]``).

    Raises :class:`BudgetError` for a non-tree component with more than
    ``DP_LIMIT`` vertices.
    """
    paths: list[tuple[int, ...]] = []
    for comp in components(g, vertices):
        inside = set(comp)
        m2 = sum(1 for v in comp for u in g.adj(v) if u in inside)
        if m2 // 2 == len(comp) - 1:
            paths.extend(_tree_component(g, comp))
        else:
            paths.extend(_dp_component(g, comp))
    return PathCoverCert(tuple(paths))


def path_cover_size(g: QueryGraph, vertices=None) -> int:
    return min_path_cover(g, vertices).size


def greedy_path_cover_bound(g: QueryGraph, vertices) -> int:
    """Cheap upper bound on the minimum path cover of ``G[vertices]``.

    Grows paths from low-degree vertices, always stepping to the unvisited
    neighbor with fewest unvisited neighbors.
    """
    left = set(vertices)
    count = 0
    while left:
        start = min(left, key=lambda x: (sum(1 for y in g.adj(x) if y in left), x))
        left.discard(start)
        count += 1
        cur = start
        while True:
            options = [y for y in g.adj(cur) if y in left]
            if not options:
                break
            cur = min(options, key=lambda x: (sum(1 for y in g.adj(x) if y in left), x))
            left.discard(cur)
    return count


def has_hamiltonian_path(g: QueryGraph, vertices=None) -> bool:
    return path_cover_size(g, vertices) == 1
