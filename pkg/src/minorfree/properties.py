"""One-sided testing of monotone, additive properties through a covering oracle."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable

from .errors import BudgetError, UsageError
from .graph import QueryGraph, induced_subgraph
from .hamiltonicity import Verdict
from .oracles import OracleSpec
from .prf import Stream


@dataclass(frozen=True)
class PropertyDecider:
    name: str
    decide: Callable[[QueryGraph], bool]
    monotone: bool = True
    additive: bool = True
    max_size: int | None = None


def is_bipartite(g: QueryGraph) -> bool:
    color: dict[int, int] = {}
    for s in range(g.n):
        if s in color:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in g.adj(x):
                if y not in color:
                    color[y] = 1 - color[x]
                    queue.append(y)
                elif color[y] == color[x]:
                    return False
    return True


def bipartite_decider() -> PropertyDecider:
    return PropertyDecider("bipartite", is_bipartite, monotone=True, additive=True)


DECIDERS = {"bipartite": bipartite_decider}


def test_property(
    g: QueryGraph,
    decider: PropertyDecider,
    epsilon: float,
    oracle: OracleSpec | None = None,
    seed: int = 0,
    sample_constant: float = 4.0,
    cover_oracle=None,
) -> Verdict:
    """Sample ``ceil(4d/eps)`` vertices and reject iff some cover violates the property.

    The witness is the violating vertex set; monotonicity makes it a proof
    that ``g`` itself lacks the property.
    """
    if not (decider.monotone and decider.additive):
        raise UsageError(f"property {decider.name!r} is not flagged monotone and additive")
    d = g.degree_bound
    if d is None:
        raise UsageError("property tester needs a bounded-degree graph")
    if not 0 < epsilon <= 1:
        raise UsageError("epsilon must lie in (0, 1]")
    if cover_oracle is None:
        spec = oracle or OracleSpec("ball", radius=1, seed=seed)
        cover_oracle = spec.build(g, epsilon / 2)
    y = math.ceil(sample_constant * d / epsilon)
    rng = Stream(seed, "property-test")
    seen: set[frozenset[int]] = set()
    for i in range(y):
        v = rng.randbelow(g.n)
        S = cover_oracle.query(v).S
        if S in seen:
            continue
        seen.add(S)
        if decider.max_size is not None and len(S) > decider.max_size:
            raise BudgetError(f"cover of size {len(S)} exceeds decider budget", len(S))
        g.counter.charge(degree=len(S), neighbor=sum(len(g.adj(u)) for u in S))
        sub, _ = induced_subgraph(g, S)
        if not decider.decide(sub):
            return Verdict(False, {"kind": "violation", "property": decider.name, "S": sorted(S)}, i + 1)
    return Verdict(True, None, y)


test_property.__test__ = False


def check_witness(g: QueryGraph, decider: PropertyDecider, witness: dict) -> bool:
    sub, _ = induced_subgraph(g, witness["S"])
    return not decider.decide(sub)
