import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from minorfree.errors import UsageError
from minorfree.generators import GenSpec, generate
from minorfree.graph import SCALE, EdgeRef, QueryGraph
from minorfree.oracles import OracleSpec
from minorfree.spanning import (
    BoundedLocalSpanner,
    ClusterSpanner,
    SpanConfig,
    build_global,
    kruskal_msf,
    local_edge_bounded,
    local_edge_unbounded,
    spans_components,
    subparts,
    summarize,
)
from oracles import prim_msf, random_planar_edges

W = SCALE


def weighted(n, edges):
    return QueryGraph(n, edges, weighted=True)


def random_weighted_planar(n, seed, wmax=4):
    rng = random.Random(seed)
    edges = random_planar_edges(n, rng, density=0.7)
    return weighted(n, [(u, v, rng.randint(SCALE, wmax * SCALE)) for u, v in edges])


def test_kruskal_examples():
    tri = weighted(3, [(0, 1, W), (1, 2, 2 * W), (0, 2, 3 * W)])
    forest, total = kruskal_msf(tri)
    assert forest == {EdgeRef(0, 1), EdgeRef(1, 2)} and total == 3 * W
    tree = weighted(4, [(0, 1, W), (1, 2, 5 * W), (1, 3, 2 * W)])
    assert kruskal_msf(tree)[0] == set(tree.edges())
    two = weighted(4, [(0, 1, W), (2, 3, W)])
    assert len(kruskal_msf(two)[0]) == 2 and spans_components(two, kruskal_msf(two)[0])


@given(st.integers(2, 30), st.integers(0, 10**6))
def test_kruskal_matches_prim(n, seed):
    g = random_weighted_planar(n, seed, wmax=2)
    forest, total = kruskal_msf(g, counted=False)
    ref, ref_total = prim_msf(n, g.edge_list())
    assert set(forest) == ref and total == ref_total


def test_subparts_examples():
    path = weighted(3, [(0, 1, W), (1, 2, 2 * W)])
    F = subparts(path, {0, 1, 2}, lambda v: False)
    assert len(F.subparts) == 1 and F.edges == {EdgeRef(0, 1), EdgeRef(1, 2)}
    # a=0, b=1 joined by weight 5; each has a weight-1 edge to heavy 2
    g = weighted(3, [(0, 1, 5 * W), (0, 2, W), (1, 2, W)])
    F = subparts(g, {0, 1}, lambda v: v == 2)
    assert sorted(map(sorted, F.subparts)) == [[0], [1]] and not F.edges
    assert F.center == [2, 2]
    single = subparts(path, {1}, lambda v: False)
    assert single.subparts == [frozenset({1})] and not single.edges
    with pytest.raises(UsageError):
        subparts(weighted(3, [(0, 1, W)]), {0, 2}, lambda v: False)


@pytest.mark.parametrize("seed", range(8))
def test_subpart_edges_in_msf_without_partition_cut(seed):
    g, _ = generate(GenSpec("apollonian", 400, seed=seed, weighted=True, wmax=4))
    cfg = SpanConfig(0.5, W=4, heavy_threshold=12, oracle_k=40, seed=seed)
    res = build_global(g, cfg)
    cut = res.steps["partition"]
    rest = weighted(g.n, [(u, v, g.weight(u, v)) for u, v in g.edges() if EdgeRef(u, v) not in cut])
    msf, _ = kruskal_msf(rest, counted=False)
    assert res.steps["subpart"] | res.steps["link"] <= msf
    assert len(res.steps["subpart"]) > 0


@pytest.mark.parametrize("seed", range(6))
def test_msf_robust_to_edge_removal(seed):
    rng = random.Random(seed)
    g = random_weighted_planar(rng.randint(20, 200), seed, wmax=3)
    F = set(rng.sample(list(g.edges()), rng.randint(1, max(1, g.m // 5))))
    rest = weighted(g.n, [(u, v, g.weight(u, v)) for u, v in g.edges() if (u, v) not in F])
    full, w_full = kruskal_msf(g, counted=False)
    part, w_part = kruskal_msf(rest, counted=False)
    assert w_part <= w_full + len(F) * 3 * SCALE
    assert len(part - full) <= len(F)


def test_sample_lightest_null_and_full_coverage():
    # heavy 0 and 1 (threshold 2), each with its own light leaves; one inter-cluster edge 2-5
    edges = [(0, 2, W), (0, 3, W), (0, 4, W), (1, 5, W), (1, 6, W), (1, 7, W), (2, 5, 3 * W)]
    g = weighted(8, edges)
    sp = ClusterSpanner(g, SpanConfig(0.5, W=3, heavy_threshold=2, oracle_k=10, q=100))
    assert sp.center(2) == 0 and sp.center(5) == 1
    assert sp.sample_lightest(0, 1) == EdgeRef(2, 5)
    g2 = weighted(8, edges[:-1])
    sp2 = ClusterSpanner(g2, SpanConfig(0.5, W=3, heavy_threshold=2, oracle_k=10, q=100))
    assert sp2.sample_lightest(0, 1) is None
    with pytest.raises(UsageError):
        sp.sample_lightest(0, 0)


def test_global_on_tree_is_optimal():
    g, _ = generate(GenSpec("random_tree", 200, seed=3, weighted=True, wmax=4))
    res = build_global(g, SpanConfig(0.5, W=4))
    _, opt = kruskal_msf(g, counted=False)
    assert res.edges == set(g.edges()) and res.weight(g) == opt


def test_global_on_weighted_grid():
    ok = 0
    for seed in range(20):
        g, _ = generate(GenSpec("grid", 400, seed=seed, weighted=True, wmax=4))
        res = build_global(g, SpanConfig(0.5, W=4, seed=seed))
        _, opt = kruskal_msf(g, counted=False)
        ok += spans_components(g, res.edges) and res.weight(g) <= 1.5 * opt
    assert ok >= 18


def test_single_cluster_has_no_sampled_edges():
    edges = [(0, i, 2 * W) for i in range(1, 21)] + [(i, i + 1, W) for i in range(1, 20)]
    g = weighted(21, edges)
    res = build_global(g, SpanConfig(0.5, W=2, heavy_threshold=5, oracle_k=50))
    assert res.heavy == {0} and not res.steps["sampled"] and not res.steps["heavy"]
    assert set(res.clusters.values()) == {0}
    assert spans_components(g, res.edges)


@pytest.mark.parametrize("seed", range(3))
def test_local_unbounded_matches_global(seed):
    g, _ = generate(GenSpec("apollonian", 300, seed=seed, weighted=True, wmax=2))
    cfg = SpanConfig(0.5, W=2, heavy_threshold=15, oracle_k=20, q=6, seed=seed)
    res = build_global(g, cfg)
    edges = list(g.edges())
    baseline = {e: local_edge_unbounded(g, e, cfg).verdict for e in edges[:40]}
    assert all(v == (e in res.edges) for e, v in baseline.items())
    for perm in range(3):
        sp = ClusterSpanner(g, cfg)
        order = edges[:]
        random.Random(perm).shuffle(order)
        assert all(sp.decide(*e).verdict == (e in res.edges) for e in order)


def test_local_unbounded_heavy_pair_and_cut_edges():
    g, _ = generate(GenSpec("apollonian", 200, seed=1, weighted=True, wmax=2))
    cfg = SpanConfig(0.5, W=2, heavy_threshold=10, oracle_k=8)
    sp = ClusterSpanner(g, cfg)
    rules = {sp.decide(*e).rule: sp.decide(*e).verdict for e in g.edges()}
    assert rules.get("heavy-heavy") is True and rules.get("cut-edge") is True


def test_bounded_local_cut_and_cycle_rules():
    tri_tail = QueryGraph(4, [(0, 1, W), (1, 2, 2 * W), (0, 2, 3 * W), (2, 3, 9 * W)], weighted=True,
                          degree_bound=3)
    sp = BoundedLocalSpanner(tri_tail, 0.5, 9, OracleSpec("ball", radius=2))
    assert not sp.decide(0, 2).verdict and sp.decide(0, 2).rule == "cycle-rule-no"
    assert sp.decide(0, 1).verdict and sp.decide(1, 2).verdict
    assert sp.decide(2, 3).verdict  # bridge
    assert local_edge_bounded(tri_tail, (3, 2), 0.5, 9, OracleSpec("ball", radius=1)).verdict


def test_bridges_get_yes_from_both_local_algorithms():
    g, _ = generate(GenSpec("random_tree", 60, seed=2, weighted=True, wmax=3))
    sp = BoundedLocalSpanner(g, 0.5, 3, OracleSpec("ball", radius=2))
    cs = ClusterSpanner(g, SpanConfig(0.5, W=3, heavy_threshold=3, oracle_k=6))
    assert all(sp.decide(*e).verdict and cs.decide(*e).verdict for e in g.edges())


def test_bounded_local_on_grid():
    g, _ = generate(GenSpec("grid", 900, seed=5, weighted=True, wmax=2))
    sp = BoundedLocalSpanner(g, 0.5, 2, OracleSpec("ball"))
    s = summarize(g, [sp.decide(*e) for e in g.edges()])
    assert s.connected and len(s.yes) <= (g.n - 1) + 0.5 * g.n / 2
    assert s.weight_ratio <= 1.5
    with pytest.raises(UsageError):
        BoundedLocalSpanner(QueryGraph(2, [(0, 1, W)], weighted=True), 0.5, 1, OracleSpec("ball"))


def test_span_config_formulas():
    cfg = SpanConfig(0.5, W=2, r=10)
    assert cfg.delta == pytest.approx(6 * 100 * 2 / 0.5)
    assert cfg.oracle_param == pytest.approx(0.5 / 12)
    assert cfg.part_size == 24**2
    assert not cfg.scaled and SpanConfig(0.5, q=3).scaled
    assert cfg.sample_size(100) > 10**6
    with pytest.raises(UsageError):
        SpanConfig(0)
    with pytest.raises(UsageError):
        SpanConfig(0.5, W=0.5)
