import itertools

import numpy as np
import pytest

from oracles import edge_modularity, floyd_warshall, random_connected, set_partitions
from mobmotif.ingest import TripRecord, build_daily_graph
from mobmotif.global_metrics import (
    diameter,
    double_sweep_lower_bound,
    giant_component,
    graph_metrics,
    modularity,
    modularity_partition,
)


def graph(n, edges, w=120.0):
    rows = []
    for a, b in edges:
        rows += [TripRecord(a, b, 0, w / 2), TripRecord(b, a, 0, w / 2)]
    return build_daily_graph(rows, n, threshold=1.0)


def adj(n, edges):
    A = np.zeros((n, n), dtype=bool)
    for a, b in edges:
        A[a, b] = A[b, a] = True
    return A


TWO_K4 = list(itertools.combinations(range(4), 2)) + list(itertools.combinations(range(4, 8), 2)) + [(3, 4)]


def test_giant_component_examples():
    g = graph(5, [(0, 1), (1, 2), (3, 4)])
    assert giant_component(g).tolist() == [0, 1, 2]
    assert len(giant_component(graph(5, []))) == 1
    # tie between {0,1} and {2,3}: smallest id wins
    assert giant_component(graph(4, [(2, 3), (0, 1)])).tolist() == [0, 1]


def test_diameter_examples():
    assert diameter(adj(4, itertools.combinations(range(4), 2))) == 1
    assert diameter(adj(5, [(0, 1), (1, 2), (2, 3), (3, 4)])) == 4
    assert diameter(np.zeros((1, 1), dtype=bool)) == 0
    with pytest.raises(ValueError):
        diameter(adj(3, [(0, 1)]))


def test_diameter_vs_floyd_warshall():
    rng = np.random.default_rng(11)
    for _ in range(20):
        A = random_connected(50, int(rng.integers(0, 80)), rng)
        assert diameter(A) == int(floyd_warshall(A).max())
        assert double_sweep_lower_bound(A) <= diameter(A)


def test_modularity_two_cliques():
    W = adj(8, TWO_K4).astype(float)
    labels, q = modularity_partition(W)
    assert labels.tolist() == [0, 0, 0, 0, 1, 1, 1, 1]
    best = max(
        set_partitions(list(range(8))),
        key=lambda part: edge_modularity(TWO_K4, 8, {i: k for k, blk in enumerate(part) for i in blk}),
    )
    assert sorted(map(sorted, best)) == [[0, 1, 2, 3], [4, 5, 6, 7]]
    assert q == pytest.approx(edge_modularity(TWO_K4, 8, labels.tolist()), abs=1e-12)


def test_single_k4():
    W = adj(4, itertools.combinations(range(4), 2)).astype(float)
    labels, q = modularity_partition(W)
    assert modularity(W, np.zeros(4)) == 0.0
    assert q >= 0.0 - 1e-12
    assert q == pytest.approx(modularity(W, labels), abs=1e-9)


def test_recomputed_modularity_matches():
    rng = np.random.default_rng(4)
    for _ in range(10):
        A = random_connected(40, 60, rng)
        W = np.where(A, rng.uniform(100, 500, A.shape), 0.0)
        W = np.triu(W, 1)
        W = W + W.T
        labels, q = modularity_partition(W)
        assert abs(q - modularity(W, labels)) < 1e-9
        assert q >= modularity(W, np.zeros(40)) - 1e-12


def test_edgeless_metrics():
    g = graph_metrics(graph(6, []))
    assert (g.giant_component_size, g.diameter, g.density, g.avg_degree) == (1, 0, 0.0, 0.0)
    assert np.isnan(g.modularity)


def test_density_identity():
    g = graph_metrics(graph(8, TWO_K4))
    assert g.density * 7 == pytest.approx(g.avg_degree, rel=1e-12)
    assert g.avg_degree == 2 * 13 / 8
    assert g.diameter == 3 and g.giant_component_size == 8
