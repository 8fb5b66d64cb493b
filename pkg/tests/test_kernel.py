import itertools

import numpy as np
import pytest

from oracles import ORACLE_TABLE, edges_mask, permute_mask
from mobmotif.ingest import TripRecord, build_daily_graph
from mobmotif.kernel import (
    EDGE_COUNT,
    PAIRS,
    Quad,
    QuadEdgeMask,
    classify,
    classify_quads,
    classify_table,
    induced_mask,
    quad_masks,
)


def graph(n, edges, w=100.0):
    rows = []
    for a, b in edges:
        rows += [TripRecord(a, b, 0, w / 2), TripRecord(b, a, 0, w / 2)]
    return build_daily_graph(rows, n, threshold=1.0)


def test_table_matches_isomorphism_oracle():
    assert classify_table().tolist() == ORACLE_TABLE


def test_isomorphism_invariance():
    for m in range(64):
        for perm in itertools.permutations(range(4)):
            assert classify(permute_mask(m, perm)) == classify(m)


@pytest.mark.parametrize(
    "edges,expected",
    [
        (PAIRS, 1),
        ([(0, 1), (1, 2), (2, 3)], 5),
        ([(0, 1), (0, 2), (1, 2)], 0),
        ([(0, 1), (0, 2), (0, 3)], 6),
        ([(0, 1), (1, 2), (2, 3), (0, 3)], 3),
        ([(0, 1), (0, 2), (1, 2), (1, 3)], 4),
        ([], 0),
    ],
)
def test_named_shapes(edges, expected):
    assert classify(edges_mask(edges)) == expected


def test_table_endpoints():
    t = classify_table()
    assert t[0b000000] == 0 and t[0b111111] == 1
    t[0] = 5  # a copy, the module table is untouched
    assert classify(0) == 0


def test_edge_counts_per_type():
    for m in range(64):
        t = classify(m)
        if t:
            assert bin(m).count("1") == EDGE_COUNT[t]
    assert {classify(m) for m in range(64)} == set(range(7))


def has_triangle(m):
    return any(all(m >> PAIRS.index(p) & 1 for p in itertools.combinations(tri, 2)) for tri in itertools.combinations(range(4), 3))


def test_triangle_types():
    tri = {classify(m) for m in range(64) if classify(m) and has_triangle(m)}
    no_tri = {classify(m) for m in range(64) if classify(m) and not has_triangle(m)}
    assert tri == {1, 2, 4}
    assert no_tri == {3, 5, 6}


def test_induced_mask_examples():
    q = Quad.of(7, 2, 4, 9)
    assert q.nodes == (2, 4, 7, 9)
    assert induced_mask(graph(10, []), q).bits == 0
    k4 = graph(10, itertools.combinations(q.nodes, 2))
    m = induced_mask(k4, q)
    assert m.bits == 63 and m.weights == (100.0,) * 6
    m = induced_mask(graph(10, [(2, 4), (4, 7), (7, 8)]), q)
    assert m.n_edges == 2 and m.has(0) and m.has(3)


def test_quad_validation():
    with pytest.raises(ValueError):
        Quad((1, 1, 2, 3))
    with pytest.raises(ValueError):
        QuadEdgeMask(64)


def test_vectorized_matches_scalar():
    rng = np.random.default_rng(3)
    A = rng.random((15, 15)) < 0.4
    A = np.triu(A, 1)
    A = A | A.T
    quads = np.array(list(itertools.combinations(range(15), 4)))
    g = graph(15, zip(*np.nonzero(np.triu(A, 1))))
    masks = quad_masks(A, quads)
    for q, m in zip(quads[::37], masks[::37]):
        assert induced_mask(g, tuple(q)).bits == m
    assert classify_quads(A, quads).tolist() == [ORACLE_TABLE[m] for m in masks]
