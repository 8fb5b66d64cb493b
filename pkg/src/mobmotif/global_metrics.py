"""Whole-graph measures per day: giant component, diameter, modularity, density, degree."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .ingest import DailyGraph, TemporalNetwork


@dataclass(frozen=True)
class GlobalMetrics:
    day: int
    giant_component_size: int
    diameter: int
    modularity: float  # NaN for an edgeless graph
    density: float
    avg_degree: float


def giant_component(graph: DailyGraph) -> np.ndarray:
    """Sorted node ids of the largest component; ties go to the smallest minimum id."""
    n = graph.n_nodes
    if n == 0:
        return np.empty(0, dtype=np.int64)
    A = csr_matrix((np.ones(graph.n_edges), (graph.u, graph.v)), shape=(n, n))
    _, labels = connected_components(A, directed=False)
    sizes = np.bincount(labels)
    best = sizes.max()
    # labels are assigned in order of first appearance, so the lowest label among
    # the largest components holds the smallest minimum node id
    label = int(np.flatnonzero(sizes == best)[0])
    return np.flatnonzero(labels == label)


def bfs_levels(adjacency: np.ndarray, sources: np.ndarray) -> np.ndarray:
    """Hop distances from each source to every node (-1 if unreachable).

    All sources advance together, one frontier expansion per level.
    """
    A = adjacency.astype(np.float32)
    n = A.shape[0]
    sources = np.asarray(sources, dtype=np.int64)
    dist = np.full((len(sources), n), -1, dtype=np.int64)
    frontier = np.zeros((len(sources), n), dtype=bool)
    frontier[np.arange(len(sources)), sources] = True
    reached = frontier.copy()
    level = 0
    while frontier.any():
        dist[frontier] = level
        level += 1
        frontier = ((frontier.astype(np.float32) @ A) > 0) & ~reached
        reached |= frontier
    return dist


def diameter(adjacency: np.ndarray) -> int:
    """Largest hop distance between any two nodes of a connected graph."""
    n = adjacency.shape[0]
    if n <= 1:
        return 0
    dist = bfs_levels(adjacency, np.arange(n))
    if (dist < 0).any():
        raise ValueError("diameter is undefined on a disconnected graph")
    return int(dist.max())


def double_sweep_lower_bound(adjacency: np.ndarray, start: int = 0) -> int:
    first = bfs_levels(adjacency, np.array([start]))[0]
    far = int(np.argmax(first))
    return int(bfs_levels(adjacency, np.array([far]))[0].max())


def modularity(weights: np.ndarray, partition: np.ndarray) -> float:
    """Newman modularity of ``partition`` (community label per node) on a weighted graph."""
    W = np.asarray(weights, dtype=np.float64)
    two_m = W.sum()
    if two_m == 0:
        return float("nan")
    labels = np.asarray(partition)
    q = 0.0
    for c in np.unique(labels):
        sel = labels == c
        inside = W[np.ix_(sel, sel)].sum()  # counts each internal edge twice
        tot = W[sel].sum()
        q += inside / two_m - (tot / two_m) ** 2
    return float(q)


def modularity_partition(weights: np.ndarray) -> tuple[np.ndarray, float]:
    """Greedy agglomerative (Clauset-Newman-Moore) modularity maximization.

    Repeatedly merges the adjacent community pair with the largest positive
    modularity gain; ties go to the lexicographically smallest (i, j), and the
    merged community keeps the smaller id. Returns community labels (renumbered
    0.. by smallest member) and the modularity of the final partition.
    """
    W = np.asarray(weights, dtype=np.float64)
    n = W.shape[0]
    two_m = W.sum()
    if two_m == 0:
        return np.arange(n), float("nan")
    e = W / two_m
    a = e.sum(axis=1)
    q = float(np.trace(e) - (a**2).sum())
    label = np.arange(n)
    alive = np.ones(n, dtype=bool)

    # gain[i, j] for i < j and adjacent communities, -inf elsewhere
    gain = np.where(e > 0, 2.0 * (e - np.outer(a, a)), -np.inf)
    gain[np.tril_indices(n)] = -np.inf
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)

    while True:
        flat = int(np.argmax(gain))
        i, j = divmod(flat, n)
        best = gain[i, j]
        if not best > 0:
            break
        q += best
        # fold community j into i
        e[i, :] += e[j, :]
        e[:, i] += e[:, j]
        e[j, :] = 0.0
        e[:, j] = 0.0
        a[i] += a[j]
        a[j] = 0.0
        alive[j] = False
        label[label == j] = i
        row = np.where((e[i] > 0) & alive, 2.0 * (e[i] - a[i] * a), -np.inf)
        row[i] = -np.inf
        gain[i, :] = np.where(upper[i], row, -np.inf)
        gain[:, i] = np.where(upper[:, i], row, -np.inf)
        gain[j, :] = -np.inf
        gain[:, j] = -np.inf

    # a community's id is always its smallest member, so this numbers them by that member
    _, inverse = np.unique(label, return_inverse=True)
    return inverse.astype(np.int64), q


def graph_metrics(graph: DailyGraph) -> GlobalMetrics:
    n = graph.n_nodes
    m = graph.n_edges
    giant = giant_component(graph)
    A = graph.adjacency()
    diam = diameter(A[np.ix_(giant, giant)]) if len(giant) else 0
    q = modularity_partition(graph.weight_matrix())[1] if m else float("nan")
    density = 2.0 * m / (n * (n - 1)) if n > 1 else 0.0
    avg_degree = 2.0 * m / n if n else 0.0
    return GlobalMetrics(graph.day, len(giant), diam, q, density, avg_degree)


def daily_global_metrics(network: TemporalNetwork, threads: int = 1) -> list[GlobalMetrics]:
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(graph_metrics, network.days))

