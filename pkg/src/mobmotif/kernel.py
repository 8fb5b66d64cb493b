"""Four-node induced-subgraph classification.

Motif types:

    0  disconnected (at least one node cut off from the rest)
    1  complete graph K4
    2  diamond (K4 minus one edge)
    3  4-cycle
    4  paw (triangle with a pendant edge)
    5  path on 4 nodes
    6  star (one hub, three spokes)

Edge masks are 6-bit integers; bit ``k`` stands for the node-position pair
``PAIRS[k]`` of a quad in canonical (sorted) order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PAIRS: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
PAIR_INDEX = {p: k for k, p in enumerate(PAIRS)}

N_TYPES = 7
CONNECTED_TYPES = (1, 2, 3, 4, 5, 6)
MOTIF_NAMES = {
    0: "disconnected",
    1: "K4",
    2: "diamond",
    3: "4-cycle",
    4: "paw",
    5: "path",
    6: "star",
}
EDGE_COUNT = {1: 6, 2: 5, 3: 4, 4: 4, 5: 3, 6: 3}

_DEGREE_SIGNATURES = {
    (6, (3, 3, 3, 3)): 1,
    (5, (3, 3, 2, 2)): 2,
    (4, (2, 2, 2, 2)): 3,
    (4, (3, 2, 2, 1)): 4,
    (3, (2, 2, 1, 1)): 5,
    (3, (3, 1, 1, 1)): 6,
}


@dataclass(frozen=True, order=True)
class Quad:
    nodes: tuple[int, int, int, int]

    def __post_init__(self):
        a, b, c, d = self.nodes
        if not a < b < c < d:
            raise ValueError(f"quad nodes must be strictly increasing, got {self.nodes}")
        if a < 0:
            raise ValueError(f"negative node id in {self.nodes}")

    @classmethod
    def of(cls, *nodes: int) -> "Quad":
        ns = tuple(sorted(int(x) for x in nodes))
        if len(ns) != 4:
            raise ValueError("a quad needs exactly four nodes")
        return cls(ns)  # type: ignore[arg-type]


@dataclass(frozen=True)
class QuadEdgeMask:
    bits: int
    weights: tuple[float, ...] = (0.0,) * 6

    def __post_init__(self):
        if not 0 <= self.bits < 64:
            raise ValueError(f"mask out of range: {self.bits}")
        if len(self.weights) != 6:
            raise ValueError("need one weight per node pair")

    def has(self, k: int) -> bool:
        return bool(self.bits >> k & 1)

    @property
    def n_edges(self) -> int:
        return bin(self.bits).count("1")


def _degrees(bits: int) -> list[int]:
    deg = [0, 0, 0, 0]
    for k, (a, b) in enumerate(PAIRS):
        if bits >> k & 1:
            deg[a] += 1
            deg[b] += 1
    return deg


def _connected(bits: int) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for k, (a, b) in enumerate(PAIRS):
            if bits >> k & 1 and x in (a, b):
                y = b if x == a else a
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return len(seen) == 4


def classify(mask: QuadEdgeMask | int) -> int:
    """Motif type (0-6) of a 4-node induced subgraph given by its edge mask."""
    bits = mask.bits if isinstance(mask, QuadEdgeMask) else int(mask)
    if not 0 <= bits < 64:
        raise ValueError(f"mask out of range: {bits}")
    if not _connected(bits):
        return 0
    key = (bin(bits).count("1"), tuple(sorted(_degrees(bits), reverse=True)))
    return _DEGREE_SIGNATURES[key]


def classify_table() -> np.ndarray:
    """64-entry lookup table ``mask -> motif type``."""
    return _TABLE.copy()


_TABLE = np.array([classify(m) for m in range(64)], dtype=np.int8)


def induced_mask(graph, quad: Quad | tuple[int, int, int, int]) -> QuadEdgeMask:
    """Edge mask and weights of the subgraph of ``graph`` induced on ``quad``."""
    nodes = quad.nodes if isinstance(quad, Quad) else tuple(sorted(quad))
    edges = graph.edges() if hasattr(graph, "edges") else graph
    bits = 0
    weights = []
    for k, (a, b) in enumerate(PAIRS):
        w = edges.get((nodes[a], nodes[b]), 0.0)
        if w > 0:
            bits |= 1 << k
        weights.append(float(w))
    return QuadEdgeMask(bits, tuple(weights))


def quad_masks(adjacency: np.ndarray, quads: np.ndarray) -> np.ndarray:
    """Vectorized edge masks for an ``(Q, 4)`` array of sorted quads."""
    quads = np.asarray(quads)
    masks = np.zeros(len(quads), dtype=np.uint8)
    for k, (a, b) in enumerate(PAIRS):
        masks |= adjacency[quads[:, a], quads[:, b]].astype(np.uint8) << k
    return masks


def quad_pair_values(matrix: np.ndarray, quads: np.ndarray) -> np.ndarray:
    """``(Q, 6)`` array of ``matrix`` entries for each quad's node pairs."""
    quads = np.asarray(quads)
    out = np.empty((len(quads), 6), dtype=matrix.dtype)
    for k, (a, b) in enumerate(PAIRS):
        out[:, k] = matrix[quads[:, a], quads[:, b]]
    return out


def classify_quads(adjacency: np.ndarray, quads: np.ndarray) -> np.ndarray:
    """Motif type of every quad, as int8."""
    return _TABLE[quad_masks(adjacency, quads)]
