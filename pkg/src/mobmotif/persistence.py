"""Per-quad motif tracking, birth/death intervals, and day-to-day conversion tables."""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .census import QuadSample
from .ingest import TemporalNetwork
from .kernel import N_TYPES, Quad, classify_quads

DEFAULT_POOL_SIZE = 1_200_000
WEEKDAY_STABILITY_TOL = 0.05


@dataclass(frozen=True, eq=False)
class TypeSequence:
    quad: Quad
    types: np.ndarray


@dataclass(frozen=True)
class PersistenceInterval:
    quad: Quad | None
    motif_type: int
    birth: int
    death: int
    death_target: int | None
    censored: bool

    @property
    def lifetime(self) -> int:
        return self.death - self.birth


def track_array(network: TemporalNetwork, quads: np.ndarray, threads: int = 1) -> np.ndarray:
    """``(Q, T)`` int8 matrix of motif types, one row per quad."""
    quads = np.asarray(quads, dtype=np.int64).reshape(-1, 4)
    out = np.empty((len(quads), network.t_days), dtype=np.int8)

    def one_day(t: int) -> None:
        out[:, t] = classify_quads(network.days[t].adjacency(), quads)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        list(pool.map(one_day, range(network.t_days)))
    return out


def select_active_quads(
    network: TemporalNetwork, pool: QuadSample | np.ndarray, threads: int = 1
) -> np.ndarray:
    """Quads from ``pool`` that form a connected motif on at least one day."""
    quads = pool.quads if isinstance(pool, QuadSample) else np.asarray(pool, dtype=np.int64)
    types = track_array(network, quads, threads)
    return quads[(types > 0).any(axis=1)]


def track(network: TemporalNetwork, quads: np.ndarray | Sequence[Quad], threads: int = 1) -> list[TypeSequence]:
    arr = _as_array(quads)
    types = track_array(network, arr, threads)
    return [TypeSequence(Quad(tuple(int(x) for x in q)), types[i]) for i, q in enumerate(arr)]


def _as_array(quads) -> np.ndarray:
    if isinstance(quads, np.ndarray):
        return quads.astype(np.int64).reshape(-1, 4)
    return np.array([q.nodes if isinstance(q, Quad) else tuple(q) for q in quads], dtype=np.int64).reshape(-1, 4)


def intervals(seq: TypeSequence | Sequence[int]) -> list[PersistenceInterval]:
    """Maximal constant runs of connected types as birth/death intervals.

    Death is the first day the type differs; a run still alive on the last
    day is censored with ``death = T``. Runs of type 0 yield nothing.
    """
    if isinstance(seq, TypeSequence):
        quad, types = seq.quad, [int(x) for x in seq.types]
    else:
        quad, types = None, [int(x) for x in seq]
    out = []
    T = len(types)
    start = 0
    for t in range(1, T + 1):
        if t == T or types[t] != types[start]:
            m = types[start]
            if m != 0:
                censored = t == T
                out.append(
                    PersistenceInterval(quad, m, start, t, None if censored else types[t], censored)
                )
            start = t
    return out


@dataclass(frozen=True, eq=False)
class IntervalArrays:
    """Columnar intervals for many quads; ``death_target`` is -1 when censored."""

    quad_index: np.ndarray
    motif_type: np.ndarray
    birth: np.ndarray
    death: np.ndarray
    death_target: np.ndarray
    censored: np.ndarray

    def __len__(self) -> int:
        return len(self.motif_type)


def intervals_array(types: np.ndarray) -> IntervalArrays:
    """Vectorized :func:`intervals` over a ``(Q, T)`` type matrix."""
    types = np.asarray(types)
    Q, T = types.shape
    starts = np.ones((Q, T), dtype=bool)
    starts[:, 1:] = types[:, 1:] != types[:, :-1]
    flat = np.flatnonzero(starts.ravel())
    # every row starts a run at t=0, so the next run start is the end of this one (or the row end)
    ends = np.append(flat[1:], Q * T)
    row = flat // T
    birth = flat - row * T
    death = ends - row * T
    mtype = types[row, birth]
    censored = death == T
    target = np.full(len(flat), -1, dtype=np.int64)
    live = ~censored
    target[live] = types[row[live], death[live]]
    keep = mtype != 0
    return IntervalArrays(
        quad_index=row[keep],
        motif_type=mtype[keep].astype(np.int64),
        birth=birth[keep],
        death=death[keep],
        death_target=target[keep],
        censored=censored[keep],
    )


def reconstruct(ivs: Iterable[PersistenceInterval], t_days: int) -> list[int]:
    """Inverse of :func:`intervals`: fill runs, leaving gaps as type 0."""
    out = [0] * t_days
    for iv in ivs:
        for t in range(iv.birth, iv.death):
            out[t] = iv.motif_type
    return out


@dataclass(frozen=True)
class DiagramPoint:
    motif_type: int
    birth: int
    death: int
    death_target: int  # -1 for censored
    censored: bool
    multiplicity: int


@dataclass(frozen=True, eq=False)
class PersistenceDiagram:
    points: tuple[DiagramPoint, ...]

    def for_type(self, motif_type: int, include_censored: bool = True) -> list[DiagramPoint]:
        return [
            p for p in self.points
            if p.motif_type == motif_type and (include_censored or not p.censored)
        ]

    @property
    def total(self) -> int:
        return sum(p.multiplicity for p in self.points)


def diagram(ivs: IntervalArrays | Iterable[PersistenceInterval]) -> PersistenceDiagram:
    """Group intervals by (type, birth, death, target, censored) with multiplicities."""
    if isinstance(ivs, IntervalArrays):
        if len(ivs) == 0:
            return PersistenceDiagram(())
        keys = np.stack(
            [ivs.motif_type, ivs.birth, ivs.death, ivs.death_target, ivs.censored.astype(np.int64)], axis=1
        )
        uniq, counts = np.unique(keys, axis=0, return_counts=True)
        pts = [
            DiagramPoint(int(k[0]), int(k[1]), int(k[2]), int(k[3]), bool(k[4]), int(c))
            for k, c in zip(uniq, counts)
        ]
    else:
        tally = Counter(
            (iv.motif_type, iv.birth, iv.death, -1 if iv.censored else iv.death_target, iv.censored)
            for iv in ivs
        )
        pts = [DiagramPoint(m, b, d, tgt, c, k) for (m, b, d, tgt, c), k in sorted(tally.items())]
    return PersistenceDiagram(tuple(pts))


@dataclass(frozen=True, eq=False)
class ConversionMatrix:
    day: int
    matrix: np.ndarray  # (7, 7); NaN rows where support is 0
    support: np.ndarray  # (7,)

    @property
    def supported(self) -> np.ndarray:
        return self.support > 0


def conversion_matrix(types: np.ndarray | Sequence[TypeSequence], day: int) -> ConversionMatrix:
    """Fraction of quads of type i on ``day`` that are type j on ``day + 1``."""
    arr = _type_matrix(types)
    T = arr.shape[1]
    if not 0 <= day < T - 1:
        raise ValueError(f"day must lie in 0..{T - 2}, got {day}")
    a = arr[:, day].astype(np.int64)
    b = arr[:, day + 1].astype(np.int64)
    counts = np.bincount(a * N_TYPES + b, minlength=N_TYPES * N_TYPES).reshape(N_TYPES, N_TYPES)
    support = counts.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        mat = counts / support[:, None]
    mat[support == 0] = np.nan
    return ConversionMatrix(day=day, matrix=mat, support=support)


def conversion_matrices(types: np.ndarray | Sequence[TypeSequence]) -> list[ConversionMatrix]:
    arr = _type_matrix(types)
    return [conversion_matrix(arr, t) for t in range(arr.shape[1] - 1)]


def _type_matrix(types) -> np.ndarray:
    if isinstance(types, np.ndarray):
        return types
    return np.array([s.types for s in types], dtype=np.int8)


def weekday_stability(
    matrices: Sequence[ConversionMatrix], weekdays: Sequence[int], days: Sequence[int]
) -> dict[int, float]:
    """Largest entry-wise gap between matrices of the same weekday among ``days``.

    Only rows supported in both matrices are compared. Returns a map
    weekday -> max difference (weekdays seen once are omitted).
    """
    by_day = {m.day: m for m in matrices}
    groups: dict[int, list[ConversionMatrix]] = {}
    for d in days:
        if d in by_day:
            groups.setdefault(int(weekdays[d]), []).append(by_day[d])
    out = {}
    for w, ms in sorted(groups.items()):
        if len(ms) < 2:
            continue
        worst = 0.0
        for i in range(len(ms)):
            for j in range(i + 1, len(ms)):
                rows = ms[i].supported & ms[j].supported
                if rows.any():
                    worst = max(worst, float(np.abs(ms[i].matrix[rows] - ms[j].matrix[rows]).max()))
        out[w] = worst
    return out
