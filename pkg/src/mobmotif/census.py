"""Sampled motif census, weekday baselines and percent-change series."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ingest import WEEKDAY_NAMES, DailyGraph, TemporalNetwork
from .kernel import N_TYPES, classify_quads

DEFAULT_SAMPLE_SIZE = 100_000
DEFAULT_BASELINE_LEN = 14
DEFAULT_MA_WINDOW = 7


@dataclass(frozen=True, eq=False)
class QuadSample:
    """Uniform sample of distinct quads, rows sorted ascending."""

    quads: np.ndarray
    seed: int
    n_nodes: int

    @property
    def sample_size(self) -> int:
        return len(self.quads)

    def __len__(self) -> int:
        return len(self.quads)


def _comb_table(n: int, k: int) -> np.ndarray:
    return np.array([math.comb(c, k) for c in range(n)], dtype=np.int64)


def unrank_quads(ranks: np.ndarray, n_nodes: int) -> np.ndarray:
    """Map colexicographic ranks in ``[0, C(n, 4))`` to sorted quads."""
    r = np.asarray(ranks, dtype=np.int64).copy()
    out = np.empty((len(r), 4), dtype=np.int64)
    for k in (4, 3, 2, 1):
        table = _comb_table(n_nodes, k)
        c = np.searchsorted(table, r, side="right") - 1
        out[:, k - 1] = c
        r -= table[c]
    return out


def rank_quads(quads: np.ndarray) -> np.ndarray:
    q = np.asarray(quads, dtype=np.int64)
    ranks = np.zeros(len(q), dtype=np.int64)
    for k in range(4):
        ranks += np.array([math.comb(int(c), k + 1) for c in q[:, k]], dtype=np.int64)
    return ranks


def all_quads(n_nodes: int) -> np.ndarray:
    return unrank_quads(np.arange(math.comb(n_nodes, 4), dtype=np.int64), n_nodes)


def sample_quads(n_nodes: int, sample_size: int, seed: int) -> QuadSample:
    """Draw ``sample_size`` distinct quads uniformly from all ``C(n_nodes, 4)``."""
    total = math.comb(n_nodes, 4)
    if sample_size < 0:
        raise ValueError("sample_size must be non-negative")
    if sample_size > total:
        raise ValueError(f"sample_size {sample_size} exceeds C({n_nodes}, 4) = {total}")
    rng = np.random.default_rng(seed)
    if sample_size == total:
        ranks = np.arange(total, dtype=np.int64)
    else:
        ranks = np.sort(rng.choice(total, size=sample_size, replace=False).astype(np.int64))
    return QuadSample(quads=unrank_quads(ranks, n_nodes), seed=seed, n_nodes=n_nodes)


@dataclass(frozen=True, eq=False)
class DailyCensus:
    day: int
    weekday: int
    counts: np.ndarray  # 7 ints, index = motif type
    distribution: np.ndarray = field(init=False)  # D_1..D_6, NaN when no connected quad

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        connected = counts[1:].sum()
        if connected > 0:
            dist = counts[1:] / connected
        else:
            dist = np.full(N_TYPES - 1, np.nan)
        object.__setattr__(self, "distribution", dist)

    @property
    def sample_size(self) -> int:
        return int(self.counts.sum())

    @property
    def defined(self) -> bool:
        return bool(self.counts[1:].sum() > 0)

    @property
    def share_disconnected(self) -> float:
        total = self.counts.sum()
        return float(self.counts[0] / total) if total else float("nan")


def count_types(types: np.ndarray) -> np.ndarray:
    return np.bincount(np.asarray(types, dtype=np.int64), minlength=N_TYPES)


def census(graph: DailyGraph, sample: QuadSample | np.ndarray, adjacency: np.ndarray | None = None) -> DailyCensus:
    quads = sample.quads if isinstance(sample, QuadSample) else np.asarray(sample)
    if len(quads) and quads.max() >= graph.n_nodes:
        raise ValueError("sample refers to nodes outside the graph's node universe")
    A = graph.adjacency() if adjacency is None else adjacency
    return DailyCensus(graph.day, graph.weekday, count_types(classify_quads(A, quads)))


def census_series(network: TemporalNetwork, sample: QuadSample, threads: int = 1) -> list[DailyCensus]:
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(lambda g: census(g, sample), network.days))


def distribution_matrix(censuses: Sequence[DailyCensus]) -> np.ndarray:
    """``(T, 6)`` array of D_1..D_6."""
    return np.array([c.distribution for c in censuses], dtype=np.float64).reshape(-1, N_TYPES - 1)


@dataclass(frozen=True, eq=False)
class BaselineTable:
    """Per-weekday reference values; ``values[w, k]`` for weekday w (Mon=0)."""

    values: np.ndarray
    window: tuple[int, int]  # [start, stop)

    def for_weekday(self, weekday: int) -> np.ndarray:
        return self.values[weekday]


def weekday_baseline(
    values: np.ndarray, weekdays: Sequence[int], start: int = 0, length: int = DEFAULT_BASELINE_LEN
) -> BaselineTable:
    """Mean of ``values`` per weekday over days ``start .. start+length-1``."""
    values = np.asarray(values, dtype=np.float64)
    weekdays = np.asarray(weekdays, dtype=np.int64)
    if length < 1:
        raise ValueError("baseline window is empty")
    stop = start + length
    if start < 0 or stop > len(values):
        raise ValueError(f"baseline window {start}..{stop - 1} outside series of length {len(values)}")
    win_vals = values[start:stop]
    win_days = weekdays[start:stop]
    table = np.full((7,) + values.shape[1:], np.nan)
    for w in range(7):
        sel = win_days == w
        if not sel.any():
            raise ValueError(f"baseline window has no {WEEKDAY_NAMES[w]}")
        rows = win_vals[sel]
        finite = np.isfinite(rows)
        n = finite.sum(axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            table[w] = np.where(n > 0, np.where(finite, rows, 0.0).sum(axis=0) / n, np.nan)
    return BaselineTable(values=table, window=(start, stop))


def baseline(
    censuses: Sequence[DailyCensus], start: int = 0, length: int = DEFAULT_BASELINE_LEN
) -> BaselineTable:
    return weekday_baseline(distribution_matrix(censuses), [c.weekday for c in censuses], start, length)


def percent_change(values: np.ndarray, weekdays: Sequence[int], base: BaselineTable) -> np.ndarray:
    """100 * (x - b) / b against the same-weekday baseline; NaN where b is 0 or undefined."""
    values = np.asarray(values, dtype=np.float64)
    b = base.values[np.asarray(weekdays, dtype=np.int64)]
    with np.errstate(invalid="ignore", divide="ignore"):
        out = 100.0 * (values - b) / b
    out[~np.isfinite(b) | (b == 0)] = np.nan
    return out


def moving_average(series: np.ndarray, window: int = DEFAULT_MA_WINDOW) -> np.ndarray:
    """Trailing mean over the last ``window`` non-NaN values (partial windows at the start)."""
    if window < 1:
        raise ValueError("window must be >= 1")
    x = np.asarray(series, dtype=np.float64)
    finite = np.isfinite(x)
    vals = np.where(finite, x, 0.0)
    csum = np.concatenate([np.zeros((1,) + x.shape[1:]), np.cumsum(vals, axis=0)])
    ccnt = np.concatenate([np.zeros((1,) + x.shape[1:]), np.cumsum(finite, axis=0)])
    idx = np.arange(1, len(x) + 1)
    lo = np.maximum(idx - window, 0)
    s = csum[idx] - csum[lo]
    n = ccnt[idx] - ccnt[lo]
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(n > 0, s / np.where(n > 0, n, 1), np.nan)


@dataclass(frozen=True, eq=False)
class ChangeSeries:
    """Percent change per day (rows) and motif type (columns 1..6)."""

    raw: np.ndarray
    smoothed: np.ndarray
    days: np.ndarray
    types: tuple[int, ...] = (1, 2, 3, 4, 5, 6)

    def column(self, motif_type: int, smoothed: bool = False) -> np.ndarray:
        data = self.smoothed if smoothed else self.raw
        return data[:, self.types.index(motif_type)]


def change_series(
    censuses: Sequence[DailyCensus],
    base: BaselineTable | None = None,
    ma_window: int = DEFAULT_MA_WINDOW,
    baseline_start: int = 0,
    baseline_len: int = DEFAULT_BASELINE_LEN,
) -> ChangeSeries:
    if base is None:
        base = baseline(censuses, baseline_start, baseline_len)
    raw = percent_change(distribution_matrix(censuses), [c.weekday for c in censuses], base)
    return ChangeSeries(
        raw=raw,
        smoothed=moving_average(raw, ma_window),
        days=np.array([c.day for c in censuses], dtype=np.int64),
    )
