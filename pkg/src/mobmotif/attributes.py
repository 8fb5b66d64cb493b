"""Travel-volume and distance attributes of motif instances."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .census import BaselineTable, percent_change, weekday_baseline
from .ingest import DailyGraph, TemporalNetwork, Zone
from .kernel import CONNECTED_TYPES, quad_pair_values

EARTH_RADIUS_KM = 6371.0088
ATTRIBUTES = ("volume", "distance_km")


def haversine_km(lat1, lon1, lat2, lon2):
    """Great-circle distance in km on a sphere of mean Earth radius; broadcasts."""
    p1, p2 = np.radians(lat1), np.radians(lat2)
    dphi = p2 - p1
    dlam = np.radians(lon2) - np.radians(lon1)
    h = np.sin(dphi / 2) ** 2 + np.cos(p1) * np.cos(p2) * np.sin(dlam / 2) ** 2
    return 2 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))


def pair_distance(a: Zone, b: Zone) -> float:
    return float(haversine_km(a.centroid_lat, a.centroid_lon, b.centroid_lat, b.centroid_lon))


def distance_matrix(coords: np.ndarray) -> np.ndarray:
    """All-pairs haversine distances for an ``(n, 2)`` array of (lat, lon)."""
    lat, lon = coords[:, 0], coords[:, 1]
    D = haversine_km(lat[:, None], lon[:, None], lat[None, :], lon[None, :])
    np.fill_diagonal(D, 0.0)
    return D


def median(values: np.ndarray) -> float:
    """Median; even counts take the midpoint of the two central order statistics."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    n = len(x)
    if n == 0:
        return float("nan")
    mid = n // 2
    if n % 2:
        return float(x[mid])
    return float((x[mid - 1] + x[mid]) / 2)


@dataclass(frozen=True)
class AttributeSummary:
    day: int
    motif_type: int
    median_mean_volume: float
    median_mean_distance_km: float
    quad_count: int


def quad_means(weights: np.ndarray, distances: np.ndarray, present: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-quad mean weight and mean distance over present edges only."""
    k = present.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        vol = np.where(present, weights, 0.0).sum(axis=1) / k
        dist = np.where(present, distances, 0.0).sum(axis=1) / k
    return vol, dist


def attributes(
    graph: DailyGraph,
    quads: np.ndarray,
    types: np.ndarray,
    dist: np.ndarray,
) -> list[AttributeSummary]:
    """Median of per-quad mean edge volume and distance, for each motif type present.

    ``types`` holds the day's motif type of every quad; ``dist`` is the zone
    distance matrix.
    """
    quads = np.asarray(quads, dtype=np.int64)
    types = np.asarray(types)
    W = graph.weight_matrix()
    out = []
    for m in CONNECTED_TYPES:
        sel = types == m
        if not sel.any():
            continue
        q = quads[sel]
        w = quad_pair_values(W, q)
        present = w > 0
        vol, d = quad_means(w, quad_pair_values(dist, q), present)
        out.append(AttributeSummary(graph.day, m, median(vol), median(d), int(sel.sum())))
    return out


def attribute_series(
    network: TemporalNetwork,
    quads: np.ndarray,
    types: np.ndarray,
    threads: int = 1,
) -> list[AttributeSummary]:
    """Summaries for every day; ``types`` is the ``(Q, T)`` type matrix of ``quads``."""
    dist = distance_matrix(network.coordinates())

    def one(t: int) -> list[AttributeSummary]:
        return attributes(network.days[t], quads, types[:, t], dist)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        per_day = list(pool.map(one, range(network.t_days)))
    return [s for day in per_day for s in day]


def attribute_matrix(summaries: Sequence[AttributeSummary], t_days: int, attribute: str) -> np.ndarray:
    """``(T, 6)`` array of one attribute, NaN where a (day, type) group was empty."""
    if attribute not in ATTRIBUTES:
        raise ValueError(f"unknown attribute {attribute!r}")
    out = np.full((t_days, len(CONNECTED_TYPES)), np.nan)
    for s in summaries:
        val = s.median_mean_volume if attribute == "volume" else s.median_mean_distance_km
        out[s.day, s.motif_type - 1] = val
    return out


def attribute_change(
    summaries: Sequence[AttributeSummary],
    weekdays: Sequence[int],
    baseline_start: int = 0,
    baseline_len: int = 14,
) -> dict[str, np.ndarray]:
    """Percent change of each attribute against its per-weekday baseline."""
    T = len(weekdays)
    out = {}
    for attr in ATTRIBUTES:
        vals = attribute_matrix(summaries, T, attr)
        base: BaselineTable = weekday_baseline(vals, weekdays, baseline_start, baseline_len)
        out[attr] = percent_change(vals, weekdays, base)
    return out
