"""Flat CSV outputs of every stage, and readers used by the report stage."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .attributes import ATTRIBUTES, AttributeSummary
from .census import ChangeSeries, DailyCensus
from .global_metrics import GlobalMetrics
from .ingest import WEEKDAY_NAMES
from .persistence import ConversionMatrix, PersistenceDiagram

CENSUS_COLUMNS = (
    ["day", "weekday"] + [f"count_m{i}" for i in range(7)] + [f"d{i}" for i in range(1, 7)] + ["share_m0"]
)
CHANGE_COLUMNS = ["day", "type", "pct_change", "pct_change_ma7"]
PERSISTENCE_COLUMNS = ["type", "birth", "death", "death_target", "censored", "multiplicity"]
CONVERSION_COLUMNS = ["day", "from_type", "to_type", "fraction", "support"]
ATTRIBUTE_COLUMNS = ["day", "type", "median_mean_volume", "median_mean_distance_km", "quad_count"]
ATTRIBUTE_CHANGE_COLUMNS = ["day", "type", "attribute", "pct_change"]
GLOBAL_COLUMNS = ["day", "giant_component", "diameter", "modularity", "density", "avg_degree"]


def fmt(x) -> str:
    """Stable text form: ints as-is, floats via ``repr``, NaN as ``nan``."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "nan" if math.isnan(x) else repr(x)
    return str(x)


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])
    return path


def read_rows(path: Path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def census_rows(censuses: Sequence[DailyCensus]):
    for c in censuses:
        yield [c.day, WEEKDAY_NAMES[c.weekday], *c.counts.tolist(), *c.distribution.tolist(), c.share_disconnected]


def change_rows(changes: ChangeSeries):
    for i, day in enumerate(changes.days):
        for k, m in enumerate(changes.types):
            yield [int(day), m, changes.raw[i, k], changes.smoothed[i, k]]


def persistence_rows(diag: PersistenceDiagram):
    for p in diag.points:
        yield [p.motif_type, p.birth, p.death, "" if p.censored else p.death_target, p.censored, p.multiplicity]


def conversion_rows(mats: Sequence[ConversionMatrix]):
    for m in mats:
        for i in range(7):
            for j in range(7):
                yield [m.day, i, j, m.matrix[i, j], int(m.support[i])]


def attribute_rows(summaries: Sequence[AttributeSummary]):
    for s in summaries:
        yield [s.day, s.motif_type, s.median_mean_volume, s.median_mean_distance_km, s.quad_count]


def attribute_change_rows(changes: dict[str, np.ndarray]):
    T = len(next(iter(changes.values())))
    for day in range(T):
        for m in range(1, 7):
            for attr in ATTRIBUTES:
                yield [day, m, attr, changes[attr][day, m - 1]]


def global_rows(metrics: Sequence[GlobalMetrics]):
    for g in metrics:
        yield [g.day, g.giant_component_size, g.diameter, g.modularity, g.density, g.avg_degree]


def _pivot(rows: list[dict[str, str]], value: str, key: str = "type", extra: dict[str, str] | None = None):
    """Long rows -> (T, 6) array indexed by day and motif type 1..6."""
    sel = [r for r in rows if not extra or all(r[k] == v for k, v in extra.items())]
    T = max((int(r["day"]) for r in sel), default=-1) + 1
    out = np.full((T, 6), np.nan)
    for r in sel:
        out[int(r["day"]), int(r[key]) - 1] = float(r[value])
    return out


def load_census(path: Path) -> dict[str, np.ndarray]:
    rows = read_rows(path)
    return {
        "day": np.array([int(r["day"]) for r in rows]),
        "weekday": np.array([WEEKDAY_NAMES.index(r["weekday"]) for r in rows]),
        "counts": np.array([[int(r[f"count_m{i}"]) for i in range(7)] for r in rows]).reshape(-1, 7),
        "distribution": np.array([[float(r[f"d{i}"]) for i in range(1, 7)] for r in rows]).reshape(-1, 6),
    }


def load_change(path: Path) -> dict[str, np.ndarray]:
    rows = read_rows(path)
    return {"raw": _pivot(rows, "pct_change"), "smoothed": _pivot(rows, "pct_change_ma7")}


def load_persistence(path: Path) -> list[dict]:
    return [
        {
            "type": int(r["type"]),
            "birth": int(r["birth"]),
            "death": int(r["death"]),
            "death_target": int(r["death_target"]) if r["death_target"] != "" else None,
            "censored": r["censored"] == "1",
            "multiplicity": int(r["multiplicity"]),
        }
        for r in read_rows(path)
    ]


def load_conversions(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """``(T-1, 7, 7)`` fractions and ``(T-1, 7)`` row supports."""
    rows = read_rows(path)
    n = max((int(r["day"]) for r in rows), default=-1) + 1
    frac = np.full((n, 7, 7), np.nan)
    support = np.zeros((n, 7), dtype=np.int64)
    for r in rows:
        d, i, j = int(r["day"]), int(r["from_type"]), int(r["to_type"])
        frac[d, i, j] = float(r["fraction"])
        support[d, i] = int(r["support"])
    return frac, support


def load_attributes(path: Path) -> dict[str, np.ndarray]:
    rows = read_rows(path)
    return {
        "volume": _pivot(rows, "median_mean_volume"),
        "distance_km": _pivot(rows, "median_mean_distance_km"),
    }


def load_attribute_change(path: Path) -> dict[str, np.ndarray]:
    rows = read_rows(path)
    return {a: _pivot(rows, "pct_change", extra={"attribute": a}) for a in ATTRIBUTES}


def load_global(path: Path) -> dict[str, np.ndarray]:
    rows = read_rows(path)
    out = {c: np.array([float(r[c]) for r in rows]) for c in GLOBAL_COLUMNS}
    out["day"] = out["day"].astype(int)
    return out
