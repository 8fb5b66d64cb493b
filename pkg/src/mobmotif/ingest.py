"""Trip/zone ingestion and construction of the thresholded daily O-D graphs."""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

WEEKDAY_NAMES = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")

DEFAULT_THRESHOLD = 50.0

TRIPS_HEADER = ("origin", "destination", "day", "volume")
ZONES_HEADER = ("id", "lat", "lon", "label")


class IngestError(ValueError):
    """Raised for malformed or invalid input rows."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TripParseError(IngestError):
    pass


class TripValidationError(IngestError):
    pass


@dataclass(frozen=True)
class Zone:
    id: int
    centroid_lat: float
    centroid_lon: float
    label: str = ""

    def __post_init__(self):
        if self.id < 0:
            raise IngestError(f"zone id must be non-negative, got {self.id}")
        if not -90.0 <= self.centroid_lat <= 90.0:
            raise IngestError(f"zone {self.id}: latitude {self.centroid_lat} out of range")
        if not -180.0 <= self.centroid_lon <= 180.0:
            raise IngestError(f"zone {self.id}: longitude {self.centroid_lon} out of range")


@dataclass(frozen=True)
class TripRecord:
    origin: int
    destination: int
    day: int
    volume: float


@dataclass(frozen=True, eq=False)
class TripTable:
    """Columnar trip records; iterating yields :class:`TripRecord`."""

    origin: np.ndarray
    destination: np.ndarray
    day: np.ndarray
    volume: np.ndarray

    @classmethod
    def from_records(cls, records: Iterable[TripRecord]) -> "TripTable":
        recs = list(records)
        return cls(
            origin=np.array([r.origin for r in recs], dtype=np.int64),
            destination=np.array([r.destination for r in recs], dtype=np.int64),
            day=np.array([r.day for r in recs], dtype=np.int64),
            volume=np.array([r.volume for r in recs], dtype=np.float64),
        )

    @classmethod
    def empty(cls) -> "TripTable":
        return cls.from_records([])

    def __len__(self) -> int:
        return len(self.origin)

    def __iter__(self) -> Iterator[TripRecord]:
        for o, d, t, v in zip(self.origin, self.destination, self.day, self.volume):
            yield TripRecord(int(o), int(d), int(t), float(v))

    def __getitem__(self, idx) -> TripRecord:
        return TripRecord(
            int(self.origin[idx]), int(self.destination[idx]), int(self.day[idx]), float(self.volume[idx])
        )

    def select(self, mask: np.ndarray) -> "TripTable":
        return TripTable(self.origin[mask], self.destination[mask], self.day[mask], self.volume[mask])


@dataclass(frozen=True, eq=False)
class DailyGraph:
    """Undirected weighted graph for one day over a fixed node universe.

    Edges are stored as parallel arrays with ``u < v``, sorted lexicographically.
    """

    day: int
    weekday: int
    n_nodes: int
    u: np.ndarray
    v: np.ndarray
    weight: np.ndarray

    @property
    def n_edges(self) -> int:
        return len(self.u)

    @property
    def weekday_name(self) -> str:
        return WEEKDAY_NAMES[self.weekday]

    def edges(self) -> dict[tuple[int, int], float]:
        return {(int(a), int(b)): float(w) for a, b, w in zip(self.u, self.v, self.weight)}

    def weight_matrix(self) -> np.ndarray:
        W = np.zeros((self.n_nodes, self.n_nodes), dtype=np.float64)
        W[self.u, self.v] = self.weight
        W[self.v, self.u] = self.weight
        return W

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n_nodes, self.n_nodes), dtype=bool)
        A[self.u, self.v] = True
        A[self.v, self.u] = True
        return A

    def same_edges(self, other: "DailyGraph") -> bool:
        return (
            self.n_nodes == other.n_nodes
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.weight, other.weight)
        )


@dataclass(frozen=True, eq=False)
class TemporalNetwork:
    zones: tuple[Zone, ...]
    days: tuple[DailyGraph, ...]
    calendar_start: dt.date
    threshold: float = DEFAULT_THRESHOLD

    @property
    def n_nodes(self) -> int:
        return len(self.zones)

    @property
    def t_days(self) -> int:
        return len(self.days)

    @property
    def weekdays(self) -> np.ndarray:
        return np.array([g.weekday for g in self.days], dtype=np.int64)

    def date_of(self, day: int) -> dt.date:
        return self.calendar_start + dt.timedelta(days=day)

    def coordinates(self) -> np.ndarray:
        """(n, 2) array of (lat, lon) in degrees."""
        return np.array([[z.centroid_lat, z.centroid_lon] for z in self.zones], dtype=np.float64).reshape(-1, 2)


def _reader(stream: TextIO | str, header: Sequence[str], what: str) -> Iterator[tuple[int, list[str]]]:
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream)
    try:
        first = next(reader)
    except StopIteration:
        raise TripParseError(f"{what}: empty input, expected header {','.join(header)}", 1) from None
    got = [c.strip() for c in first]
    if got != list(header):
        raise TripParseError(f"{what}: expected header {','.join(header)}, got {','.join(got)}", 1)
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        yield reader.line_num, row


def parse_zones(stream: TextIO | str) -> list[Zone]:
    zones = []
    for line, row in _reader(stream, ZONES_HEADER, "zones"):
        if len(row) not in (3, 4):
            raise TripParseError(f"expected 4 fields, got {len(row)}", line)
        try:
            zid, lat, lon = int(row[0]), float(row[1]), float(row[2])
        except ValueError as exc:
            raise TripParseError(str(exc), line) from None
        label = row[3].strip() if len(row) == 4 else ""
        try:
            zones.append(Zone(zid, lat, lon, label))
        except IngestError as exc:
            raise TripValidationError(str(exc), line) from None
    zones.sort(key=lambda z: z.id)
    ids = [z.id for z in zones]
    if ids != list(range(len(ids))):
        raise TripValidationError("zone ids must be dense and unique (0..n-1)")
    return zones


def parse_trips(
    stream: TextIO | str, zones: Sequence[Zone] | int, t_days: int | None = None
) -> TripTable:
    """Parse a trips CSV into a :class:`TripTable`.

    ``zones`` is either the zone table or the number of zones. Self-loops,
    unknown zone ids, negative volumes and days outside ``0..t_days-1`` are
    rejected with the offending line number.
    """
    n = zones if isinstance(zones, int) else len(zones)
    cols: tuple[list, list, list, list] = ([], [], [], [])
    for line, row in _reader(stream, TRIPS_HEADER, "trips"):
        if len(row) != 4:
            raise TripParseError(f"expected 4 fields, got {len(row)}", line)
        try:
            o, d, t, v = int(row[0]), int(row[1]), int(row[2]), float(row[3])
        except ValueError as exc:
            raise TripParseError(str(exc), line) from None
        for zid in (o, d):
            if not 0 <= zid < n:
                raise TripValidationError(f"unknown zone id {zid} (have {n} zones)", line)
        if o == d:
            raise TripValidationError(f"self-loop on zone {o}", line)
        if t < 0 or (t_days is not None and t >= t_days):
            raise TripValidationError(f"day {t} outside 0..{(t_days or 0) - 1}", line)
        if not v >= 0.0 or not np.isfinite(v):
            raise TripValidationError(f"volume must be a finite non-negative number, got {row[3]}", line)
        for col, x in zip(cols, (o, d, t, v)):
            col.append(x)
    return TripTable(
        origin=np.array(cols[0], dtype=np.int64),
        destination=np.array(cols[1], dtype=np.int64),
        day=np.array(cols[2], dtype=np.int64),
        volume=np.array(cols[3], dtype=np.float64),
    )


def write_zones(zones: Sequence[Zone], stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(ZONES_HEADER)
    for z in zones:
        w.writerow([z.id, repr(z.centroid_lat), repr(z.centroid_lon), z.label])


def write_trips(trips: TripTable, stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(TRIPS_HEADER)
    for o, d, t, v in zip(trips.origin.tolist(), trips.destination.tolist(), trips.day.tolist(), trips.volume.tolist()):
        w.writerow([o, d, t, repr(v)])


def build_daily_graph(
    records: TripTable | Iterable[TripRecord],
    n_nodes: int,
    threshold: float = DEFAULT_THRESHOLD,
    day: int | None = None,
    weekday: int = 0,
) -> DailyGraph:
    """Threshold one day's directional volumes into an undirected graph.

    Edge ``{u, v}`` is kept iff both ``u->v`` and ``v->u`` strictly exceed
    ``threshold``; its weight is the sum of the two directional volumes.
    Duplicate (origin, destination) rows are summed first.
    """
    if not threshold > 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    trips = records if isinstance(records, TripTable) else TripTable.from_records(records)
    days = np.unique(trips.day)
    if len(days) > 1:
        raise ValueError(f"records span several days: {days.tolist()}")
    if day is None:
        day = int(days[0]) if len(days) else 0
    elif len(days) and days[0] != day:
        raise ValueError(f"records are for day {int(days[0])}, expected {day}")
    if len(trips) and (trips.origin == trips.destination).any():
        raise ValueError("self-loop in records")

    vol = np.zeros((n_nodes, n_nodes), dtype=np.float64)
    # np.add.at sums duplicates; summation order follows input order, so sort first
    # for permutation invariance of the floating-point result
    order = np.lexsort((trips.volume, trips.destination, trips.origin))
    np.add.at(vol, (trips.origin[order], trips.destination[order]), trips.volume[order])

    keep = (vol > threshold) & (vol.T > threshold)
    u, v = np.nonzero(np.triu(keep, k=1))
    weight = vol[u, v] + vol[v, u]
    return DailyGraph(
        day=int(day),
        weekday=int(weekday),
        n_nodes=n_nodes,
        u=u.astype(np.int64),
        v=v.astype(np.int64),
        weight=weight,
    )


def build_temporal_network(
    trips: TripTable | Iterable[TripRecord],
    zones: Sequence[Zone],
    calendar_start: dt.date,
    t_days: int,
    threshold: float = DEFAULT_THRESHOLD,
) -> TemporalNetwork:
    trips = trips if isinstance(trips, TripTable) else TripTable.from_records(trips)
    if len(trips) and (trips.day.min() < 0 or trips.day.max() >= t_days):
        raise ValueError(f"trip days must lie in 0..{t_days - 1}")
    n = len(zones)
    order = np.argsort(trips.day, kind="stable")
    sorted_days = trips.day[order]
    bounds = np.searchsorted(sorted_days, np.arange(t_days + 1))
    graphs = []
    for t in range(t_days):
        idx = order[bounds[t] : bounds[t + 1]]
        weekday = (calendar_start + dt.timedelta(days=t)).weekday()
        graphs.append(build_daily_graph(trips.select(idx), n, threshold, day=t, weekday=weekday))
    return TemporalNetwork(
        zones=tuple(zones), days=tuple(graphs), calendar_start=calendar_start, threshold=threshold
    )
