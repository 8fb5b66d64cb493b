"""Stage orchestration: inputs -> stage tables -> charts, plus the run manifest."""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import platform
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, plotting, tables
from .attributes import attribute_change, attribute_series
from .census import QuadSample, census_series, change_series, sample_quads
from .config import RunConfig
from .global_metrics import daily_global_metrics
from .ingest import TemporalNetwork, build_temporal_network, parse_trips, parse_zones, write_trips, write_zones
from .persistence import conversion_matrices, diagram, intervals_array, track_array
from .synth import generate

log = logging.getLogger(__name__)

STAGES = ("census", "persist", "convert", "attr", "global")
STAGE_OUTPUTS = {
    "census": ("census.csv", "change.csv"),
    "persist": ("persistence.csv",),
    "convert": ("conversions.csv",),
    "attr": ("attributes.csv", "attribute_change.csv"),
    "global": ("global.csv",),
}
MANIFEST = "manifest.json"


class InputError(Exception):
    """Bad or missing input; maps to exit code 2."""


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_arrays(*arrays: np.ndarray) -> str:
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(a)
        h.update(str(a.dtype).encode())
        h.update(a.tobytes())
    return h.hexdigest()


@dataclass
class Inputs:
    network: TemporalNetwork
    digests: dict[str, str]


def load_inputs(cfg: RunConfig, use_synth: bool) -> Inputs:
    if use_synth:
        sc = generate(cfg.synth)
        net = build_temporal_network(
            sc.trips, sc.zones, cfg.synth.calendar_start, cfg.synth.t_days, cfg.ingest.threshold
        )
        t = sc.trips
        coords = net.coordinates()
        return Inputs(
            net,
            {
                "trips": "synth:" + sha256_arrays(t.origin, t.destination, t.day, t.volume),
                "zones": "synth:" + sha256_arrays(coords),
            },
        )
    ing = cfg.ingest
    if not ing.trips:
        raise InputError("no trips file configured ([ingest] trips) and --synth not given")
    if not ing.zones:
        raise InputError("no zones file configured ([ingest] zones)")
    for p in (ing.zones, ing.trips):
        if not Path(p).is_file():
            raise InputError(f"input file not found: {p}")
    try:
        with open(ing.zones, newline="") as fh:
            zones = parse_zones(fh)
        with open(ing.trips, newline="") as fh:
            trips = parse_trips(fh, zones, ing.t_days)
    except ValueError as exc:
        raise InputError(f"{exc}") from exc
    net = build_temporal_network(trips, zones, ing.calendar_start, ing.t_days, ing.threshold)
    return Inputs(net, {"trips": sha256_file(Path(ing.trips)), "zones": sha256_file(Path(ing.zones))})


def quad_pool(n_nodes: int, size: int, seed: int) -> QuadSample:
    """``sample_quads`` that falls back to every quad when ``size`` covers them all."""
    total = math.comb(n_nodes, 4)
    if size >= total:
        if size > total:
            log.warning("requested %d quads but only C(%d, 4) = %d exist; using all", size, n_nodes, total)
        size = total
    return sample_quads(n_nodes, size, seed)


class StageWriter:
    """Writes stage files as ``<name>.partial`` and renames them once the stage completes."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.pending: list[Path] = []
        self.done: list[str] = []

    def write(self, name: str, header, rows) -> None:
        tmp = self.out_dir / f"{name}.partial"
        tables.write_rows(tmp, header, rows)
        self.pending.append(tmp)

    def commit(self) -> None:
        for tmp in self.pending:
            final = tmp.with_name(tmp.name[: -len(".partial")])
            os.replace(tmp, final)
            self.done.append(final.name)
        self.pending = []


@dataclass
class Pipeline:
    cfg: RunConfig
    inputs: Inputs
    out_dir: Path
    threads: int = 1
    writer: StageWriter = field(init=False)
    _census_types: np.ndarray | None = field(default=None, init=False)
    _sample: QuadSample | None = field(default=None, init=False)
    _pool_types: np.ndarray | None = field(default=None, init=False)

    def __post_init__(self):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.writer = StageWriter(self.out_dir)

    @property
    def network(self) -> TemporalNetwork:
        return self.inputs.network

    def sample(self) -> QuadSample:
        if self._sample is None:
            c = self.cfg.census
            self._sample = quad_pool(self.network.n_nodes, c.sample_size, c.seed)
        return self._sample

    def census_types(self) -> np.ndarray:
        if self._census_types is None:
            self._census_types = track_array(self.network, self.sample().quads, self.threads)
        return self._census_types

    def pool_types(self) -> np.ndarray:
        """Type matrix of the persistence pool, restricted to quads active on some day."""
        if self._pool_types is None:
            p = self.cfg.persistence
            pool = quad_pool(self.network.n_nodes, p.persistence_pool_size, p.persistence_seed)
            types = track_array(self.network, pool.quads, self.threads)
            self._pool_types = types[(types > 0).any(axis=1)]
            log.info("persistence: %d of %d pooled quads active", len(self._pool_types), len(pool))
        return self._pool_types

    def run_stage(self, stage: str) -> None:
        log.info("stage %s", stage)
        getattr(self, f"_stage_{stage}")()
        self.writer.commit()

    def _stage_census(self) -> None:
        c = self.cfg.census
        censuses = census_series(self.network, self.sample(), self.threads)
        changes = change_series(censuses, None, c.ma_window, c.baseline_start, c.baseline_len)
        self.writer.write("census.csv", tables.CENSUS_COLUMNS, tables.census_rows(censuses))
        self.writer.write("change.csv", tables.CHANGE_COLUMNS, tables.change_rows(changes))

    def _stage_persist(self) -> None:
        diag = diagram(intervals_array(self.pool_types()))
        self.writer.write("persistence.csv", tables.PERSISTENCE_COLUMNS, tables.persistence_rows(diag))

    def _stage_convert(self) -> None:
        mats = conversion_matrices(self.pool_types())
        self.writer.write("conversions.csv", tables.CONVERSION_COLUMNS, tables.conversion_rows(mats))

    def _stage_attr(self) -> None:
        c = self.cfg.census
        summaries = attribute_series(self.network, self.sample().quads, self.census_types(), self.threads)
        changes = attribute_change(summaries, self.network.weekdays, c.baseline_start, c.baseline_len)
        self.writer.write("attributes.csv", tables.ATTRIBUTE_COLUMNS, tables.attribute_rows(summaries))
        self.writer.write(
            "attribute_change.csv", tables.ATTRIBUTE_CHANGE_COLUMNS, tables.attribute_change_rows(changes)
        )

    def _stage_global(self) -> None:
        metrics = daily_global_metrics(self.network, self.threads)
        self.writer.write("global.csv", tables.GLOBAL_COLUMNS, tables.global_rows(metrics))


def write_inputs(cfg: RunConfig, out_dir: Path) -> dict[str, Path]:
    """Generate the synthetic scenario and write it as zones/trips CSVs."""
    sc = generate(cfg.synth)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {"zones": out_dir / "zones.csv", "trips": out_dir / "trips.csv"}
    with open(paths["zones"], "w", newline="") as fh:
        write_zones(sc.zones, fh)
    with open(paths["trips"], "w", newline="") as fh:
        write_trips(sc.trips, fh)
    return paths


def manifest_data(cfg: RunConfig, inputs_digests: dict[str, str], out_dir: Path, outputs: list[str]) -> dict:
    return {
        "config": cfg.to_mapping(),
        "config_source": cfg.source,
        "inputs": inputs_digests,
        "versions": {
            "mobmotif": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "seeds": {
            "census": cfg.census.seed,
            "persistence": cfg.persistence.persistence_seed,
            "synth": cfg.synth.seed,
        },
        "outputs": {name: sha256_file(out_dir / name) for name in sorted(outputs)},
    }


def read_manifest(out_dir: Path) -> dict | None:
    path = out_dir / MANIFEST
    if not path.is_file():
        return None
    with open(path) as fh:
        return json.load(fh)


def write_manifest(cfg: RunConfig, digests: dict[str, str], out_dir: Path, outputs: list[str]) -> Path:
    """Write (or extend) the manifest atomically.

    Outputs from earlier commands are kept only when their input digests and
    config match; otherwise the drift is logged and they are dropped.
    """
    previous = read_manifest(out_dir)
    names = set(outputs)
    if previous is not None:
        same = previous.get("inputs") == digests and previous.get("config") == cfg.to_mapping()
        if same:
            names |= {n for n in previous.get("outputs", {}) if (out_dir / n).is_file()}
        else:
            log.warning("inputs or config changed since the previous manifest; earlier outputs not carried over")
    data = manifest_data(cfg, digests, out_dir, sorted(names))
    tmp = out_dir / (MANIFEST + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, out_dir / MANIFEST)
    return out_dir / MANIFEST


def check_drift(out_dir: Path) -> list[str]:
    """Names of stage tables whose content no longer matches the manifest."""
    man = read_manifest(out_dir)
    if man is None:
        return []
    return [
        name
        for name, digest in man.get("outputs", {}).items()
        if (out_dir / name).is_file() and sha256_file(out_dir / name) != digest
    ]


def render_report(out_dir: Path, highlight: tuple[int, int] | None = None, fmt: str = "svg") -> list[str]:
    """Draw every chart whose source table exists in ``out_dir``; returns file names written."""
    if highlight is None:
        man = read_manifest(out_dir)
        rep = (man or {}).get("config", {}).get("report", {})
        if rep.get("highlight_start") is not None:
            highlight = (int(rep["highlight_start"]), int(rep.get("highlight_len", 0)))
    for name in check_drift(out_dir):
        log.warning("%s differs from the manifest digest", name)

    written = []

    def need(*names: str) -> bool:
        missing = [n for n in names if not (out_dir / n).is_file()]
        for n in missing:
            log.warning("%s missing; skipping dependent chart", n)
        return not missing

    def emit(fig, stem: str) -> None:
        name = f"{stem}.{fmt}"
        plotting.save(fig, out_dir / name)
        written.append(name)

    weekdays = None
    if need("census.csv"):
        cen = tables.load_census(out_dir / "census.csv")
        weekdays = cen["weekday"]
        emit(plotting.distribution_bars(cen["distribution"], _bar_days(cen, highlight)), "motif_distribution")
        if need("change.csv"):
            ch = tables.load_change(out_dir / "change.csv")
            emit(plotting.distribution_change(ch["smoothed"], highlight), "distribution_change")
            emit(plotting.distribution_panels(ch["raw"], weekdays, ch["smoothed"], highlight), "distribution_panels")
    if need("persistence.csv"):
        pts = tables.load_persistence(out_dir / "persistence.csv")
        t_days = len(weekdays) if weekdays is not None else max((p["death"] for p in pts), default=0)
        emit(plotting.persistence_diagrams(pts, t_days), "persistence")
    if need("conversions.csv"):
        frac, _ = tables.load_conversions(out_dir / "conversions.csv")
        if weekdays is None:
            log.warning("census.csv missing; conversion chart needs weekdays, skipping")
        else:
            emit(plotting.conversion_trends(frac, weekdays[: len(frac)], highlight), "conversions")
    if need("attributes.csv"):
        att = tables.load_attributes(out_dir / "attributes.csv")
        emit(plotting.attribute_panels(att, "median of per-motif mean", highlight), "attributes")
    if need("attribute_change.csv"):
        ac = tables.load_attribute_change(out_dir / "attribute_change.csv")
        emit(plotting.attribute_panels(ac, "change vs. weekday baseline (%)", highlight), "attribute_change")
    if need("global.csv"):
        emit(plotting.global_panels(tables.load_global(out_dir / "global.csv"), highlight), "global")
    return written


def _bar_days(cen, highlight) -> tuple[int, ...]:
    """A steady day and, if a window is known, its second day with the same weekday spacing."""
    T = len(cen["day"])
    if highlight and highlight[1] and highlight[0] + 1 < T:
        hit = highlight[0] + 1
        return (max(hit - 7, 0), hit)
    return (0,)
