"""Synthetic gravity-model O-D trips with weekday modulation and a perturbation window."""

from __future__ import annotations

import dataclasses
import datetime as dt
from dataclasses import dataclass
from importlib import resources
from typing import Any, Mapping

import numpy as np

from .attributes import distance_matrix
from .ingest import TripTable, Zone

KM_PER_DEG_LAT = 111.19508


class SynthConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SynthConfig:
    n_zones: int = 120
    t_days: int = 61
    calendar_start: dt.date = dt.date(2017, 8, 1)
    area_km: float = 40.0
    center_lat: float = 29.76
    center_lon: float = -95.37
    pop_log_mean: float = 0.0
    pop_log_sigma: float = 0.5
    gravity_beta: float = 2.0
    min_distance_km: float = 1.0
    volume_scale: float = 2000.0
    commute_mix: float = 0.0
    home_share: float = 0.5
    weekend_factor: float = 0.8
    perturb_start: int = 24
    perturb_len: int = 0
    perturb_severity: float = 0.0
    perturb_distance_bias: float = 0.0
    pre_event_boost: float = 1.0
    seed: int = 0

    def __post_init__(self):
        problems = []
        if self.n_zones < 4:
            problems.append("n_zones must be at least 4")
        if self.t_days < 1:
            problems.append("t_days must be positive")
        if not self.area_km > 0:
            problems.append("area_km must be positive")
        if not self.pop_log_sigma >= 0:
            problems.append("pop_log_sigma must be non-negative")
        if not self.gravity_beta >= 0:
            problems.append("gravity_beta must be non-negative")
        if not self.min_distance_km > 0:
            problems.append("min_distance_km must be positive")
        if not self.volume_scale > 0:
            problems.append("volume_scale must be positive")
        if not 0 <= self.commute_mix < 1:
            problems.append("commute_mix must lie in [0, 1)")
        if not 0 <= self.home_share <= 1:
            problems.append("home_share must lie in [0, 1]")
        if not 0 < self.weekend_factor <= 1:
            problems.append("weekend_factor must lie in (0, 1]")
        if self.perturb_len < 0:
            problems.append("perturb_len must be non-negative")
        if self.perturb_len and not (0 <= self.perturb_start and self.perturb_start + self.perturb_len <= self.t_days):
            problems.append("perturbation window must lie within 0..t_days-1")
        if not 0 <= self.perturb_severity < 1:
            problems.append("perturb_severity must lie in [0, 1)")
        if not self.perturb_distance_bias >= 0:
            problems.append("perturb_distance_bias must be non-negative")
        if not self.pre_event_boost >= 1:
            problems.append("pre_event_boost must be >= 1")
        if problems:
            raise SynthConfigError("; ".join(problems))

    @property
    def window(self) -> range:
        return range(self.perturb_start, self.perturb_start + self.perturb_len)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "SynthConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = set(data) - set(known)
        if unknown:
            raise SynthConfigError(f"unknown synth keys: {', '.join(sorted(unknown))}")
        kwargs = dict(data)
        if isinstance(kwargs.get("calendar_start"), str):
            kwargs["calendar_start"] = dt.date.fromisoformat(kwargs["calendar_start"])
        return cls(**kwargs)

    def to_mapping(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out["calendar_start"] = self.calendar_start.isoformat()
        return out


@dataclass(frozen=True, eq=False)
class SynthScenario:
    config: SynthConfig
    zones: tuple[Zone, ...]
    trips: TripTable
    populations: np.ndarray
    is_home: np.ndarray  # zone kind used by the commute mix
    mean_volume: np.ndarray  # baseline directional means, (n, n)
    distances: np.ndarray


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


def place_zones(cfg: SynthConfig) -> tuple[list[Zone], np.ndarray]:
    rng = _stream(cfg.seed, 0)
    xy = rng.uniform(0.0, cfg.area_km, size=(cfg.n_zones, 2)) - cfg.area_km / 2
    pops = rng.lognormal(cfg.pop_log_mean, cfg.pop_log_sigma, size=cfg.n_zones)
    lat = cfg.center_lat + xy[:, 1] / KM_PER_DEG_LAT
    lon = cfg.center_lon + xy[:, 0] / (KM_PER_DEG_LAT * np.cos(np.radians(cfg.center_lat)))
    zones = [Zone(i, float(lat[i]), float(lon[i]), f"z{i:03d}") for i in range(cfg.n_zones)]
    return zones, pops


def commute_factor(cfg: SynthConfig) -> tuple[np.ndarray, np.ndarray]:
    """Zone kinds and the pair multiplier ``1 + c`` (home-work) or ``1 - c`` (same kind)."""
    is_home = _stream(cfg.seed, 2).random(cfg.n_zones) < cfg.home_share
    cross = is_home[:, None] != is_home[None, :]
    return is_home, np.where(cross, 1.0 + cfg.commute_mix, 1.0 - cfg.commute_mix)


def day_factor(cfg: SynthConfig, day: int, distances: np.ndarray) -> np.ndarray | float:
    """Multiplier on the baseline mean volume for ``day``."""
    weekday = (cfg.calendar_start + dt.timedelta(days=day)).weekday()
    f: np.ndarray | float = cfg.weekend_factor if weekday >= 5 else 1.0
    if day in cfg.window:
        f = f * (1.0 - cfg.perturb_severity) * np.exp(-cfg.perturb_distance_bias * distances)
    if cfg.perturb_len and day == cfg.perturb_start - 1:
        f = f * cfg.pre_event_boost
    return f


def generate(cfg: SynthConfig) -> SynthScenario:
    """Draw daily directional trip counts.

    Baseline mean: ``volume_scale * p_u * p_v / d(u, v) ** beta``, optionally
    tilted towards home-work pairs by ``commute_mix``. Each day's
    counts are Poisson around the baseline times the weekday/perturbation
    factor, from a random stream keyed by (seed, day).
    """
    zones, pops = place_zones(cfg)
    coords = np.array([[z.centroid_lat, z.centroid_lon] for z in zones])
    D = distance_matrix(coords)
    mu = cfg.volume_scale * np.outer(pops, pops) / np.maximum(D, cfg.min_distance_km) ** cfg.gravity_beta
    is_home, tilt = commute_factor(cfg)
    if cfg.commute_mix:
        mu = mu * tilt
    np.fill_diagonal(mu, 0.0)

    n = cfg.n_zones
    off = ~np.eye(n, dtype=bool)
    origin, dest = np.nonzero(off)
    cols: list[list[np.ndarray]] = [[], [], [], []]
    for t in range(cfg.t_days):
        lam = mu * day_factor(cfg, t, D)
        counts = _stream(cfg.seed, 1, t).poisson(lam[off])
        keep = counts > 0
        cols[0].append(origin[keep])
        cols[1].append(dest[keep])
        cols[2].append(np.full(int(keep.sum()), t, dtype=np.int64))
        cols[3].append(counts[keep].astype(np.float64))
    trips = TripTable(*(np.concatenate(c) if c else np.empty(0) for c in cols))
    return SynthScenario(cfg, tuple(zones), trips, pops, is_home, mu, D)


def bundled_scenarios() -> dict[str, SynthConfig]:
    """Named generator configs shipped with the package."""
    from .config import load_config

    out = {}
    for entry in sorted(resources.files("mobmotif.scenarios").iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".toml"):
            out[entry.name[: -len(".toml")]] = load_config(entry).synth
    return out
