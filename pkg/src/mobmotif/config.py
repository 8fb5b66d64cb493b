"""Run configuration loaded from TOML."""

from __future__ import annotations

import dataclasses
import datetime as dt
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .census import DEFAULT_BASELINE_LEN, DEFAULT_MA_WINDOW, DEFAULT_SAMPLE_SIZE
from .ingest import DEFAULT_THRESHOLD
from .persistence import DEFAULT_POOL_SIZE
from .synth import SynthConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class IngestConfig:
    trips: str | None = None
    zones: str | None = None
    threshold: float = DEFAULT_THRESHOLD
    calendar_start: dt.date = dt.date(2017, 8, 1)
    t_days: int = 61


@dataclass(frozen=True)
class CensusConfig:
    sample_size: int = DEFAULT_SAMPLE_SIZE
    seed: int = 0
    baseline_start: int = 0
    baseline_len: int = DEFAULT_BASELINE_LEN
    ma_window: int = DEFAULT_MA_WINDOW


@dataclass(frozen=True)
class PersistenceConfig:
    persistence_pool_size: int = DEFAULT_POOL_SIZE
    persistence_seed: int = 1


@dataclass(frozen=True)
class ReportConfig:
    enabled: bool = True
    format: str = "svg"
    # perturbation window to shade on charts, [start, start+len)
    highlight_start: int | None = None
    highlight_len: int = 0


@dataclass(frozen=True)
class RunConfig:
    ingest: IngestConfig = field(default_factory=IngestConfig)
    census: CensusConfig = field(default_factory=CensusConfig)
    persistence: PersistenceConfig = field(default_factory=PersistenceConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)
    report: ReportConfig = field(default_factory=ReportConfig)
    source: str | None = None

    def to_mapping(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for name in ("ingest", "census", "persistence", "report"):
            sec = dataclasses.asdict(getattr(self, name))
            out[name] = {k: (v.isoformat() if isinstance(v, dt.date) else v) for k, v in sec.items()}
        out["synth"] = self.synth.to_mapping()
        return out

    def with_seed(self, seed: int) -> "RunConfig":
        """Override every seed from one master seed."""
        return dataclasses.replace(
            self,
            census=dataclasses.replace(self.census, seed=seed),
            persistence=dataclasses.replace(self.persistence, persistence_seed=seed + 1),
            synth=dataclasses.replace(self.synth, seed=seed),
        )


def _section(cls, data: Mapping[str, Any], name: str):
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"[{name}] unknown keys: {', '.join(sorted(unknown))}")
    kwargs = dict(data)
    if isinstance(kwargs.get("calendar_start"), str):
        kwargs["calendar_start"] = dt.date.fromisoformat(kwargs["calendar_start"])
    return cls(**kwargs)


def config_from_mapping(data: Mapping[str, Any], source: str | None = None) -> RunConfig:
    sections = {"ingest", "census", "persistence", "synth", "report"}
    unknown = set(data) - sections
    if unknown:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown))}")
    try:
        return RunConfig(
            ingest=_section(IngestConfig, data.get("ingest", {}), "ingest"),
            census=_section(CensusConfig, data.get("census", {}), "census"),
            persistence=_section(PersistenceConfig, data.get("persistence", {}), "persistence"),
            synth=SynthConfig.from_mapping(data.get("synth", {})),
            report=_section(ReportConfig, data.get("report", {}), "report"),
            source=source,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> RunConfig:
    """Load a TOML run config from a path (``str``, ``Path`` or package resource)."""
    with path.open("rb") if hasattr(path, "open") else open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    cfg = config_from_mapping(data, source=str(path))
    if cfg.ingest.trips and not Path(cfg.ingest.trips).is_absolute() and isinstance(path, (str, Path)):
        base = Path(path).parent
        cfg = dataclasses.replace(
            cfg,
            ingest=dataclasses.replace(
                cfg.ingest,
                trips=str(base / cfg.ingest.trips),
                zones=str(base / cfg.ingest.zones) if cfg.ingest.zones else None,
            ),
        )
    return cfg
