import json
import logging
import subprocess
import sys

import pytest

from conftest import run_cli
from mobmotif import tables
from mobmotif.pipeline import STAGE_OUTPUTS, sha256_file

CSVS = sorted(n for names in STAGE_OUTPUTS.values() for n in names)


@pytest.fixture(scope="module")
def tiny(tmp_path_factory):
    out = tmp_path_factory.mktemp("tiny")
    assert run_cli("run", "--config", "tiny-oracle", "--synth", "--out", out) == 0
    return out


def test_full_output_set(tiny):
    names = {p.name for p in tiny.iterdir()}
    assert set(CSVS) <= names
    assert "manifest.json" in names
    assert {"distribution_change.svg", "persistence.svg", "conversions.svg", "global.svg"} <= names
    assert not [n for n in names if n.endswith(".partial")]


def test_manifest_contents(tiny):
    man = json.loads((tiny / "manifest.json").read_text())
    assert set(man["outputs"]) == set(CSVS)
    for name, digest in man["outputs"].items():
        assert sha256_file(tiny / name) == digest
    assert man["seeds"] == {"census": 0, "persistence": 1, "synth": 0}
    assert man["inputs"]["trips"].startswith("synth:")
    assert man["config"]["synth"]["n_zones"] == 12
    assert "mobmotif" in man["versions"]


def test_rerun_byte_identical(tiny, tmp_path):
    assert run_cli("run", "--config", "tiny-oracle", "--synth", "--out", tmp_path, "--threads", 3) == 0
    for name in CSVS + ["manifest.json", "conversions.svg"]:
        assert (tmp_path / name).read_bytes() == (tiny / name).read_bytes(), name


def test_seed_override(tmp_path):
    assert run_cli("census", "--config", "tiny-oracle", "--synth", "--seed", 5, "--out", tmp_path) == 0
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["seeds"] == {"census": 5, "persistence": 6, "synth": 5}


def test_missing_trips_file(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text('[ingest]\ntrips = "nope.csv"\nzones = "zones.csv"\n')
    (tmp_path / "zones.csv").write_text("id,lat,lon,label\n0,1,1,a\n")
    assert run_cli("run", "--config", cfg, "--out", tmp_path / "o") == 2
    assert "nope.csv" in capsys.readouterr().err


def test_no_trips_configured(tmp_path, capsys):
    assert run_cli("census", "--out", tmp_path) == 2
    assert "--synth" in capsys.readouterr().err


def test_usage_errors(tmp_path, capsys):
    assert run_cli("run", "--config", tmp_path / "absent.toml") == 2
    with pytest.raises(SystemExit) as err:
        run_cli("frobnicate")
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        run_cli("run", "--threads", "many")
    assert err.value.code == 2
    assert run_cli("run", "--synth", "--threads", 0, "--out", tmp_path) == 2


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text("[census]\nsample = 3\n")
    assert run_cli("run", "--config", cfg, "--synth", "--out", tmp_path) == 2
    assert "sample" in capsys.readouterr().err


def test_synth_files_feed_ingest(tiny, tmp_path):
    assert run_cli("synth", "--config", "tiny-oracle", "--out", tmp_path) == 0
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        '[ingest]\ntrips = "trips.csv"\nzones = "zones.csv"\nt_days = 21\ncalendar_start = "2017-08-01"\n'
        "[census]\nsample_size = 495\n[persistence]\npersistence_pool_size = 495\n"
    )
    out = tmp_path / "o"
    assert run_cli("run", "--config", cfg, "--out", out) == 0
    for name in CSVS:
        assert (out / name).read_bytes() == (tiny / name).read_bytes(), name
    man = json.loads((out / "manifest.json").read_text())
    assert man["inputs"]["trips"] == sha256_file(tmp_path / "trips.csv")


def test_stage_failure_keeps_partial(tmp_path, monkeypatch, capsys):
    def broken(metrics):
        yield [0, 1, 0, 0.0, 0.0, 0.0]
        raise RuntimeError("boom")

    monkeypatch.setattr(tables, "global_rows", broken)
    assert run_cli("run", "--config", "tiny-oracle", "--synth", "--out", tmp_path) == 1
    assert (tmp_path / "global.csv.partial").exists()
    assert not (tmp_path / "global.csv").exists()
    assert (tmp_path / "census.csv").exists()
    assert "boom" in capsys.readouterr().err
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert "global.csv" not in man["outputs"]


def test_stages_accumulate_in_manifest(tmp_path):
    for stage in ("census", "global"):
        assert run_cli(stage, "--config", "tiny-oracle", "--synth", "--out", tmp_path) == 0
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert set(man["outputs"]) == {"census.csv", "change.csv", "global.csv"}


def test_manifest_drops_outputs_on_input_change(tmp_path, caplog):
    assert run_cli("census", "--config", "tiny-oracle", "--synth", "--out", tmp_path) == 0
    with caplog.at_level(logging.WARNING):
        assert run_cli("global", "--config", "tiny-oracle", "--synth", "--seed", 9, "--out", tmp_path) == 0
    assert "changed" in caplog.text
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert set(man["outputs"]) == {"global.csv"}


def test_report_skips_missing(tmp_path, caplog):
    assert run_cli("census", "--config", "tiny-oracle", "--synth", "--out", tmp_path) == 0
    with caplog.at_level(logging.WARNING):
        assert run_cli("report", "--out", tmp_path) == 0
    assert (tmp_path / "distribution_change.svg").exists()
    assert not (tmp_path / "persistence.svg").exists()
    assert "persistence.csv missing" in caplog.text


def test_report_warns_on_drift(tiny, tmp_path, caplog):
    for name in CSVS + ["manifest.json"]:
        (tmp_path / name).write_bytes((tiny / name).read_bytes())
    with open(tmp_path / "global.csv", "a") as fh:
        fh.write("\n")
    with caplog.at_level(logging.WARNING):
        assert run_cli("report", "--out", tmp_path) == 0
    assert "global.csv differs" in caplog.text


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "mobmotif", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "mobmotif" in r.stdout
