from __future__ import annotations

import time

import pytest

from mobmotif.cli import main

# (criterion, description, passed, detail) lines collected by test_acceptance.py
CRITERIA: list[tuple[str, str, bool, str]] = []


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


@pytest.fixture(scope="session")
def harvey_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("harvey")
    t0 = time.perf_counter()
    code = run_cli("run", "--config", "harvey-like.toml", "--synth", "--out", out, "--threads", 1)
    elapsed = time.perf_counter() - t0
    assert code == 0
    return out, elapsed


@pytest.fixture(scope="session")
def steady_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("steady")
    assert run_cli("run", "--config", "steady", "--synth", "--out", out, "--threads", 2) == 0
    return out


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for crit, desc, ok, detail in sorted(CRITERIA, key=lambda c: int(c[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {crit}: {desc}  [{detail}]")
