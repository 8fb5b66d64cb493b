"""Command line entry point."""

from __future__ import annotations

import argparse
import logging
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .pipeline import STAGES, InputError, Pipeline, load_inputs, render_report, write_inputs, write_manifest
from .synth import SynthConfigError

log = logging.getLogger("mobmotif")

EXIT_OK, EXIT_STAGE, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML run config (or the name of a bundled scenario)")
    common.add_argument("--out", metavar="DIR", default="out", help="output directory (default: out)")
    common.add_argument("--seed", type=int, metavar="N", help="override every seed in the config")
    common.add_argument("--threads", type=int, default=1, metavar="N", help="worker threads per stage")
    common.add_argument("--synth", action="store_true", help="use the [synth] generator instead of [ingest] files")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="mobmotif", description="Motif analysis of daily origin-destination mobility graphs.")
    p.add_argument("--version", action="version", version=f"mobmotif {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "run": "all stages, then the report",
        "synth": "write synthetic zones.csv and trips.csv",
        "census": "motif census and distribution change",
        "persist": "persistence intervals",
        "convert": "daily conversion matrices",
        "attr": "volume and distance per motif type",
        "global": "giant component, diameter, modularity, density",
        "report": "render charts from the CSVs in --out",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return p


def resolve_config(arg: str | None) -> RunConfig:
    if arg is None:
        return RunConfig()
    path = Path(arg)
    if path.is_file():
        return load_config(path)
    name = path.name if path.name.endswith(".toml") else path.name + ".toml"
    bundled = resources.files("mobmotif.scenarios").joinpath(name)
    if path.parent == Path(".") and bundled.is_file():
        return load_config(bundled)
    raise InputError(f"config file not found: {arg}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.threads < 1:
        print("mobmotif: error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    try:
        cfg = resolve_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        if args.command == "report":
            written = render_report(out, _highlight(cfg) if args.config else None, cfg.report.format)
            log.info("wrote %s", ", ".join(written))
            return EXIT_OK
        if args.command == "synth":
            paths = write_inputs(cfg, out)
            print(f"wrote {paths['zones']} and {paths['trips']}")
            return EXIT_OK
        inputs = load_inputs(cfg, args.synth)
    except (InputError, ConfigError, SynthConfigError, OSError) as exc:
        print(f"mobmotif: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    pipe = Pipeline(cfg, inputs, out, args.threads)
    stages = STAGES if args.command == "run" else (args.command,)
    status = EXIT_OK
    for stage in stages:
        try:
            pipe.run_stage(stage)
        except Exception as exc:  # a failed stage leaves its .partial files behind
            log.debug("stage failure", exc_info=True)
            print(f"mobmotif: stage {stage} failed: {exc}", file=sys.stderr)
            status = EXIT_STAGE
            break
    write_manifest(cfg, inputs.digests, out, pipe.writer.done)
    if status == EXIT_OK and args.command == "run" and cfg.report.enabled:
        try:
            render_report(out, _highlight(cfg), cfg.report.format)
        except Exception as exc:
            print(f"mobmotif: report failed: {exc}", file=sys.stderr)
            status = EXIT_STAGE
    return status


def _highlight(cfg: RunConfig) -> tuple[int, int] | None:
    if cfg.report.highlight_start is None:
        return None
    return cfg.report.highlight_start, cfg.report.highlight_len


if __name__ == "__main__":
    sys.exit(main())
