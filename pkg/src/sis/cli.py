"""Command line front end.

Subcommands cover the pipeline stages: ``jsa`` writes the amplitude
matrix, ``predict`` the exact tables, ``sample`` the sampled counts,
``report`` the full run, ``sweep`` a pump-phase sweep and ``verify``
the permanent-versus-expansion cross-check.  Exit codes: 0 on success,
1 on any configuration or usage problem (one diagnostic line on
stderr), 2 on an internal numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import scenario as sc

log = logging.getLogger("sis")

_LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


class CliError(Exception):
    """Validation problem; maps to exit code 1."""


class NumericalFailure(Exception):
    """Internal numerical problem; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract wants 1
        raise CliError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="sis", description="Spectral interference simulator")
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name, help_text in (
        ("jsa", "write the joint spectral amplitude matrix"),
        ("predict", "write exact quantum and classical tables"),
        ("sample", "draw detection events and write count tables"),
        ("report", "full pipeline: exact tables plus sampled counts"),
        ("sweep", "sweep one pump phase over a grid"),
        ("verify", "cross-check the permanent path against the expansion"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.error = parser.error  # type: ignore[method-assign]
        p.add_argument("--config", required=True, help="scenario config path or bundled name")
        p.add_argument("--out", default="./out", help="output directory (default ./out)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--shots", type=int, default=None, help="override the config shot count")
        p.add_argument("--exact", action="store_true", help="skip sampling")
        p.add_argument(
            "--format",
            choices=("csv", "json", "svg", "all"),
            default="all",
            help="artifact formats to write",
        )
        p.add_argument(
            "overrides",
            nargs="*",
            metavar="KEY=VALUE",
            help="dotted-path config overrides, e.g. detection.efficiencies.s2=0.5",
        )
    return parser


def _apply_override(doc: dict, dotted: str) -> None:
    if "=" not in dotted:
        raise CliError(f"override {dotted!r} is not of the form KEY=VALUE")
    path, raw = dotted.split("=", 1)
    keys = path.split(".")
    node = doc
    for i, key in enumerate(keys[:-1]):
        if isinstance(node, list):
            try:
                node = node[int(key)]
            except (ValueError, IndexError):
                raise CliError(f"override path {path!r} has no element {key!r}") from None
        elif isinstance(node, dict):
            if key not in node:
                raise CliError(f"override path {path!r} has no key {key!r}")
            node = node[key]
        else:
            raise CliError(f"override path {path!r} descends into a scalar at {key!r}")
    leaf = keys[-1]
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    if isinstance(node, list):
        try:
            node[int(leaf)] = value
        except (ValueError, IndexError):
            raise CliError(f"override path {path!r} has no element {leaf!r}") from None
    elif isinstance(node, dict):
        node[leaf] = value
    else:
        raise CliError(f"override path {path!r} does not reach a settable key")


def _load_config_doc(args) -> dict:
    ref = args.config
    path = Path(ref)
    if path.exists():
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise CliError(f"config {ref} is not valid JSON: {exc}") from None
    elif os.sep not in ref and ref in sc.bundled_config_names():
        doc = sc.load_bundled_config(ref)
    else:
        raise CliError(f"config file not found: {ref}")
    if not isinstance(doc, dict):
        raise CliError(f"config {ref} must contain a JSON object")
    for override in args.overrides:
        _apply_override(doc, override)
    return doc


def _scenario_config(args) -> sc.ScenarioConfig:
    doc = _load_config_doc(args)
    if "phase_grid" in doc:
        raise CliError(f"config {args.config} is a sweep spec; use the sweep command")
    try:
        cfg = sc.ScenarioConfig.from_dict(doc)
    except (ValueError, TypeError) as exc:
        raise CliError(f"config {args.config}: {exc}") from None
    return _with_cli_overrides(cfg, args)


def _with_cli_overrides(cfg: sc.ScenarioConfig, args) -> sc.ScenarioConfig:
    from dataclasses import replace

    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.shots is not None:
        if args.shots < 1:
            raise CliError(f"--shots must be positive, got {args.shots}")
        cfg = replace(cfg, shots=args.shots)
    return cfg


def _sweep_spec(args) -> sc.SweepSpec:
    doc = _load_config_doc(args)
    if "phase_grid" not in doc:
        raise CliError(f"config {args.config} is not a sweep spec (missing phase_grid)")
    try:
        spec = sc.SweepSpec.from_dict(doc)
    except (ValueError, TypeError) as exc:
        raise CliError(f"config {args.config}: {exc}") from None
    base = _with_cli_overrides(spec.base, args)
    from dataclasses import replace

    return replace(spec, base=base)


def _formats(args) -> tuple[str, ...]:
    return (args.format,)


def _cmd_jsa(args) -> int:
    cfg = _scenario_config(args)
    from .jsa import build_jsa

    jsa = build_jsa(cfg.pump_spectrum(), cfg.grid)
    meta = {"config_hash": cfg.config_hash(), "seed": cfg.seed}
    files: dict[str, bytes] = {}
    want = {"csv", "json"} if args.format == "all" else {args.format}
    echo = dict(cfg.to_dict())
    echo["config_hash"] = cfg.config_hash()
    files["config.json"] = (json.dumps(echo, sort_keys=True, indent=2) + "\n").encode()
    if "json" in want:
        files["jsa.json"] = jsa.to_json_text(meta).encode()
    if "csv" in want or "svg" in want:
        files["jsa.csv"] = jsa.to_csv_text(meta).encode()
    sc.publish_artifacts(files, args.out)
    log.info("wrote %d artifact(s) to %s", len(files), args.out)
    return 0


def _cmd_scenario(args, sample: bool, include_comparison: bool = True) -> int:
    cfg = _scenario_config(args)
    result = sc.run_scenario(cfg, sample=sample and not args.exact)
    files = sc.render_artifacts(result, _formats(args), include_comparison=include_comparison)
    sc.publish_artifacts(files, args.out)
    log.info("wrote %d artifact(s) to %s", len(files), args.out)
    return 0


def _cmd_sweep(args) -> int:
    spec = _sweep_spec(args)
    result = sc.phase_sweep(spec, sample=bool(args.shots) and not args.exact)
    files = sc.render_sweep_artifacts(result, _formats(args))
    sc.publish_artifacts(files, args.out)
    log.info("wrote %d artifact(s) to %s", len(files), args.out)
    return 0


def _cmd_verify(args) -> int:
    cfg = _scenario_config(args)
    try:
        report = sc.verify_oracle(cfg)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    print(f"max relative deviation: {report.max_relative_deviation:.3e} over {report.n_patterns} patterns")
    if not report.passed:
        raise NumericalFailure(
            f"permanent path deviates from the expansion by {report.max_relative_deviation:.3e} "
            f"(tolerance {report.tolerance:.1e})"
        )
    doc = {
        "max_relative_deviation": report.max_relative_deviation,
        "n_patterns": report.n_patterns,
        "tolerance": report.tolerance,
        "passed": True,
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
    }
    sc.publish_artifacts(
        {"verify.json": (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode()}, args.out
    )
    return 0


def _configure_logging() -> None:
    level_name = os.environ.get("SIS_LOG_LEVEL", "info").lower()
    if level_name not in _LOG_LEVELS:
        raise CliError(
            f"SIS_LOG_LEVEL must be one of {sorted(_LOG_LEVELS)}, got {level_name!r}"
        )
    logging.basicConfig(stream=sys.stderr, level=_LOG_LEVELS[level_name], format="%(message)s")


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        _configure_logging()
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help
            return int(exc.code or 0)
        if args.command is None:
            raise CliError("a subcommand is required (jsa, predict, sample, report, sweep, verify)")
        if args.command == "jsa":
            return _cmd_jsa(args)
        if args.command == "predict":
            return _cmd_scenario(args, sample=False)
        if args.command == "sample":
            return _cmd_scenario(args, sample=True, include_comparison=False)
        if args.command == "report":
            return _cmd_scenario(args, sample=True)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "verify":
            return _cmd_verify(args)
        raise CliError(f"unknown command {args.command!r}")
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
