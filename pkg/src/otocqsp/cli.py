"""Command-line entry point.

Subcommands: phase-map, moments, haar, theorem-check, filter-demo.  Every
subcommand reads a JSON config (--config), writes CSV/JSON artifacts into an
output directory, and exits 0 on success/PASS, 2 on validation failure, 3 on
numerical failure.  Output directory precedence: --out, then the
OTOCQSP_OUT_DIR environment variable, then the config's outputDir.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .errors import (
    BadPhaseCount,
    ConfigError,
    EqualSites,
    InvalidOrder,
    MissingDisorder,
    NonHermitianInput,
    NotUnitary,
    NumericalFailure,
    OddOrder,
    SiteOutOfRange,
    SynthesisFailed,
    UnknownFamily,
    WrongFamily,
)
from . import experiments

OUT_DIR_ENV = "OTOCQSP_OUT_DIR"

VALIDATION_ERRORS = (
    ConfigError,
    UnknownFamily,
    WrongFamily,
    MissingDisorder,
    SiteOutOfRange,
    EqualSites,
    OddOrder,
    InvalidOrder,
    BadPhaseCount,
    ValueError,
)
NUMERICAL_ERRORS = (NumericalFailure, NotUnitary, NonHermitianInput, SynthesisFailed)

COMMANDS = ("phase-map", "moments", "haar", "theorem-check", "filter-demo")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otocqsp",
        description="Truncated-propagator spectra, Chebyshev moments, and QSP filter experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON experiment config")
        p.add_argument("--out", default=None, help="output directory (overrides config/env)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    return parser


def _resolve_out_dir(args, raw_cfg: dict) -> str:
    if args.out is not None:
        return args.out
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        return env
    return str(raw_cfg.get("outputDir", "out"))


def _experiment_config(args, raw_cfg: dict) -> experiments.ExperimentConfig:
    cfg = experiments.parse_experiment_config(raw_cfg)
    cfg = replace(cfg, output_dir=_resolve_out_dir(args, raw_cfg))
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _dispatch(args) -> int:
    raw_cfg = experiments.load_json(args.config)
    out_dir = _resolve_out_dir(args, raw_cfg)

    if args.command == "phase-map":
        cfg = _experiment_config(args, raw_cfg)
        experiments.run_phase_map(cfg, threads=args.threads)
        print(f"phase-map: wrote {cfg.output_dir}/phase_map.csv")
        return 0

    if args.command == "moments":
        cfg = _experiment_config(args, raw_cfg)
        experiments.run_moment_sweep(cfg, threads=args.threads)
        print(f"moments: wrote {cfg.output_dir}/moments.csv")
        return 0

    if args.command == "haar":
        params = experiments.parse_haar_config(raw_cfg)
        if args.seed is not None:
            params["seed"] = args.seed
        report = experiments.run_haar_baseline(
            params["num_sites"],
            params["samples"],
            params["seed"],
            orders=params["orders"],
            pair=params["pair"],
            out_dir=out_dir,
        )
        print(
            f"haar: KS distance {report['ksDistance']:.4e} "
            f"(1% critical {report['ksCriticalValue1pct']:.4e}); wrote {out_dir}/haar_report.json"
        )
        return 0

    if args.command == "theorem-check":
        params = experiments.parse_theorem_config(raw_cfg)
        if args.seed is not None:
            params["seed"] = args.seed
        report = experiments.run_theorem_check(
            params["num_sites"], params["trials"], params["k_max"], params["seed"], out_dir=out_dir
        )
        verdict = "PASS" if report["pass"] else "FAIL"
        print(
            f"theorem-check: {verdict} (max residual {report['maxResidual']:.3e}, "
            f"tolerance {report['tolerance']:.0e}); wrote {out_dir}/theorem_report.json"
        )
        return 0 if report["pass"] else 2

    if args.command == "filter-demo":
        cfg = _experiment_config(args, raw_cfg)
        filter_spec, phases = experiments.parse_filter_config(raw_cfg)
        experiments.run_filter_demo(cfg, filter_spec=filter_spec, phases=phases, threads=args.threads)
        print(f"filter-demo: wrote {cfg.output_dir}/filter_series.csv")
        return 0

    raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
