"""
cli.py — Command-line entry point.

    python -m scdcnn run table2 --trials 200 --len 512,1024 --out table2.csv
    python -m scdcnn list

Exit codes: 0 success, 2 configuration error, 3 external data required,
4 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from scdcnn.core.config import settings
from scdcnn.core.errors import (
    ExperimentConfigError,
    ExternalDataRequiredError,
    FormatError,
    ParseError,
    ScdcnnError,
)
from scdcnn.core.models import ExperimentConfig
from scdcnn.harness.experiments import EXPERIMENTS
from scdcnn.harness.report import emit_report
from scdcnn.harness.runner import run_experiment
from scdcnn.utils.text import is_known_experiment, normalize_experiment_id, parse_int_list

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_EXTERNAL_DATA = 3
EXIT_IO = 4


def _int_list(text: str) -> list[int]:
    try:
        values = parse_int_list(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scdcnn", description="Stochastic-computing DCNN simulator and experiment harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run one experiment and emit its report")
    run.add_argument("experiment", help="Experiment id, e.g. table2 or fig9")
    run.add_argument("--trials", type=int, help="Monte Carlo trials (or images) per cell")
    run.add_argument("--seed", type=int, default=1, help="Run seed (default 1)")
    run.add_argument("--len", dest="lengths", type=_int_list, help="Stream lengths L, comma-separated")
    run.add_argument("--n", dest="inputs", type=_int_list, help="Input sizes N (candidate counts for table4, state counts for table5)")
    run.add_argument("--w", dest="precisions", type=_int_list, help="Weight precisions for fig10")
    run.add_argument("--c", dest="segment", type=int, help="Max-pooling segment length")
    run.add_argument("--weights", dest="weights_path", help="SCDW weight file")
    run.add_argument("--mnist", dest="mnist_dir", help="Directory holding the MNIST IDX files")
    run.add_argument("--out", dest="out_path", help="Report path (default: stdout)")
    run.add_argument("--format", choices=["csv", "json"], default="csv")
    run.add_argument("--quick", action="store_true", help="Scale trials down for a fast pass")

    sub.add_parser("list", help="List experiment ids")
    return parser


def _configure_logging() -> None:
    logging.basicConfig(
        level=getattr(logging, settings.SCDCNN_LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s  %(levelname)-8s  %(message)s",
        datefmt="%H:%M:%S",
        stream=sys.stderr,
    )


def _list() -> int:
    for exp in EXPERIMENTS.values():
        gate = {"none": "", "optional": "  [uses --weights/--mnist when given]", "required": "  [needs --weights and --mnist]"}[exp.external]
        print(f"{exp.id:<8} {exp.title}{gate}")
    return EXIT_OK


def _run(args: argparse.Namespace) -> int:
    experiment = normalize_experiment_id(args.experiment)
    if not is_known_experiment(experiment):
        logger.error("[RUN] unknown experiment %r; try `scdcnn list`", args.experiment)
        return EXIT_CONFIG
    try:
        cfg = ExperimentConfig(
            experiment=experiment,
            trials=args.trials,
            seed=args.seed,
            lengths=args.lengths,
            inputs=args.inputs,
            precisions=args.precisions,
            segment=args.segment,
            weights_path=args.weights_path,
            mnist_dir=args.mnist_dir,
            out_path=args.out_path,
            format=args.format,
            quick=args.quick,
        )
        report = run_experiment(cfg)
        text = emit_report(report, cfg.format, cfg.out_path)
    except (ValidationError, ExperimentConfigError) as exc:
        logger.error("[RUN] invalid configuration: %s", exc)
        return EXIT_CONFIG
    except ExternalDataRequiredError as exc:
        logger.error("[RUN] %s", exc)
        return EXIT_EXTERNAL_DATA
    except (OSError, ParseError, FormatError) as exc:
        logger.error("[RUN] %s", exc)
        return EXIT_IO
    except ScdcnnError as exc:
        logger.error("[RUN] %s", exc)
        return EXIT_CONFIG
    if cfg.out_path is None:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging()
    if args.command == "list":
        return _list()
    return _run(args)


__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_CONFIG", "EXIT_EXTERNAL_DATA", "EXIT_IO"]
