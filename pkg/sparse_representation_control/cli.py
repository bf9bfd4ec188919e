"""
Command line entry point: `sparse-control <command> [options]`.
"""
import argparse
import logging
import sys
from typing import Optional

from sparse_representation_control import __version__
from sparse_representation_control.config import load_config
from sparse_representation_control.experiment import (
    cmd_analyze,
    cmd_control,
    cmd_gen_data,
    cmd_sweep,
    cmd_train_rep,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="experiment config (YAML)")
    parser.add_argument("--seed", type=int, default=None, help="master seed")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--runs", type=int, default=None, help="independent control runs")
    parser.add_argument("--parallel", type=int, default=None, help="worker processes")
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-control",
        description="Sparse representations for incremental control.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", required=True)

    gen_data = subparsers.add_parser("gen-data", help="generate the pretraining dataset")
    _add_common_arguments(gen_data)

    train_rep = subparsers.add_parser("train-rep", help="pretrain the representation")
    _add_common_arguments(train_rep)
    train_rep.add_argument("--dataset", default=None, help="dataset file")
    train_rep.add_argument(
        "--resume", action="store_true", help="continue from the existing checkpoint"
    )

    control = subparsers.add_parser("control", help="Sarsa runs on the frozen representation")
    _add_common_arguments(control)
    control.add_argument("--checkpoint", default=None)

    analyze = subparsers.add_parser("analyze", help="sparsity and locality of a representation")
    _add_common_arguments(analyze)
    analyze.add_argument("--checkpoint", default=None)
    analyze.add_argument(
        "--heatmaps",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="unit heatmaps (default: on 2-d domains)",
    )

    sweep = subparsers.add_parser("sweep", help="hyperparameter sweep")
    _add_common_arguments(sweep)
    return parser


def config_from_args(args: argparse.Namespace):
    config = load_config(args.config)
    overrides = {
        f"experiment.{name}": getattr(args, name)
        for name in ("seed", "out", "runs", "parallel")
        if getattr(args, name) is not None
    }
    if overrides:
        config = config.with_overrides(overrides)
    return config


def run_command(args: argparse.Namespace):
    config = config_from_args(args)
    logger.info("Command %s, config hash %s", args.command, config.hash)
    if args.command == "gen-data":
        return cmd_gen_data(config)
    if args.command == "train-rep":
        return cmd_train_rep(config, dataset_file=args.dataset, resume=args.resume)
    if args.command == "control":
        return cmd_control(config, args.checkpoint)
    if args.command == "analyze":
        return cmd_analyze(config, args.checkpoint, heatmaps=args.heatmaps)
    if args.command == "sweep":
        return cmd_sweep(config)
    raise ValueError(f"Unknown command <<{args.command}>>.")


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)
    logging.captureWarnings(True)
    try:
        run_command(args)
    except (ValueError, TypeError, OSError, FloatingPointError, RuntimeError) as error:
        logger.error("%s failed: %s", args.command, error)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
