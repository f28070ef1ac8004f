"""Command-line entry point.

Usage:
    hyperarousal pipeline --config run.yaml --seed 7 --out run7
    hyperarousal explain --config run.yaml --plots

Exit status: 0 on success, 1 on a data error (or missing file), 2 on a
configuration error.
"""

import argparse
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

from hyperarousal.config import RunConfig, load_config
from hyperarousal.errors import ConfigError, DataError, HyperarousalError, StageError
from hyperarousal.logger import Logger
from hyperarousal.pipeline import STAGES, run_pipeline, run_stage
from hyperarousal.utils.performance_profiler import enable_timing_analysis

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_CONFIG_ERROR = 2

SUBCOMMANDS = [
    "synth",
    "preprocess",
    "features",
    "split",
    "train",
    "evaluate",
    "compare",
    "explain",
    "pipeline",
    "calibrate",
]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration (defaults when omitted)")
    common.add_argument("--seed", type=int, help="root seed, overrides the configuration")
    common.add_argument("--threads", type=int, help="worker threads; results do not depend on it")
    common.add_argument("--out", help="artifact directory, overrides paths.out")
    common.add_argument("--debug", action="store_true", help="enable debug logging")
    common.add_argument("--timing", action="store_true", help="log stage timings and memory")
    common.add_argument("--plots", action="store_true", help="render SHAP charts (explain, pipeline)")

    parser = argparse.ArgumentParser(
        prog="hyperarousal",
        description="Hyperarousal event detection from smartwatch heart rate and acceleration",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        subparsers.add_parser(name, parents=[common])
    return parser


def run_subcommand(name: str, config: RunConfig, plots: bool = False) -> int:
    """Run one subcommand and map failures to an exit status."""
    try:
        if name == "pipeline":
            run_pipeline(config, plots=plots)
        elif name in STAGES:
            run_stage(name, config, **({"plots": plots} if name == "explain" else {}))
        else:
            raise ConfigError(f"unknown subcommand {name!r}")
    except ConfigError as error:
        Logger.print_error(f"configuration error: {error}")
        return EXIT_CONFIG_ERROR
    except StageError as error:
        Logger.print_error(f"error: {error}")
        if isinstance(error.cause, ConfigError):
            return EXIT_CONFIG_ERROR
        return EXIT_DATA_ERROR
    except (DataError, OSError) as error:
        Logger.print_error(f"error: {error}")
        return EXIT_DATA_ERROR
    except HyperarousalError as error:
        Logger.print_error(f"{name} failed: {error}")
        return EXIT_DATA_ERROR
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    Logger.configure_from_env()
    args = build_parser().parse_args(argv)
    if args.debug:
        Logger.enable_debug()
        Logger.print_legend()
    if args.timing:
        enable_timing_analysis()

    overrides = {"seed": args.seed, "threads": args.threads, "out": args.out}
    try:
        config = load_config(args.config, overrides)
    except ConfigError as error:
        Logger.print_error(f"configuration error: {error}")
        return EXIT_CONFIG_ERROR
    except OSError as error:
        Logger.print_error(f"cannot read configuration {args.config}: {error}")
        return EXIT_DATA_ERROR
    Logger.print_debug(f"seed {config.seed}, artifacts in {config.out_dir}")
    return run_subcommand(args.command, config, plots=args.plots)


if __name__ == "__main__":
    sys.exit(main())
