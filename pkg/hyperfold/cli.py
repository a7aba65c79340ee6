"""
Command-line front end:

    hyperfold <subcommand> (--config PATH | --scenario NAME) [--out DIR] [--threads N] [--verbose]
    hyperfold list

Exit status: 0 success, 1 invalid configuration, 2 audit failure.
"""

import argparse
import logging
import sys
from pathlib import Path

from hyperfold import __version__
from hyperfold.exceptions import ConfigError
from hyperfold.logging_config import setup_logging
from hyperfold.models.config_models import validate_config
from hyperfold.services.scenario_registry import scenario_registry
from hyperfold.services.sweep_service import EXIT_CONFIG, EXIT_OK, SUBCOMMANDS, run_subcommand

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperfold", description="Phase, kernel and oscillatory-bound audits on H^3.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="List the built-in scenarios")
    for name in SUBCOMMANDS:
        cmd = sub.add_parser(name, help=f"Run the {name} subcommand")
        source = cmd.add_mutually_exclusive_group(required=True)
        source.add_argument("--config", type=Path, help="Scenario config (JSON)")
        source.add_argument("--scenario", help="Built-in scenario name")
        cmd.add_argument("--out", type=Path, default=None, help="Output directory (default: config output_dir)")
        cmd.add_argument("--threads", type=int, default=1, help="Worker threads for sweeps")
        cmd.add_argument("--verbose", action="store_true", help="DEBUG logging")
    return parser


def _load_config(args):
    if args.scenario is not None:
        return scenario_registry.get(args.scenario)
    config, _ = validate_config(args.config.read_text(encoding="utf-8"))
    return config


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(getattr(args, "verbose", False))

    if args.command == "list":
        for name in scenario_registry.names():
            print(f"{name}: {scenario_registry.description(name)}")
        return EXIT_OK

    try:
        config = _load_config(args)
    except ConfigError as exc:
        for error in exc.errors:
            logger.error("config: %s", error)
        return EXIT_CONFIG
    except (OSError, KeyError) as exc:
        logger.error("Could not load configuration: %s", exc)
        return EXIT_CONFIG

    if args.threads < 1:
        logger.error("--threads must be at least 1, got %d", args.threads)
        return EXIT_CONFIG

    result = run_subcommand(args.command, config, args.out, args.threads)
    if result.message:
        print(result.message)
    for outcome in result.outcomes:
        if not outcome.passed:
            logger.error("Audit failed: %s measured %s (threshold %s) %s",
                         outcome.name, outcome.measured, outcome.threshold, outcome.details)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
