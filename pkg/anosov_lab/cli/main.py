#!/usr/bin/env python3
"""
Command-line interface of anosov-lab

    anosov-lab <command> --config FILE [--fixture NAME] [--threads N] [--out DIR] [--list] [--verbose]
"""

import argparse
import hashlib
import json
import logging
import sqlite3
import sys
from dataclasses import dataclass, field
from functools import wraps
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from anosov_lab.cli import commands
from anosov_lab.cli.reporter import LabReporter
from anosov_lab.cli.suites import SUITE_DESCRIPTIONS, cmd_verify
from anosov_lab.configs.base import resolve
from anosov_lab.configs.run import COMMANDS, SUITES, RunConfig
from anosov_lab.exceptions import AnosovLabError, ConfigurationError
from anosov_lab.fixtures import list_fixtures, load_fixture
from anosov_lab.storage import RunHistory
from anosov_lab.utils.setup import ensure_lab_dir

logger = logging.getLogger(__name__)

COMMAND_HANDLERS: Dict[str, commands.Command] = {
    "spectrum": commands.cmd_spectrum,
    "exponent": commands.cmd_exponent,
    "intersect": commands.cmd_intersect,
    "pressure": commands.cmd_pressure,
    "dimension": commands.cmd_dimension,
    "limitset": commands.cmd_limitset,
    "verify": cmd_verify,
}

COMMAND_DESCRIPTIONS = {
    "spectrum": "Period table of primitive classes as CSV",
    "exponent": "Critical exponents by orbit growth and by the Dirichlet series",
    "intersect": "Dynamical and renormalized intersection of two representations",
    "pressure": "Pressure form, its components and the master identity on a parameter grid",
    "dimension": "Bowen dimension, critical exponent and box dimension of the limit set",
    "limitset": "Limit set sample as CSV and optional PPM raster",
    "verify": "Run a verification suite (see --list)",
}


def cli_error_handler(func):
    """Map exceptions raised by a command to the CLI exit codes (2 config, 3 numeric, 4 verification)."""

    @wraps(func)
    def wrapper(*args, **kwargs) -> int:
        try:
            return func(*args, **kwargs)
        except AnosovLabError as e:
            logger.error(f"{type(e).__name__}: {e}")
            print(f"{type(e).__name__}: {e}", file=sys.stderr)
            return e.exit_code
        except ValidationError as e:
            logger.error(f"Invalid run configuration: {e}")
            print(f"Invalid run configuration: {e}", file=sys.stderr)
            return ConfigurationError.exit_code
        except (ValueError, OSError) as e:
            logger.error(f"Configuration or input error: {e}")
            print(f"Configuration or input error: {e}", file=sys.stderr)
            return ConfigurationError.exit_code

    return wrapper


@dataclass
class RunRecord:
    command: str = ""
    config_digest: str = ""
    outputs: List[str] = field(default_factory=list)


def config_digest(run: RunConfig) -> str:
    payload = {"command": run.command, **commands.settings_echo(run)}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()


class LabCLI:
    """Command-line interface of the lab"""

    def __init__(self):
        self.reporter = LabReporter()

    def create_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="anosov-lab",
            description="Numerical lab for Anosov representations of free groups",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog="""
Examples:
  anosov-lab spectrum --fixture schottky_symmetric --out results/
  anosov-lab exponent --config run.json --threads 4
  anosov-lab verify --fixture bending --suite identities
  anosov-lab verify --list
            """,
        )
        parser.add_argument("command", nargs="?", choices=COMMANDS, help="Command to run")
        parser.add_argument("--config", help="Run configuration JSON file")
        parser.add_argument("--fixture", help="Bundled fixture seeding the configuration")
        parser.add_argument("--threads", type=int, help="Worker threads (overrides config and ANOSOV_LAB_THREADS)")
        parser.add_argument("--out", help="Output directory (overrides config)")
        parser.add_argument("--suite", choices=SUITES, help="Verification suite for the verify command")
        parser.add_argument("--list", action="store_true", help="List commands, suites and fixtures")
        parser.add_argument("--no-history", action="store_true", help="Do not record the run in the history database")
        parser.add_argument("--verbose", action="store_true", help="Enable debug logging")
        return parser

    def list_inventory(self, command: Optional[str] = None):
        if command != "verify":
            self.reporter.print_inventory("Commands", COMMAND_DESCRIPTIONS)
        self.reporter.print_inventory("Verification suites", SUITE_DESCRIPTIONS)
        if command != "verify":
            self.reporter.print_inventory("Fixtures", {name: "" for name in list_fixtures()})

    def load_run_config(self, args: argparse.Namespace) -> RunConfig:
        """Fixture keys first, then the config file, then command-line overrides."""
        raw: Dict[str, Any] = {}
        if args.config:
            try:
                with open(args.config, "r") as f:
                    raw = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                logger.error(f"Failed to read config file {args.config}: {e}")
                raise ConfigurationError(f"Cannot read config file {args.config}: {e}")
            if not isinstance(raw, dict):
                raise ConfigurationError(f"Config file {args.config} must hold a JSON object")

        fixture = args.fixture or raw.get("fixture")
        merged = {**load_fixture(fixture), **raw} if fixture else dict(raw)
        if fixture:
            merged["fixture"] = fixture
        if args.command:
            merged["command"] = args.command
        if args.threads is not None:
            merged["threads"] = args.threads
        if args.out:
            merged["out_dir"] = args.out
        if args.suite:
            merged["suite"] = args.suite
        run = RunConfig(**merged)
        if run.command is None:
            raise ConfigurationError(f"No command given: one of {', '.join(COMMANDS)}")
        return run

    @cli_error_handler
    def execute(self, args: argparse.Namespace, record: RunRecord) -> int:
        run = self.load_run_config(args)
        record.command = run.command
        record.config_digest = config_digest(run)
        lab = run.lab_config()
        logger.info(f"Running {run.command} (config digest {record.config_digest[:12]})")
        record.outputs = COMMAND_HANDLERS[run.command](run, lab, run.threads)
        for path in record.outputs:
            print(path)
        return 0

    def record_history(self, record: RunRecord, exit_code: int):
        try:
            ensure_lab_dir()
            history = RunHistory(resolve(None).history_db_path)
            history.add_run(record.command, record.config_digest, record.outputs, exit_code)
            history.close()
        except (sqlite3.Error, OSError) as e:
            logger.warning(f"Run history not recorded: {e}")

    def main(self, argv: Optional[List[str]] = None) -> int:
        parser = self.create_parser()
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else logging.WARNING,
            format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
        )

        if args.list:
            self.list_inventory(args.command)
            return 0

        record = RunRecord(command=args.command or "")
        try:
            exit_code = self.execute(args, record)
        except KeyboardInterrupt:
            print("\nInterrupted", file=sys.stderr)
            return 1
        if not args.no_history:
            self.record_history(record, exit_code)
        return exit_code


def main():
    """CLI entry point"""
    cli = LabCLI()
    sys.exit(cli.main())


if __name__ == "__main__":
    main()
