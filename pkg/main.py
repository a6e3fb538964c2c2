#!/usr/bin/env python3
"""
Clifford short-time Fourier transform toolkit - command-line entry point.

This module is the orchestrator of the toolkit. Its responsibilities:
- Parsing the subcommand and the flags shared by every subcommand
- Loading the configuration in layers with Pydantic validation:
  defaults < app/config/config.yaml < --config FILE < .env / environment < flags
- Configuring logging and the process-wide memo cache from the validated AppConfig
- Dispatching to the registered subcommand inside the global error handler

Subcommands: kernel-table, transform, spectrogram, verify.
"""

import argparse
import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, List, Optional

import pydantic
import yaml
from dotenv import load_dotenv

from app.cli import register_all_commands, report_config_error, run_command
from app.config.config_model import (
    FLAT_KEYS, AppConfig, RuntimeSettings, apply_runtime_settings, load_config_from_yaml, merge_config,
)
from app.core.cache_manager import configure_cache

APP_ROOT = Path(__file__).parent.absolute()
DEFAULT_CONFIG_PATH = APP_ROOT / "app" / "config" / "config.yaml"


def setup_logging(config: AppConfig) -> None:
    """
    Configure logging based on the AppConfig Pydantic model.

    Args:
        config: Validated AppConfig object with type-safe attribute access
    """
    logging_config = config.logging
    log_level = getattr(logging, logging_config.level.upper(), logging.INFO)
    formatter = logging.Formatter(logging_config.format, datefmt=logging_config.date_format)

    handlers: List[logging.Handler] = []

    # File handler with rotation
    log_file_path = logging_config.log_file_path
    if log_file_path:
        Path(log_file_path).parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_file_path,
            maxBytes=logging_config.max_file_size_mb * 1024 * 1024,
            backupCount=logging_config.backup_count,
            encoding='utf-8',
        )
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    # Console handler; stderr keeps stdout for command output
    if logging_config.console_output:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        handlers.append(console_handler)

    logging.basicConfig(level=log_level, handlers=handlers, force=True)

    for component, level in logging_config.component_levels.items():
        logging.getLogger(component).setLevel(getattr(logging, level.upper(), log_level))


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subparser per registered command and the shared flags."""
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("configuration")
    group.add_argument("--config", metavar="FILE", help="YAML file with nested sections or flat keys")
    group.add_argument("--dim", type=int, help="even dimension d >= 2")
    group.add_argument("--window-sigma", type=float, help="Gaussian window scale")
    group.add_argument("--signal", help="signal selector, e.g. 'gaussian + psi(odd,0,0,1)*e{1,2}'")
    group.add_argument("--grid-scheme", choices=("hermite", "trapezoid"), help="transform and STFT grid scheme")
    group.add_argument("--grid-n", type=int, help="nodes per axis of the transform and STFT grids")
    group.add_argument("--grid-radius", type=float, help="box half-width of trapezoid grids")
    group.add_argument("--qmc-count", type=int, help="quasi-random sample count (rounded up to a power of two)")
    group.add_argument("--qmc-seed", type=int, help="quasi-random scrambling seed")
    group.add_argument("--out", help="artifact path")
    group.add_argument("--format", choices=("csv", "json-lines"), help="artifact format")
    group.add_argument("--tol", type=float, help="override every assertion tolerance")
    group.add_argument("--workers", type=int, help="threads partitioning evaluation points")
    group.add_argument("--log-level", help="global log level")

    parser = argparse.ArgumentParser(
        prog="cstft",
        description="Clifford short-time Fourier transform for even dimensions",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    register_all_commands(subparsers, [common])
    return parser


def flag_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Flat configuration keys set on the command line."""
    return {key: getattr(args, key) for key in FLAT_KEYS if getattr(args, key, None) is not None}


def load_configuration(args: argparse.Namespace) -> AppConfig:
    """
    Load and validate the layered configuration.

    Returns:
        AppConfig instance containing the validated configuration

    Raises:
        SystemExit: With status 2 if any layer fails to load or validate
    """
    load_dotenv()
    source = "defaults"
    try:
        config = AppConfig()
        if DEFAULT_CONFIG_PATH.exists():
            source = str(DEFAULT_CONFIG_PATH)
            config = load_config_from_yaml(source, config)
            logging.info(f"Loaded configuration from: {source}")
        if args.config:
            source = args.config
            config = load_config_from_yaml(source, config)
            logging.info(f"Loaded configuration overrides from: {source}")
        source = "environment"
        config = apply_runtime_settings(config, RuntimeSettings())
        source = "command-line flags"
        overrides = flag_overrides(args)
        if overrides:
            config = merge_config(config, overrides)
            logging.info(f"Applied command-line overrides: {sorted(overrides)}")
    except (pydantic.ValidationError, yaml.YAMLError, FileNotFoundError, ValueError) as e:
        sys.exit(report_config_error(e, source))

    logging.info("Configuration loaded and validated successfully with Pydantic")
    return config


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point.

    Returns:
        Exit status of the subcommand
    """
    # Basic logging until the configuration is known
    logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    args = build_parser().parse_args(argv)
    config = load_configuration(args)
    setup_logging(config)
    configure_cache(config.cache)

    logging.info("=" * 60)
    logging.info(f"cstft {args.command}: d={config.algebra.dim}, signal={config.signal.spec}, "
                 f"window sigma={config.window.sigma}, workers={config.runtime.workers}")
    logging.info("=" * 60)

    status = run_command(args.command, args.handler, config)
    logging.info(f"cstft {args.command} finished with exit status {status}")
    return status


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logging.info("Terminated by user")
        sys.exit(130)
