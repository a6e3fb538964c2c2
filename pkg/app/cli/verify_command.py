"""
The verify subcommand: run the registered checks and write the report.
"""

import argparse
import logging
import sys
from typing import Sequence

from app.config.config_model import AppConfig
from app.core.cache_manager import get_cache
from app.verification import VerificationContext, build_registry, run_checks, write_report
from app.cli.error_handlers import EXIT_FAILURE, EXIT_OK, report_config_error
from app.cli.tables import resolve_output_path

logger = logging.getLogger(__name__)


def verify(config: AppConfig) -> int:
    """
    Run the verification suite.

    Returns:
        1 when any assertion failed, 2 for an unknown --only prefix, 0 otherwise;
        diagnostics never count
    """
    registry = build_registry()
    unknown = [prefix for prefix in config.verify.only
               if not any(name.startswith(prefix) for name in registry.names())]
    if unknown:
        return report_config_error(ValueError(f"no registered check starts with {', '.join(unknown)}"), "--only")

    context = VerificationContext(config, workers=config.runtime.workers)
    records = run_checks(registry, context, only=config.verify.only or None)
    path = resolve_output_path(config, "verify")
    write_report(records, path, config.output.format)

    failed = [record.check_name for record in records if record.failed]
    assertions = sum(record.kind == 'assertion' for record in records)
    stats = get_cache().get_statistics()
    logger.info(f"Cache statistics: {stats}")
    print(f"{len(records)} records, {assertions} assertions, {len(failed)} failed; report: {path}")
    if failed:
        print(f"failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def register_verify_command(subparsers: argparse._SubParsersAction,
                            parents: Sequence[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("verify", parents=list(parents),
                                   help="run the property suite and write the verification report")
    parser.add_argument("--only", nargs="+", default=None, metavar="PREFIX",
                        help="run only checks whose name starts with one of the prefixes")
    parser.set_defaults(handler=verify)
    logger.debug("Verify command registered")
