"""
app.cli package initialization and command registration.

This module is the central hub for registering the subcommands of the
command-line entry point (kernel-table, transform, spectrogram, verify) on
an argparse subparser collection. Every subcommand sets a `handler`
default taking the validated AppConfig and returning an exit status.
"""

import argparse
import logging
from typing import Sequence

from .error_handlers import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, report_config_error, run_command
from .table_commands import register_table_commands
from .verify_command import register_verify_command

logger = logging.getLogger(__name__)

__all__ = ["EXIT_CONFIG", "EXIT_FAILURE", "EXIT_OK", "register_all_commands", "report_config_error", "run_command"]


def register_all_commands(subparsers: argparse._SubParsersAction,
                          parents: Sequence[argparse.ArgumentParser] = ()) -> None:
    """
    Register all subcommands.

    This function registers:
    1. The table commands (kernel-table, transform, spectrogram)
    2. The verify command

    Args:
        subparsers: Result of ArgumentParser.add_subparsers
        parents: Parsers carrying the flags shared by every subcommand
    """
    register_table_commands(subparsers, parents)
    register_verify_command(subparsers, parents)
    logger.debug("All commands have been successfully registered")
