"""
Global error handling for the command-line entry point.

Every subcommand runs inside run_command, which:
- logs unhandled exceptions with their traceback and a JSON record of the
  error type, message and context
- prints a one-line message to stderr
- maps the failure to an exit status (2 for configuration errors, 1 otherwise)
"""

import json
import logging
import sys
import traceback
from typing import Any, Callable, Dict, Optional

import pydantic
import yaml

from app.core.errors import CliffordError, SignalSpecError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_INTERRUPTED = 130


def _log_error_details(error: BaseException, command: Optional[str]) -> None:
    error_details: Dict[str, Any] = {
        "command": command,
        "error_type": str(type(error)),
        "error_message": str(error),
        "context": getattr(error, "context", None),
        "traceback": traceback.format_exc(),
    }
    logger.error("Error details: %s", json.dumps(error_details, indent=2, default=str))


def report_config_error(error: Exception, source: Optional[str] = None) -> int:
    """
    Log a configuration error field by field and return the configuration exit status.

    Args:
        error: ValidationError, YAMLError, FileNotFoundError or ValueError
        source: File or layer the error came from, when known
    """
    where = f" in {source}" if source else ""
    if isinstance(error, pydantic.ValidationError):
        logger.error(f"Configuration validation error{where}: {error.error_count()} problem(s)")
        for problem in error.errors():
            location = ".".join(str(part) for part in problem.get("loc", ())) or "<root>"
            message = problem.get("msg", "")
            logger.error(f"  {location}: {message}")
            print(f"configuration error{where}: {location}: {message}", file=sys.stderr)
    elif isinstance(error, yaml.YAMLError):
        logger.error(f"YAML parsing error in configuration file{where}: {error}")
        print(f"configuration error{where}: invalid YAML: {error}", file=sys.stderr)
    else:
        logger.error(f"Configuration error{where}: {error}")
        print(f"configuration error{where}: {error}", file=sys.stderr)
    return EXIT_CONFIG


def run_command(command: str, handler: Callable[..., int], *args, **kwargs) -> int:
    """
    Run a subcommand handler and convert exceptions into exit statuses.

    Args:
        command: Subcommand name for log records
        handler: Callable returning an exit status

    Returns:
        The handler's status, or the status of the caught failure
    """
    try:
        return handler(*args, **kwargs)
    except (pydantic.ValidationError, yaml.YAMLError) as e:
        return report_config_error(e)
    except SignalSpecError as e:
        return report_config_error(e, "signal selector")
    except KeyboardInterrupt:
        logger.warning(f"Command {command} interrupted")
        return EXIT_INTERRUPTED
    except CliffordError as e:
        logger.error(f"Numerical error while running {command}:", exc_info=e)
        _log_error_details(e, command)
        print(f"{command} failed: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except Exception as e:
        logger.error(f"Exception while running {command}:", exc_info=e)
        _log_error_details(e, command)
        print(f"{command} failed: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILURE
