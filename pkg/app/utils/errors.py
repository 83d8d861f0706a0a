# app/utils/errors.py
"""
Error Handling

This module maps engine errors to process exit codes and one-line
diagnostics for the CLI. It plays the role a registered error handler
plays in a web application: commands raise, the handler reports.
"""

from __future__ import annotations

import logging
from functools import wraps
from typing import Any, Callable, Dict, TypeVar

import click

from app.config import ConfigurationError
from macro.errors import EngineError, ErrorCode

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def exit_code_for(error: BaseException) -> int:
    """Process exit code for an exception."""
    if isinstance(error, EngineError):
        return error.exit_code
    if isinstance(error, ConfigurationError):
        return EXIT_CONFIG
    return EXIT_UNEXPECTED


def error_report(error: BaseException) -> Dict[str, Any]:
    """Structured report for any exception, engine or not."""
    if isinstance(error, EngineError):
        return error.to_dict()
    if isinstance(error, ConfigurationError):
        return {
            "ok": False,
            "error": {"code": ErrorCode.VALIDATION_FAILED, "type": "ConfigurationError", "message": str(error)},
        }
    return {
        "ok": False,
        "error": {"code": "INTERNAL", "type": type(error).__name__, "message": "An unexpected error occurred"},
    }


def format_diagnostic(error: BaseException) -> str:
    """One-line stderr message: code, stage and message."""
    report = error_report(error)["error"]
    prefix = f"error [{report['code']}]"
    if isinstance(error, EngineError) and error.details.get("stage"):
        prefix += f" during {error.details['stage']}"
    return f"{prefix}: {report['message']}"


def handle_errors(func: F) -> F:
    """
    Wrap a click command so errors become diagnostics and exit codes.

    Usage:
        @cli.command()
        @handle_errors
        def irf(...):
            ...
    """

    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except (click.exceptions.Exit, click.exceptions.Abort, click.ClickException):
            raise
        except (EngineError, ConfigurationError) as error:
            code = exit_code_for(error)
            logger.warning(
                "Run failed: %s",
                format_diagnostic(error),
                extra={"error_code": error_report(error)["error"]["code"], "exit_code": code},
            )
            click.echo(format_diagnostic(error), err=True)
            raise click.exceptions.Exit(code)
        except Exception as error:
            logger.error("Unexpected error: %s: %s", type(error).__name__, error, exc_info=True)
            click.echo(format_diagnostic(error), err=True)
            raise click.exceptions.Exit(EXIT_UNEXPECTED)

    return wrapper  # type: ignore[return-value]
