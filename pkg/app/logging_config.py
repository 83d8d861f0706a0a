# app/logging_config.py
"""
Logging Configuration

This module sets up structured logging with support for JSON output and
run ID tracing. The run ID is deterministic (derived from the dataset
bytes and the normalized run configuration) so a log line can be matched
to the meta.json of the run that produced it.
"""

from __future__ import annotations

import contextvars
import hashlib
import json
import logging
import sys
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import Any, Dict, Iterator, Mapping

from app.config import BaseConfig

LOGGER_NAMESPACES = ("app", "macro")

_run_id: contextvars.ContextVar[str] = contextvars.ContextVar("run_id", default="-")

_STANDARD_ATTRIBUTES = {
    "name",
    "msg",
    "args",
    "created",
    "filename",
    "funcName",
    "levelname",
    "levelno",
    "lineno",
    "module",
    "msecs",
    "pathname",
    "process",
    "processName",
    "relativeCreated",
    "stack_info",
    "exc_info",
    "exc_text",
    "message",
    "run_id",
    "thread",
    "threadName",
    "taskName",
}


def compute_run_id(dataset_bytes: bytes, settings: Mapping[str, Any]) -> str:
    """Short SHA-256 digest of the dataset bytes and the normalized settings."""
    digest = hashlib.sha256()
    digest.update(dataset_bytes)
    digest.update(json.dumps(settings, sort_keys=True, default=str).encode("utf-8"))
    return digest.hexdigest()[:12]


def current_run_id() -> str:
    return _run_id.get()


@contextmanager
def run_context(run_id: str) -> Iterator[str]:
    """Bind a run ID to every log record emitted inside the block."""
    token = _run_id.set(run_id)
    try:
        yield run_id
    finally:
        _run_id.reset(token)


class RunIdFilter(logging.Filter):
    """Add the current run ID to log records."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.run_id = _run_id.get()
        return True


class JSONFormatter(logging.Formatter):
    """Format log records as JSON lines for batch observability."""

    def format(self, record: logging.LogRecord) -> str:
        log_data: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "run_id": getattr(record, "run_id", "-"),
        }

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        for key, value in record.__dict__.items():
            if key not in _STANDARD_ATTRIBUTES:
                log_data[key] = value

        return json.dumps(log_data, default=str)


class TextFormatter(logging.Formatter):
    """Human-readable text format for development."""

    def format(self, record: logging.LogRecord) -> str:
        run_id = getattr(record, "run_id", "-")
        timestamp = datetime.now(timezone.utc).strftime("%Y-%m-%d %H:%M:%S")

        base_msg = f"[{timestamp}] [{record.levelname}] [{run_id}] {record.getMessage()}"

        if record.exc_info:
            base_msg += "\n" + self.formatException(record.exc_info)

        return base_msg


def setup_logging(config: BaseConfig) -> None:
    """Configure the app and engine loggers."""
    log_level = getattr(logging, config.LOG_LEVEL.upper(), logging.INFO)

    # Logs go to stderr; stdout carries command results.
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(log_level)
    handler.addFilter(RunIdFilter())

    if config.LOG_FORMAT == "json":
        handler.setFormatter(JSONFormatter())
    else:
        handler.setFormatter(TextFormatter())

    for namespace in LOGGER_NAMESPACES:
        logger = logging.getLogger(namespace)
        logger.handlers = [handler]
        logger.setLevel(log_level)
        logger.propagate = False

    # joblib worker chatter
    logging.getLogger("joblib").setLevel(logging.WARNING)
