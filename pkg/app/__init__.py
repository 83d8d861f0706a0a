# app/__init__.py
"""
countercycle Application Package

This module provides the application factory: it resolves the
environment configuration, validates it and installs logging. Every CLI
command obtains its settings through create_app.
"""

from __future__ import annotations

import logging
from typing import Optional

from app.config import BaseConfig, get_config
from app.logging_config import setup_logging

logger = logging.getLogger(__name__)


def create_app(config_name: Optional[str] = None) -> BaseConfig:
    """
    Application factory.

    Args:
        config_name: Configuration environment name (development, testing, production).
                    If None, uses APP_ENV environment variable or defaults to development.

    Returns:
        Validated configuration with logging installed.

    Raises:
        ConfigurationError: unknown environment or invalid settings.
    """
    config = get_config(config_name)
    config.validate()

    setup_logging(config)

    logger.debug("Application initialized in %s mode (version %s)", config.ENV, config.APP_VERSION)

    return config
