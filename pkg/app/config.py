# app/config.py
"""
Application Configuration

This module defines configuration classes for different environments.
Configuration is loaded at runtime from environment variables (and a
.env file when present). Validation is deferred to application startup
(not import time).
"""

from __future__ import annotations

import os
from typing import Dict, List, Optional, Type

from dotenv import load_dotenv

from macro import DEFAULT_DATASET


class ConfigurationError(Exception):
    """Raised when required configuration is missing or invalid."""

    pass


def get_optional_env(name: str, default: str = "") -> str:
    """Get an optional environment variable with a default value."""
    return os.environ.get(name, default)


def get_int_env(name: str, default: int = 0) -> int:
    """Get an integer environment variable."""
    value = os.environ.get(name)
    if value is None:
        return default
    try:
        return int(value)
    except ValueError:
        return default


def get_float_env(name: str, default: float = 0.0) -> float:
    """Get a float environment variable."""
    value = os.environ.get(name)
    if value is None:
        return default
    try:
        return float(value)
    except ValueError:
        return default


class BaseConfig:
    """Base configuration with common settings."""

    # Environment
    ENV: str = "development"
    DEBUG: bool = False
    TESTING: bool = False

    # Application
    APP_NAME: str = "countercycle"
    APP_VERSION: str = "1.0.0"

    # Data and output
    DATA_PATH: str = str(DEFAULT_DATASET)
    OUTPUT_DIR: str = "out"

    # Engine
    BOOTSTRAP_N_JOBS: int = 1
    SIGMA_DIVISOR: str = "dof"
    DSGE_TAIL_TOLERANCE: float = 1e-3

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "text"

    def __init__(self) -> None:
        """Initialize configuration from environment variables."""
        self._load_from_env()

    def _load_from_env(self) -> None:
        """Load configuration from environment variables without raising."""
        self.APP_VERSION = get_optional_env("APP_VERSION", self.APP_VERSION)
        self.DATA_PATH = get_optional_env("DATA_PATH", self.DATA_PATH)
        self.OUTPUT_DIR = get_optional_env("OUTPUT_DIR", self.OUTPUT_DIR)

        self.BOOTSTRAP_N_JOBS = get_int_env("BOOTSTRAP_N_JOBS", self.BOOTSTRAP_N_JOBS)
        self.SIGMA_DIVISOR = get_optional_env("SIGMA_DIVISOR", self.SIGMA_DIVISOR).lower()
        self.DSGE_TAIL_TOLERANCE = get_float_env("DSGE_TAIL_TOLERANCE", self.DSGE_TAIL_TOLERANCE)

        self.LOG_LEVEL = get_optional_env("LOG_LEVEL", self.LOG_LEVEL)
        self.LOG_FORMAT = get_optional_env("LOG_FORMAT", self.LOG_FORMAT).lower()

    def validate(self) -> None:
        """
        Validate the loaded settings.

        This should be called at application startup (runtime), not at import time.
        Raises ConfigurationError listing every problem found.
        """
        errors: List[str] = []

        if self.LOG_FORMAT not in ("text", "json"):
            errors.append(f"LOG_FORMAT must be 'text' or 'json', got '{self.LOG_FORMAT}'")

        if self.LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            errors.append(f"LOG_LEVEL '{self.LOG_LEVEL}' is not a logging level")

        if self.SIGMA_DIVISOR not in ("dof", "mle"):
            errors.append(f"SIGMA_DIVISOR must be 'dof' or 'mle', got '{self.SIGMA_DIVISOR}'")

        if self.BOOTSTRAP_N_JOBS == 0:
            errors.append("BOOTSTRAP_N_JOBS must be non-zero (use -1 for all cores)")

        if not self.DSGE_TAIL_TOLERANCE > 0:
            errors.append("DSGE_TAIL_TOLERANCE must be positive")

        if errors:
            raise ConfigurationError(
                "Configuration validation failed:\n  - " + "\n  - ".join(errors)
            )


class DevelopmentConfig(BaseConfig):
    """Development environment configuration."""

    ENV = "development"
    DEBUG = True

    LOG_LEVEL = "DEBUG"
    LOG_FORMAT = "text"


class ProductionConfig(BaseConfig):
    """Batch runs on shared machines."""

    ENV = "production"
    DEBUG = False

    BOOTSTRAP_N_JOBS = -1

    LOG_LEVEL = "INFO"
    LOG_FORMAT = "json"


class TestingConfig(BaseConfig):
    """Testing environment configuration."""

    ENV = "testing"
    DEBUG = True
    TESTING = True

    LOG_LEVEL = "WARNING"
    LOG_FORMAT = "text"

    def _load_from_env(self) -> None:
        """Testing ignores the surrounding environment except the data path."""
        self.DATA_PATH = os.environ.get("TEST_DATA_PATH", self.DATA_PATH)


# Configuration mapping
CONFIG_MAP: Dict[str, Type[BaseConfig]] = {
    "development": DevelopmentConfig,
    "production": ProductionConfig,
    "testing": TestingConfig,
}


def get_config(config_name: Optional[str] = None) -> BaseConfig:
    """
    Get configuration instance for the specified environment.

    Args:
        config_name: Environment name. If None, uses APP_ENV env var or 'development'.

    Returns:
        Configuration instance for the specified environment.

    Raises:
        ConfigurationError: If the specified environment is invalid.
    """
    load_dotenv(override=False)

    if config_name is None:
        config_name = os.environ.get("APP_ENV", "development")

    config_name = config_name.lower()

    if config_name not in CONFIG_MAP:
        valid = ", ".join(CONFIG_MAP.keys())
        raise ConfigurationError(
            f"Invalid configuration environment '{config_name}'. "
            f"Valid options are: {valid}"
        )

    return CONFIG_MAP[config_name]()
