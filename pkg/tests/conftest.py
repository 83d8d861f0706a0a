# tests/conftest.py
"""
Test Configuration and Fixtures

This module provides pytest fixtures for testing the countercycle engine and CLI.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Callable, Dict, Generator

import numpy as np
import pytest

# Set testing environment before importing app
os.environ["APP_ENV"] = "testing"

from click.testing import CliRunner

from app import create_app
from app.config import BaseConfig
from app.logging_config import LOGGER_NAMESPACES
from app.services.dataset_service import load_dataset
from macro import DEFAULT_DATASET
from macro.numerics import cholesky_lower
from macro.timeseries import TimeSeriesPanel
from macro.var import VarProcess, VarSpec, simulate_var


@pytest.fixture(scope="session")
def settings() -> BaseConfig:
    """Testing configuration."""
    return create_app("testing")


@pytest.fixture(autouse=True)
def reset_logging() -> Generator[None, None, None]:
    """Drop handlers bound to a CliRunner stream once the test is over."""
    yield
    for namespace in LOGGER_NAMESPACES:
        logger = logging.getLogger(namespace)
        logger.handlers = []
        logger.propagate = True


@pytest.fixture(scope="session")
def dataset_path() -> Path:
    return DEFAULT_DATASET


@pytest.fixture(scope="session")
def panels(dataset_path: Path) -> Dict[str, TimeSeriesPanel]:
    """The shipped Brazil / India / Nigeria panels."""
    return load_dataset(dataset_path)


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def out_dir(tmp_path: Path) -> Path:
    path = tmp_path / "out"
    path.mkdir()
    return path


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[str], Path]:
    """Write a TOML run config and return its path."""

    def _write(text: str, name: str = "run.toml") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture
def var1_process() -> VarProcess:
    """Stable bivariate VAR(1) with identity innovation covariance."""
    return VarProcess(
        spec=VarSpec(("y1", "y2"), lag_order=1),
        intercept=np.zeros(2),
        lag_matrices=(np.array([[0.5, 0.1], [0.0, 0.3]]),),
        sigma=np.eye(2),
    )


def draw_series(process: VarProcess, T: int, seed: int, burn_in: int = 100) -> np.ndarray:
    """Simulate T observations of a process with Gaussian innovations."""
    rng = np.random.default_rng(seed)
    m, p = process.n_vars, process.lag_order
    shocks = rng.standard_normal((T + burn_in, m)) @ cholesky_lower(process.sigma).T
    path = simulate_var(process, np.zeros((p, m)), shocks)
    return path[p + burn_in :]


@pytest.fixture
def simulate_series() -> Callable[..., np.ndarray]:
    return draw_series
