# app/cli.py
"""
CLI Commands

This module provides the command-line interface:
- estimate, stability, lagselect: VAR fitting and diagnostics
- irf: orthogonal impulse responses with bootstrap bands
- report: cross-country comparison table
- simulate: deterministic DSGE simulation
- signcheck: qualitative sign checks on the shipped data

Exit codes: 0 success, 2 config/validation error, 3 data error,
4 numerical failure, 1 anything unexpected.
"""

from __future__ import annotations

from functools import wraps
from typing import Any, Callable, Dict, Optional

import click

from app import create_app
from app.run_config import RunConfig, load_run_config
from app.services import run_service
from app.utils.errors import handle_errors

_OVERRIDE_KEYS = ("data", "country", "vars", "lags", "horizon", "reps", "level", "seed", "out_dir")


def common_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """--data, --config, --out-dir and the per-run overrides."""
    options = [
        click.option("--data", "data", type=click.Path(dir_okay=False), help="Dataset CSV (default: shipped country panels)"),
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="TOML run config"),
        click.option("--out-dir", "out_dir", type=click.Path(file_okay=False), help="Output directory"),
        click.option("--country", help="Country to analyse"),
        click.option("--vars", "vars", help="Comma-separated variables; order fixes the Cholesky ordering"),
        click.option("--lags", type=int, help="Lag order p"),
        click.option("--horizon", type=int, help="IRF horizon H"),
        click.option("--reps", type=int, help="Bootstrap replications"),
        click.option("--level", type=float, help="Bootstrap confidence level (with --reps, --seed or [bootstrap])"),
        click.option("--seed", type=int, help="Bootstrap seed"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def with_run_config(func: Callable[..., Any]) -> Callable[..., Any]:
    """Build settings and the RunConfig from the common options."""

    @wraps(func)
    def wrapper(config_path: Optional[str], **kwargs: Any) -> Any:
        overrides: Dict[str, Any] = {key: kwargs.pop(key) for key in _OVERRIDE_KEYS if key in kwargs}
        settings = create_app()
        config = load_run_config(config_path, settings, overrides)
        return func(config=config, settings=settings, **kwargs)

    return wrapper


def _report_files(outcome: run_service.RunOutcome) -> None:
    click.echo(f"run {outcome.run_id}")
    for name, path in outcome.files.items():
        click.echo(f"  {name}: {path}")


@click.group()
@click.version_option(package_name="countercycle")
def cli() -> None:
    """VAR impulse responses and DSGE equation tools for country panels."""


def register_commands(group: click.Group) -> None:
    """Register the analysis commands on a click group."""

    @group.command("estimate")
    @common_options
    @handle_errors
    @with_run_config
    def estimate(config: RunConfig, settings: Any) -> None:
        """Fit the VAR and write estimate.csv."""
        outcome = run_service.run_estimate(config, settings)
        _report_files(outcome)

    @group.command("irf")
    @common_options
    @handle_errors
    @with_run_config
    def irf(config: RunConfig, settings: Any) -> None:
        """Orthogonal impulse responses, FEVD and (with a seed) bootstrap bands."""
        outcome = run_service.run_irf(config, settings)
        stable = outcome.meta["stability"]
        click.echo(f"stability: radius {stable['radius']:.6f} ({'stable' if stable['is_stable'] else 'NOT stable'})")
        _report_files(outcome)

    @group.command("stability")
    @common_options
    @handle_errors
    @with_run_config
    def stability(config: RunConfig, settings: Any) -> None:
        """Companion-matrix spectral radius of the fitted VAR."""
        outcome = run_service.run_stability(config, settings)
        stable = outcome.meta["stability"]
        click.echo(f"radius {stable['radius']:.10f} is_stable={str(stable['is_stable']).lower()}")
        _report_files(outcome)

    @group.command("lagselect")
    @common_options
    @handle_errors
    @with_run_config
    def lagselect(config: RunConfig, settings: Any) -> None:
        """Information-criterion table for p = 1..max_lag."""
        outcome = run_service.run_lagselect(config, settings)
        selection = outcome.meta["lag_selection"]
        click.echo(f"chosen lag order {selection['chosen']} by {selection['criterion']}")
        _report_files(outcome)

    @group.command("report")
    @common_options
    @handle_errors
    @with_run_config
    def report(config: RunConfig, settings: Any) -> None:
        """Cross-country comparison table (GDP growth, rates, inflation, FX)."""
        outcome = run_service.run_report(config, settings)
        _report_files(outcome)

    @group.command("simulate")
    @common_options
    @handle_errors
    @with_run_config
    def simulate(config: RunConfig, settings: Any) -> None:
        """Deterministic DSGE simulation from the [dsge] section."""
        outcome = run_service.run_simulate(config, settings)
        meta = outcome.meta
        click.echo(
            f"total utility {meta['total_utility']:.6g}; tail bound {meta['tail_bound']:.3g}"
            + (" (loose)" if meta["tail_bound_loose"] else "")
        )
        _report_files(outcome)

    @group.command("signcheck")
    @common_options
    @handle_errors
    @with_run_config
    def signcheck(config: RunConfig, settings: Any) -> None:
        """GDP response signs at horizon 1 under the default transform profile."""
        outcome, checks = run_service.run_sign_checks(config, settings)
        for check in checks:
            verdict = "pass" if check.passed else "FAIL"
            click.echo(f"{verdict}: {check.country} gdp <- {check.shock} h={check.horizon} {check.observed:.6g}")
        _report_files(outcome)


register_commands(cli)
