# app/services/run_service.py
"""
Run Service

Chains the engine into the analysis pipelines behind each CLI command
and writes their artifacts:

- run_irf: irf.csv, irf.svg, estimate.csv, fevd.csv, meta.json
- run_estimate: estimate.csv, meta.json
- run_stability: stability.json
- run_lagselect: lag_selection.csv, meta.json
- run_report: panel_summary.csv
- run_simulate: dsge_paths.csv, meta.json
- run_sign_checks: sign_checks.csv

CSV floats are written with repr() and meta.json with sorted keys and
no timestamps, so identical inputs give identical bytes.
"""

from __future__ import annotations

import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from app.config import BaseConfig
from app.logging_config import compute_run_id, run_context
from app.run_config import LagSelectionSettings, RunConfig
from app.services.dataset_service import (
    DATASET_NOTE,
    VARIABLES,
    dataset_bytes,
    load_dataset,
    select_country,
)
from app.utils.svg import render_irf_svg
from macro.dsge import simulate
from macro.errors import EngineError, ParseError, ValidationError
from macro.timeseries import TimeSeriesPanel, TransformKind, apply_transform, apply_transforms, complete_cases
from macro.var import (
    IrfResult,
    LagSelection,
    StabilityReport,
    VarEstimate,
    VarSpec,
    bootstrap_bands,
    estimate_var,
    fevd,
    orthogonal_irf,
    select_lag,
    stability,
)

logger = logging.getLogger(__name__)

IRF_COLUMNS = ["horizon", "response", "shock", "point", "lower", "upper"]


@contextmanager
def pipeline_stage(name: str) -> Iterator[None]:
    """Tag engine errors raised inside the block with the stage name."""
    logger.info("Stage %s", name)
    try:
        yield
    except EngineError as error:
        error.details.setdefault("stage", name)
        raise


@dataclass(frozen=True)
class IrfTableRow:
    horizon: int
    response_variable: str
    shock_variable: str
    point: float
    lower: Optional[float] = None
    upper: Optional[float] = None

    def cells(self) -> List[Any]:
        return [self.horizon, self.response_variable, self.shock_variable, self.point, self.lower, self.upper]


@dataclass
class RunOutcome:
    run_id: str
    files: Dict[str, Path] = field(default_factory=dict)
    meta: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class SignCheck:
    country: str
    response: str
    shock: str
    horizon: int
    profile: Dict[str, str]
    observed: float

    @property
    def passed(self) -> bool:
        return self.observed < 0


# =============================================================================
# Artifact writers
# =============================================================================


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return "" if np.isnan(value) else repr(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> Path:
    frame = pd.DataFrame([[_cell(value) for value in row] for row in rows], columns=list(columns))
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    return path


def write_json(path: Path, data: Dict[str, Any]) -> Path:
    path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path


def irf_table(irf: IrfResult) -> List[IrfTableRow]:
    """One row per (response, shock, horizon)."""
    rows = []
    for i, response in enumerate(irf.ordering):
        for j, shock in enumerate(irf.ordering):
            for h in irf.horizons:
                rows.append(
                    IrfTableRow(
                        horizon=h,
                        response_variable=response,
                        shock_variable=shock,
                        point=float(irf.point[h, i, j]),
                        lower=float(irf.lower[h, i, j]) if irf.lower is not None else None,
                        upper=float(irf.upper[h, i, j]) if irf.upper is not None else None,
                    )
                )
    return rows


def _estimate_rows(estimate: VarEstimate) -> List[List[Any]]:
    rows: List[List[Any]] = [
        ["coefficient", row["equation"], row["regressor"], row["coefficient"]]
        for row in estimate.coefficient_table()
    ]
    names = estimate.spec.variable_names
    for i, left in enumerate(names):
        for j, right in enumerate(names):
            rows.append(["sigma", left, right, float(estimate.sigma[i, j])])
    return rows


# =============================================================================
# Shared pipeline steps
# =============================================================================


def _output_dir(config: RunConfig) -> Path:
    path = Path(config.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _run_id(config: RunConfig, command: str) -> str:
    with pipeline_stage("load"):
        try:
            raw = dataset_bytes(config.dataset)
        except OSError as exc:
            raise ParseError(f"Cannot read dataset {config.dataset}: {exc}")
    settings = config.to_dict()
    settings["command"] = command
    return compute_run_id(raw, settings)


def prepare_sample(config: RunConfig) -> Tuple[TimeSeriesPanel, np.ndarray, np.ndarray]:
    """load, select, transform, complete_cases."""
    with pipeline_stage("load"):
        panel = select_country(load_dataset(config.dataset), config.country)
    with pipeline_stage("select"):
        panel = panel.select(config.variables)
    with pipeline_stage("transform"):
        panel = apply_transforms(panel, config.transform_profile())
    with pipeline_stage("sample"):
        years, matrix = complete_cases(panel, config.variables)
    logger.info(
        "Sample for %s: %d observations (%d-%d)",
        config.country,
        len(years),
        int(years[0]),
        int(years[-1]),
    )
    return panel, years, matrix


def _resolve_lag_order(
    config: RunConfig, years: np.ndarray, matrix: np.ndarray
) -> Tuple[int, Optional[LagSelection]]:
    if config.lag_selection is None:
        return config.lag_order, None
    with pipeline_stage("lag_selection"):
        selection = select_lag(
            (years, matrix),
            config.var_spec(),
            config.lag_selection.max_lag,
            config.lag_selection.criterion,
        )
    return selection.chosen, selection


def _selection_meta(selection: Optional[LagSelection]) -> Optional[Dict[str, Any]]:
    if selection is None:
        return None
    return {
        "chosen": selection.chosen,
        "criterion": selection.criterion.value,
        "nobs": selection.nobs,
        "table": {str(p): values for p, values in selection.table.items()},
    }


def _base_meta(
    config: RunConfig,
    settings: BaseConfig,
    run_id: str,
    command: str,
    panel: TimeSeriesPanel,
    estimate: VarEstimate,
    report: StabilityReport,
    selection: Optional[LagSelection],
) -> Dict[str, Any]:
    return {
        "run_id": run_id,
        "command": command,
        "software_version": settings.APP_VERSION,
        "dataset": Path(config.dataset).name,
        "dataset_note": DATASET_NOTE,
        "country": panel.country,
        "ordering": list(config.variables),
        "identification": "cholesky (lower triangular, variable order as listed)",
        "transforms": config.transform_profile(),
        "transform_chain": [step.to_dict() for step in panel.transform_chain],
        "lag_order": estimate.lag_order,
        "lag_selection": _selection_meta(selection),
        "include_intercept": config.include_intercept,
        "sigma_divisor": estimate.sigma_divisor.value,
        "sigma_divisor_value": estimate.divisor,
        "sample_years": [int(year) for year in estimate.sample_years],
        "nobs": estimate.nobs,
        "stability": {"is_stable": report.is_stable, "radius": report.radius},
    }


def _estimate(config: RunConfig) -> Tuple[TimeSeriesPanel, np.ndarray, np.ndarray, VarEstimate, Optional[LagSelection]]:
    panel, years, matrix = prepare_sample(config)
    lag_order, selection = _resolve_lag_order(config, years, matrix)
    with pipeline_stage("estimate"):
        estimate = estimate_var((years, matrix), config.var_spec(lag_order), config.sigma_divisor)
    return panel, years, matrix, estimate, selection


# =============================================================================
# Pipelines
# =============================================================================


def run_irf(config: RunConfig, settings: BaseConfig) -> RunOutcome:
    """
    load -> transform -> complete_cases -> estimate_var -> stability
    -> orthogonal_irf -> bootstrap_bands -> emit.

    Bands are computed only when the config has a bootstrap section.
    """
    run_id = _run_id(config, "irf")
    with run_context(run_id):
        panel, years, matrix, estimate, selection = _estimate(config)
        with pipeline_stage("stability"):
            report = stability(estimate)
        with pipeline_stage("irf"):
            irf = orthogonal_irf(estimate, config.horizon)
        if config.bootstrap is not None:
            with pipeline_stage("bootstrap"):
                irf = bootstrap_bands(
                    (years, matrix),
                    estimate.spec,
                    config.horizon,
                    replications=config.bootstrap.replications,
                    level=config.bootstrap.level,
                    seed=config.bootstrap.seed,
                    n_jobs=config.bootstrap.n_jobs,
                    sigma_divisor=config.sigma_divisor,
                )
        with pipeline_stage("fevd"):
            shares = fevd(estimate, config.horizon)

        with pipeline_stage("emit"):
            out = _output_dir(config)
            outcome = RunOutcome(run_id=run_id)
            outcome.files["irf.csv"] = write_csv(
                out / "irf.csv", IRF_COLUMNS, [row.cells() for row in irf_table(irf)]
            )
            title = f"{panel.country}: orthogonal impulse responses ({', '.join(config.variables)})"
            svg_path = out / "irf.svg"
            svg_path.write_text(render_irf_svg(irf, title), encoding="utf-8")
            outcome.files["irf.svg"] = svg_path
            outcome.files["estimate.csv"] = write_csv(
                out / "estimate.csv", ["block", "equation", "regressor", "value"], _estimate_rows(estimate)
            )
            names = estimate.spec.variable_names
            outcome.files["fevd.csv"] = write_csv(
                out / "fevd.csv",
                ["horizon", "response", "shock", "share"],
                [
                    [h, names[i], names[j], float(shares[h, i, j])]
                    for i in range(len(names))
                    for j in range(len(names))
                    for h in range(config.horizon + 1)
                ],
            )

            meta = _base_meta(config, settings, run_id, "irf", panel, estimate, report, selection)
            meta["horizon"] = config.horizon
            meta["shock_size"] = "one standard deviation"
            meta["bootstrap"] = (
                {key: irf.metadata[key] for key in ("seed", "replications", "level", "total_draws", "method")}
                if irf.has_bands
                else None
            )
            outcome.meta = meta
            outcome.files["meta.json"] = write_json(out / "meta.json", meta)

    logger.info("irf run %s wrote %d files to %s", run_id, len(outcome.files), config.output_dir)
    return outcome


def run_estimate(config: RunConfig, settings: BaseConfig) -> RunOutcome:
    run_id = _run_id(config, "estimate")
    with run_context(run_id):
        panel, _, _, estimate, selection = _estimate(config)
        with pipeline_stage("stability"):
            report = stability(estimate)
        with pipeline_stage("emit"):
            out = _output_dir(config)
            outcome = RunOutcome(run_id=run_id)
            outcome.files["estimate.csv"] = write_csv(
                out / "estimate.csv", ["block", "equation", "regressor", "value"], _estimate_rows(estimate)
            )
            outcome.meta = _base_meta(config, settings, run_id, "estimate", panel, estimate, report, selection)
            outcome.meta["information_criteria"] = estimate.information_criteria()
            outcome.files["meta.json"] = write_json(out / "meta.json", outcome.meta)
    return outcome


def run_stability(config: RunConfig, settings: BaseConfig) -> RunOutcome:
    run_id = _run_id(config, "stability")
    with run_context(run_id):
        panel, _, _, estimate, selection = _estimate(config)
        with pipeline_stage("stability"):
            report = stability(estimate)
        with pipeline_stage("emit"):
            out = _output_dir(config)
            outcome = RunOutcome(run_id=run_id)
            outcome.meta = _base_meta(config, settings, run_id, "stability", panel, estimate, report, selection)
            outcome.files["stability.json"] = write_json(out / "stability.json", outcome.meta)
    return outcome


def run_lagselect(config: RunConfig, settings: BaseConfig) -> RunOutcome:
    """Criterion table for p = 1..max_lag on the common sample."""
    lag_settings = config.lag_selection or LagSelectionSettings()
    run_id = _run_id(config, "lagselect")
    with run_context(run_id):
        panel, years, matrix = prepare_sample(config)
        with pipeline_stage("lag_selection"):
            selection = select_lag(
                (years, matrix), config.var_spec(), lag_settings.max_lag, lag_settings.criterion
            )
        with pipeline_stage("emit"):
            out = _output_dir(config)
            outcome = RunOutcome(run_id=run_id)
            outcome.files["lag_selection.csv"] = write_csv(
                out / "lag_selection.csv",
                ["lag_order", "aic", "bic", "hq", "chosen"],
                [
                    [p, values["aic"], values["bic"], values["hq"], p == selection.chosen]
                    for p, values in selection.table.items()
                ],
            )
            outcome.meta = {
                "run_id": run_id,
                "command": "lagselect",
                "software_version": settings.APP_VERSION,
                "dataset": Path(config.dataset).name,
                "dataset_note": DATASET_NOTE,
                "country": panel.country,
                "ordering": list(config.variables),
                "transforms": config.transform_profile(),
                "include_intercept": config.include_intercept,
                "lag_selection": _selection_meta(selection),
            }
            outcome.files["meta.json"] = write_json(out / "meta.json", outcome.meta)
    return outcome


def run_report(config: RunConfig, settings: BaseConfig) -> RunOutcome:
    """
    Comparison series for every country: GDP growth as the log difference
    of GDP, the other columns as loaded. Growth is empty for the first year.
    """
    run_id = _run_id(config, "report")
    with run_context(run_id):
        with pipeline_stage("load"):
            panels = load_dataset(config.dataset)
        rows: List[List[Any]] = []
        with pipeline_stage("transform"):
            for country, panel in panels.items():
                growth = apply_transform(panel, "gdp", TransformKind.LOG_DIFF).column("gdp")
                for row, year in enumerate(panel.years):
                    rows.append(
                        [country, int(year), float(growth[row])]
                        + [panel.value(int(year), name) for name in VARIABLES[1:]]
                    )
        with pipeline_stage("emit"):
            out = _output_dir(config)
            outcome = RunOutcome(run_id=run_id)
            outcome.files["panel_summary.csv"] = write_csv(
                out / "panel_summary.csv",
                ["country", "year", "gdp_growth", "interest_rate", "inflation", "exchange_rate_usd"],
                rows,
            )
            outcome.meta = {"run_id": run_id, "rows": len(rows), "dataset_note": DATASET_NOTE}
    return outcome


def run_simulate(config: RunConfig, settings: BaseConfig) -> RunOutcome:
    """
    Deterministic DSGE simulation; dsge_paths.csv ends with a
    `total_utility` footer row carrying the discounted sum.
    """
    if config.dsge is None:
        raise ValidationError(message="simulate requires a [dsge] section in the run config", field="dsge")
    params = config.dsge
    scenario_settings = config.scenario
    run_id = _run_id(config, "simulate")
    with run_context(run_id):
        with pipeline_stage("simulate"):
            initial, scenario = scenario_settings.build(params)
            result = simulate(initial, scenario, params, scenario_settings.t_max)
        loose = result.tail_bound > settings.DSGE_TAIL_TOLERANCE
        if loose:
            logger.warning(
                "Truncation tail bound %.3g exceeds tolerance %.3g; raise t_max for a tighter sum",
                result.tail_bound,
                settings.DSGE_TAIL_TOLERANCE,
            )
        with pipeline_stage("emit"):
            out = _output_dir(config)
            outcome = RunOutcome(run_id=run_id)
            rows: List[List[Any]] = [
                [path["period"], path["output"], path["interest_rate"], path["consumption"]]
                for path in result.paths()
            ]
            rows.append(["total_utility", result.total_utility, None, None])
            outcome.files["dsge_paths.csv"] = write_csv(
                out / "dsge_paths.csv", ["period", "output", "interest_rate", "consumption"], rows
            )
            outcome.meta = {
                "run_id": run_id,
                "command": "simulate",
                "software_version": settings.APP_VERSION,
                "params": params.to_dict(),
                "t_max": result.t_max,
                "total_utility": result.total_utility,
                "tail_bound": result.tail_bound,
                "tail_bound_loose": loose,
                "tail_tolerance": settings.DSGE_TAIL_TOLERANCE,
                "closure": "budget constraint solved for consumption under a constant savings rate; "
                "competitive factor prices, zero profits",
                "capital_accumulation": scenario_settings.depreciation is not None,
            }
            outcome.files["meta.json"] = write_json(out / "meta.json", outcome.meta)
    return outcome


# Qualitative claims: GDP falls one year after each shock.
SIGN_CHECKS: Tuple[Tuple[str, Tuple[str, str]], ...] = (
    ("Brazil", ("gdp", "interest_rate")),
    ("Brazil", ("gdp", "exchange_rate_usd")),
    ("India", ("gdp", "exchange_rate_usd")),
)
SIGN_CHECK_HORIZON = 1


def evaluate_sign_checks(panels: Dict[str, TimeSeriesPanel], horizon: int = 10) -> List[SignCheck]:
    """GDP response at horizon 1 to the second variable's shock, default profile, p = 1."""
    checks = []
    for country, variables in SIGN_CHECKS:
        profile = {name: ("log" if name == "gdp" else "level") for name in variables}
        panel = apply_transforms(select_country(panels, country).select(variables), profile)
        data = complete_cases(panel, variables)
        estimate = estimate_var(data, VarSpec(variables, lag_order=1))
        irf = orthogonal_irf(estimate, horizon)
        observed = float(irf.response("gdp", variables[1])[SIGN_CHECK_HORIZON])
        check = SignCheck(
            country=country,
            response="gdp",
            shock=variables[1],
            horizon=SIGN_CHECK_HORIZON,
            profile=profile,
            observed=observed,
        )
        if not check.passed:
            logger.warning(
                "Sign check failed: %s gdp <- %s at h=%d is %.6g under %s",
                country,
                variables[1],
                SIGN_CHECK_HORIZON,
                observed,
                profile,
            )
        checks.append(check)
    return checks


def run_sign_checks(config: RunConfig, settings: BaseConfig) -> Tuple[RunOutcome, List[SignCheck]]:
    """Report, never tune: failing checks are written with their profile."""
    run_id = _run_id(config, "signcheck")
    with run_context(run_id):
        with pipeline_stage("load"):
            panels = load_dataset(config.dataset)
        with pipeline_stage("signcheck"):
            checks = evaluate_sign_checks(panels)
        with pipeline_stage("emit"):
            out = _output_dir(config)
            outcome = RunOutcome(run_id=run_id)
            outcome.files["sign_checks.csv"] = write_csv(
                out / "sign_checks.csv",
                ["country", "response", "shock", "horizon", "profile", "expected", "observed", "passed"],
                [
                    [
                        check.country,
                        check.response,
                        check.shock,
                        check.horizon,
                        ";".join(f"{name}={kind}" for name, kind in check.profile.items()),
                        "negative",
                        check.observed,
                        check.passed,
                    ]
                    for check in checks
                ],
            )
    return outcome, checks
