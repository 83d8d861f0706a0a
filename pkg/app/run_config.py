# app/run_config.py
"""
Run Configuration

Loads the TOML document describing one analysis run, applies CLI
overrides and validates the result against RUN_CONFIG_SCHEMA. Unknown
keys are errors at every level.

Example:
    country = "Brazil"
    variables = ["gdp", "interest_rate"]
    horizon = 10

    [transforms]
    gdp = "log"

    [bootstrap]
    replications = 1000
    level = 0.95
    seed = 42
"""

from __future__ import annotations

import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from app.config import BaseConfig
from app.utils.validation import (
    FieldValidator,
    ValidationSchema,
    boolean_field,
    enum_field,
    integer_field,
    number_field,
    text_field,
)
from macro.dsge import DEFAULT_T_MAX, DsgeParams, EconomyState, Scenario, constant_savings_rate
from macro.errors import ErrorCode, ValidationError
from macro.timeseries import TransformKind
from macro.var import MIN_REPLICATIONS, Criterion, SigmaDivisor, VarSpec

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

logger = logging.getLogger(__name__)

DEFAULT_VARIABLES = ("gdp", "interest_rate")
DEFAULT_MAX_LAG = 3

# =============================================================================
# Schema
# =============================================================================

_TRANSFORM_NAMES = {kind.value for kind in TransformKind}

BOOTSTRAP_SCHEMA = ValidationSchema(
    fields=[
        integer_field("replications", min_value=MIN_REPLICATIONS, default=1000),
        number_field("level", min_value=0.0, max_value=1.0, exclusive_bounds=True, default=0.95),
        integer_field("seed", min_value=0),
        integer_field("n_jobs"),
    ]
)

LAG_SELECTION_SCHEMA = ValidationSchema(
    fields=[
        integer_field("max_lag", min_value=1, default=DEFAULT_MAX_LAG),
        enum_field("criterion", {c.value for c in Criterion}, default=Criterion.BIC.value),
    ]
)

SCENARIO_SCHEMA = ValidationSchema(
    fields=[
        integer_field("t_max", min_value=1, default=DEFAULT_T_MAX),
        number_field("technology", min_value=0.0, exclusive_bounds=True, allow_list=True, default=1.0),
        number_field("inflation", allow_list=True),
        number_field("labor", min_value=0.0, allow_list=True, default=1.0),
        number_field("capital", min_value=0.0, default=1.0),
        number_field("transfers", allow_list=True, default=0.0),
        number_field("savings_rate", default=0.0),
        number_field("investment_share", min_value=0.0, max_value=1.0, default=1.0),
        number_field("depreciation", min_value=0.0, max_value=1.0),
        FieldValidator(name="technology_shocks", field_type=list, item_type=dict, default=[]),
    ]
)

DSGE_SCHEMA = ValidationSchema(
    fields=[number_field(name) for name in DsgeParams.__dataclass_fields__],
    sections={"scenario": SCENARIO_SCHEMA},
)

RUN_CONFIG_SCHEMA = ValidationSchema(
    fields=[
        text_field("dataset"),
        text_field("country", default="Brazil"),
        FieldValidator(
            name="variables",
            field_type=list,
            item_type=str,
            min_items=1,
            default=list(DEFAULT_VARIABLES),
            custom_validator=lambda names: len(set(names)) == len(names),
            custom_error="variables must not repeat a name",
        ),
        integer_field("horizon", min_value=0, default=10),
        integer_field("lag_order", min_value=1, default=1),
        enum_field("sigma_divisor", {d.value for d in SigmaDivisor}),
        boolean_field("include_intercept", default=True),
        text_field("output_dir"),
    ],
    sections={
        "transforms": ValidationSchema(open_keys=enum_field("transform", _TRANSFORM_NAMES, required=True)),
        "lag_selection": LAG_SELECTION_SCHEMA,
        "bootstrap": BOOTSTRAP_SCHEMA,
        "dsge": DSGE_SCHEMA,
    },
)


# =============================================================================
# Settings types
# =============================================================================


@dataclass(frozen=True)
class BootstrapSettings:
    seed: int
    replications: int = 1000
    level: float = 0.95
    n_jobs: int = 1


@dataclass(frozen=True)
class LagSelectionSettings:
    max_lag: int = DEFAULT_MAX_LAG
    criterion: Criterion = Criterion.BIC


PathValue = Union[float, Tuple[float, ...]]


@dataclass(frozen=True)
class ScenarioSettings:
    """Exogenous inputs of a DSGE simulation; scalars are held constant."""

    t_max: int = DEFAULT_T_MAX
    technology: PathValue = 1.0
    inflation: Optional[PathValue] = None
    labor: PathValue = 1.0
    capital: float = 1.0
    transfers: PathValue = 0.0
    savings_rate: float = 0.0
    investment_share: float = 1.0
    depreciation: Optional[float] = None
    technology_shocks: Tuple[Tuple[int, float], ...] = ()

    def _expand(self, value: PathValue) -> List[float]:
        if isinstance(value, tuple):
            return list(value)
        return [float(value)] * self.t_max

    def build(self, params: DsgeParams) -> Tuple[EconomyState, Scenario]:
        """Initial state and exogenous paths; inflation defaults to the target."""
        technology = self._expand(self.technology)
        for period, factor in self.technology_shocks:
            technology[period] *= factor
        inflation = self._expand(params.inflation_target if self.inflation is None else self.inflation)
        scenario = Scenario(
            technology=technology,
            inflation=inflation,
            labor=self._expand(self.labor),
            savings_rule=constant_savings_rate(self.savings_rate),
            transfers=self._expand(self.transfers),
            investment_share=self.investment_share,
            depreciation=self.depreciation,
        )
        initial = EconomyState(capital=self.capital, technology=technology[0])
        return initial, scenario


@dataclass(frozen=True)
class RunConfig:
    """Declarative description of one analysis run."""

    dataset: str
    country: str = "Brazil"
    variables: Tuple[str, ...] = DEFAULT_VARIABLES
    transforms: Tuple[Tuple[str, str], ...] = ()
    horizon: int = 10
    lag_order: int = 1
    sigma_divisor: SigmaDivisor = SigmaDivisor.DOF
    include_intercept: bool = True
    output_dir: str = "out"
    lag_selection: Optional[LagSelectionSettings] = None
    bootstrap: Optional[BootstrapSettings] = None
    dsge: Optional[DsgeParams] = None
    scenario: ScenarioSettings = field(default_factory=ScenarioSettings)

    def transform_profile(self) -> Dict[str, str]:
        """Per-variable transform in variable order; default log(gdp), levels otherwise."""
        explicit = dict(self.transforms)
        if explicit:
            return {name: explicit.get(name, TransformKind.LEVEL.value) for name in self.variables}
        return {
            name: TransformKind.LOG.value if name == "gdp" else TransformKind.LEVEL.value
            for name in self.variables
        }

    def var_spec(self, lag_order: Optional[int] = None) -> VarSpec:
        return VarSpec(
            variable_names=self.variables,
            lag_order=self.lag_order if lag_order is None else lag_order,
            include_intercept=self.include_intercept,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Normalized form used for the run ID and meta.json."""
        data = asdict(self)
        data["variables"] = list(self.variables)
        data["transforms"] = self.transform_profile()
        data["sigma_divisor"] = self.sigma_divisor.value
        if self.lag_selection is not None:
            data["lag_selection"]["criterion"] = self.lag_selection.criterion.value
        if self.bootstrap is not None:
            # worker count never changes results
            data["bootstrap"].pop("n_jobs")
        data.pop("output_dir")
        data.pop("dataset")
        return data


# =============================================================================
# Loading
# =============================================================================

_FLAT_OVERRIDES = {
    "data": "dataset",
    "country": "country",
    "vars": "variables",
    "lags": "lag_order",
    "horizon": "horizon",
    "out_dir": "output_dir",
}

# Only these open a [bootstrap] table; --level adjusts one that exists.
_BOOTSTRAP_OVERRIDES = {"reps": "replications", "seed": "seed"}


def read_document(path: Union[str, Path]) -> Dict[str, Any]:
    """Parse a TOML file; syntax errors are validation errors."""
    path = Path(path)
    try:
        with path.open("rb") as handle:
            return tomllib.load(handle)
    except FileNotFoundError:
        raise ValidationError(message=f"Config file not found: {path}", field="config")
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(message=f"Config file {path} is not valid TOML: {exc}", field="config")


def apply_overrides(document: Dict[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """Return a copy of the document with CLI values layered on top."""
    merged = {key: (dict(value) if isinstance(value, dict) else value) for key, value in document.items()}
    for option, key in _FLAT_OVERRIDES.items():
        value = overrides.get(option)
        if value is None:
            continue
        if option == "vars" and isinstance(value, str):
            value = [name.strip() for name in value.split(",") if name.strip()]
        merged[key] = value
    for option, key in _BOOTSTRAP_OVERRIDES.items():
        value = overrides.get(option)
        if value is not None:
            merged.setdefault("bootstrap", {})[key] = value
    level = overrides.get("level")
    if level is not None:
        if "bootstrap" in merged:
            merged["bootstrap"]["level"] = level
        else:
            logger.warning("Ignoring --level: no bootstrap requested (use --reps, --seed or [bootstrap])")
    return merged


def _path_value(value: Any) -> Any:
    return tuple(value) if isinstance(value, list) else value


def _scenario_settings(raw: Mapping[str, Any]) -> ScenarioSettings:
    t_max = raw["t_max"]
    errors: List[str] = []
    for name in ("technology", "inflation", "labor", "transfers"):
        value = raw.get(name)
        if isinstance(value, list) and len(value) != t_max:
            errors.append(f"dsge.scenario.{name} has {len(value)} entries, expected t_max = {t_max}")

    shocks: List[Tuple[int, float]] = []
    for i, shock in enumerate(raw.get("technology_shocks") or []):
        label = f"dsge.scenario.technology_shocks[{i}]"
        if set(shock) != {"period", "factor"}:
            errors.append(f"{label} must have exactly the keys 'period' and 'factor'")
            continue
        period, factor = shock["period"], shock["factor"]
        if isinstance(period, bool) or not isinstance(period, int) or not 0 <= period < t_max:
            errors.append(f"{label}.period must be an integer in [0, {t_max})")
            continue
        if isinstance(factor, bool) or not isinstance(factor, (int, float)) or factor <= 0:
            errors.append(f"{label}.factor must be a positive number")
            continue
        shocks.append((period, float(factor)))

    if errors:
        raise ValidationError(message="Invalid run configuration: " + "; ".join(errors), field="dsge.scenario")

    settings: Dict[str, Any] = {
        key: _path_value(value)
        for key, value in raw.items()
        if key != "technology_shocks" and value is not None
    }
    return ScenarioSettings(technology_shocks=tuple(shocks), **settings)


def build_run_config(
    document: Mapping[str, Any],
    settings: BaseConfig,
    base_dir: Optional[Path] = None,
) -> RunConfig:
    """Validate a (merged) document and build the RunConfig."""
    values = RUN_CONFIG_SCHEMA.validate(dict(document))

    transforms = values.get("transforms", {})
    strays = sorted(set(transforms) - set(values["variables"]))
    if strays:
        raise ValidationError(
            message=f"transforms name variables outside the run: {', '.join(strays)}",
            field="transforms",
        )

    bootstrap: Optional[BootstrapSettings] = None
    if "bootstrap" in values:
        raw = values["bootstrap"]
        if raw["seed"] is None:
            raise ValidationError(
                message="bootstrap requires an explicit seed (set bootstrap.seed or pass --seed)",
                field="bootstrap.seed",
                error_code=ErrorCode.MISSING_SEED,
            )
        bootstrap = BootstrapSettings(
            seed=raw["seed"],
            replications=raw["replications"],
            level=raw["level"],
            n_jobs=raw["n_jobs"] if raw["n_jobs"] is not None else settings.BOOTSTRAP_N_JOBS,
        )

    lag_selection: Optional[LagSelectionSettings] = None
    if "lag_selection" in values:
        raw = values["lag_selection"]
        lag_selection = LagSelectionSettings(
            max_lag=raw["max_lag"],
            criterion=Criterion.parse(raw["criterion"]),
        )

    dsge: Optional[DsgeParams] = None
    scenario = ScenarioSettings()
    if "dsge" in values:
        raw = dict(values["dsge"])
        raw_scenario = raw.pop("scenario", None)
        dsge = DsgeParams.from_mapping({key: value for key, value in raw.items() if value is not None})
        if raw_scenario is not None:
            scenario = _scenario_settings(raw_scenario)

    dataset = values["dataset"] or settings.DATA_PATH
    if base_dir is not None and values["dataset"] and not Path(dataset).is_absolute():
        dataset = str(base_dir / dataset)

    return RunConfig(
        dataset=dataset,
        country=values["country"],
        variables=tuple(values["variables"]),
        transforms=tuple(transforms.items()),
        horizon=values["horizon"],
        lag_order=values["lag_order"],
        sigma_divisor=SigmaDivisor.parse(values["sigma_divisor"] or settings.SIGMA_DIVISOR),
        include_intercept=values["include_intercept"],
        output_dir=values["output_dir"] or settings.OUTPUT_DIR,
        lag_selection=lag_selection,
        bootstrap=bootstrap,
        dsge=dsge,
        scenario=scenario,
    )


def load_run_config(
    path: Optional[Union[str, Path]],
    settings: BaseConfig,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """
    Read, override and validate a run configuration.

    Args:
        path: TOML file, or None to start from an empty document.
        settings: Environment configuration supplying defaults.
        overrides: CLI values (data, country, vars, lags, horizon, reps, level, seed, out_dir).

    Raises:
        ValidationError: on any invalid, unknown or missing key; raised
            before any computation starts.
    """
    document: Dict[str, Any] = read_document(path) if path is not None else {}
    merged = apply_overrides(document, overrides or {})
    base_dir = Path(path).parent if path is not None else None
    config = build_run_config(merged, settings, base_dir=base_dir)
    logger.debug("Loaded run config for %s (%s)", config.country, ", ".join(config.variables))
    return config
