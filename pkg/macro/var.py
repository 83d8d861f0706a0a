# macro/var.py
"""
Vector Autoregression Engine

Estimation and impulse-response machinery for VAR(p) systems:
- Regression design and per-equation least squares estimation
- Companion form, stability and moving-average coefficients
- Orthogonalized (Cholesky) impulse responses and FEVD
- Recursive-design residual bootstrap bands
- Information-criterion lag selection

The variable order in a VarSpec is the Cholesky ordering: a variable
does not respond on impact to shocks of variables listed after it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, NamedTuple, NoReturn, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from macro.errors import (
    BootstrapFailed,
    DuplicateVariable,
    InsufficientObservations,
    InvalidParameter,
    NotPositiveDefinite,
    RankDeficient,
    ShapeMismatch,
    ValidationError,
)
from macro.numerics import cholesky_lower, least_squares, log_det_spd, spectral_radius

logger = logging.getLogger(__name__)

STABILITY_MARGIN = 1e-10
MIN_REPLICATIONS = 100
REDRAW_FACTOR = 10

DataInput = Union[Tuple[np.ndarray, np.ndarray], np.ndarray]


class SigmaDivisor(str, Enum):
    """Divisor for the residual covariance."""

    DOF = "dof"  # T - p - (mp + 1)
    MLE = "mle"  # T - p

    @classmethod
    def parse(cls, value: Union[str, "SigmaDivisor"]) -> "SigmaDivisor":
        if isinstance(value, SigmaDivisor):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValidationError(
                message=f"sigma_divisor must be one of: dof, mle (got '{value}')",
                field="sigma_divisor",
            )


class Criterion(str, Enum):
    AIC = "aic"
    BIC = "bic"
    HQ = "hq"

    @classmethod
    def parse(cls, value: Union[str, "Criterion"]) -> "Criterion":
        if isinstance(value, Criterion):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValidationError(
                message=f"criterion must be one of: aic, bic, hq (got '{value}')",
                field="criterion",
            )


# =============================================================================
# Domain types
# =============================================================================


@dataclass(frozen=True)
class VarSpec:
    """Model order, variable ordering and deterministic terms."""

    variable_names: Tuple[str, ...]
    lag_order: int = 1
    include_intercept: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "variable_names", tuple(self.variable_names))
        if not self.variable_names:
            raise InvalidParameter("A VAR needs at least one variable", field="variable_names")
        seen = set()
        for name in self.variable_names:
            if name in seen:
                raise DuplicateVariable(
                    f"Variable '{name}' listed twice in the VAR ordering",
                    details={"variable": name},
                )
            seen.add(name)
        if int(self.lag_order) != self.lag_order or self.lag_order < 1:
            raise InvalidParameter(
                f"lag_order must be a positive integer, got {self.lag_order}",
                field="lag_order",
            )

    @property
    def n_vars(self) -> int:
        return len(self.variable_names)

    @property
    def n_regressors(self) -> int:
        return self.n_vars * self.lag_order + int(self.include_intercept)

    def with_lag_order(self, lag_order: int) -> "VarSpec":
        return replace(self, lag_order=lag_order)


@dataclass(frozen=True, eq=False)
class VarProcess:
    """
    A VAR(p) system y_t = c + A_1 y_{t-1} + ... + A_p y_{t-p} + u_t, E[u u'] = sigma.

    Used directly for known data-generating processes; VarEstimate adds
    the sample information of a fitted system.
    """

    spec: VarSpec
    intercept: np.ndarray
    lag_matrices: Tuple[np.ndarray, ...]
    sigma: np.ndarray

    def __post_init__(self) -> None:
        m, p = self.spec.n_vars, self.spec.lag_order
        intercept = np.asarray(self.intercept, dtype=np.float64).reshape(-1)
        lags = tuple(np.asarray(a, dtype=np.float64) for a in self.lag_matrices)
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if intercept.shape != (m,):
            raise ShapeMismatch(f"intercept must have {m} entries, got {intercept.shape}")
        if len(lags) != p or any(a.shape != (m, m) for a in lags):
            raise ShapeMismatch(f"expected {p} lag matrices of shape ({m}, {m})")
        if sigma.shape != (m, m):
            raise ShapeMismatch(f"sigma must be ({m}, {m}), got {sigma.shape}")
        object.__setattr__(self, "intercept", intercept)
        object.__setattr__(self, "lag_matrices", lags)
        object.__setattr__(self, "sigma", sigma)

    @property
    def n_vars(self) -> int:
        return self.spec.n_vars

    @property
    def lag_order(self) -> int:
        return self.spec.lag_order

    @property
    def coefficient_matrix(self) -> np.ndarray:
        """Stacked B with Y = X B: intercept row (if any) then A_1' ... A_p'."""
        blocks = [a.T for a in self.lag_matrices]
        if self.spec.include_intercept:
            blocks.insert(0, self.intercept[None, :])
        return np.vstack(blocks)


@dataclass(frozen=True, eq=False)
class VarEstimate(VarProcess):
    """A fitted VAR: coefficients plus residuals and sample bookkeeping."""

    residuals: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    sample_years: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    observations: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    sigma_divisor: SigmaDivisor = SigmaDivisor.DOF

    @property
    def nobs(self) -> int:
        return int(self.residuals.shape[0])

    @property
    def df_resid(self) -> int:
        return self.nobs - self.spec.n_regressors

    @property
    def divisor(self) -> int:
        return self.df_resid if self.sigma_divisor is SigmaDivisor.DOF else self.nobs

    @property
    def initial_values(self) -> np.ndarray:
        return self.observations[: self.lag_order]

    def coefficient_table(self) -> List[Dict[str, Any]]:
        """One row per (equation, regressor)."""
        regressors = []
        if self.spec.include_intercept:
            regressors.append("const")
        for lag in range(1, self.lag_order + 1):
            regressors.extend(f"L{lag}.{name}" for name in self.spec.variable_names)
        B = self.coefficient_matrix
        return [
            {"equation": equation, "regressor": regressor, "coefficient": float(B[r, e])}
            for e, equation in enumerate(self.spec.variable_names)
            for r, regressor in enumerate(regressors)
        ]

    def information_criteria(self) -> Dict[str, float]:
        """AIC, BIC and HQ on the maximum-likelihood residual covariance."""
        nobs = self.nobs
        sigma_ml = self.residuals.T @ self.residuals / nobs
        log_det = log_det_spd(0.5 * (sigma_ml + sigma_ml.T))
        free_params = self.n_vars * self.spec.n_regressors
        return {
            "aic": log_det + 2.0 * free_params / nobs,
            "bic": log_det + np.log(nobs) * free_params / nobs,
            "hq": log_det + 2.0 * np.log(np.log(nobs)) * free_params / nobs,
        }


@dataclass(frozen=True, eq=False)
class IrfResult:
    """
    Impulse responses indexed [h][i][j]: response of variable i at horizon h
    to a one-standard-deviation orthogonal shock in variable j.
    """

    point: np.ndarray
    ordering: Tuple[str, ...]
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return self.point.shape[0] - 1

    @property
    def horizons(self) -> range:
        return range(self.horizon + 1)

    @property
    def has_bands(self) -> bool:
        return self.lower is not None and self.upper is not None

    def response(self, response: str, shock: str) -> np.ndarray:
        return self.point[:, self.ordering.index(response), self.ordering.index(shock)]


class StabilityReport(NamedTuple):
    is_stable: bool
    radius: float


@dataclass(frozen=True)
class LagSelection:
    chosen: int
    criterion: Criterion
    table: Dict[int, Dict[str, float]]
    nobs: int


# =============================================================================
# Estimation
# =============================================================================


def _unpack(data: DataInput) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(data, tuple):
        years, matrix = data
        years = np.asarray(years)
    else:
        matrix = data
        years = None
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim == 1:
        matrix = matrix[:, None]
    if years is None:
        years = np.arange(matrix.shape[0])
    if len(years) != matrix.shape[0]:
        raise ShapeMismatch(f"{len(years)} years for {matrix.shape[0]} observations")
    return years, matrix


def build_regression(data: DataInput, spec: VarSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Stack the VAR(p) design.

    Row t of Y is observation t+p; row t of X is
    [1, y_{t+p-1}, ..., y_t] with the lag-1 block first.
    """
    _, matrix = _unpack(data)
    T, m = matrix.shape
    p = spec.lag_order
    if m != spec.n_vars:
        raise ShapeMismatch(f"data has {m} columns but the VarSpec lists {spec.n_vars} variables")
    required = p + spec.n_regressors
    if T < required:
        raise InsufficientObservations(
            f"VAR({p}) in {m} variables needs at least {required} observations, got {T}",
            required=required,
            available=T,
        )

    Y = matrix[p:]
    lag_blocks = [matrix[p - lag : T - lag] for lag in range(1, p + 1)]
    if spec.include_intercept:
        lag_blocks.insert(0, np.ones((T - p, 1)))
    X = np.hstack(lag_blocks)
    return X, Y


def estimate_var(
    data: DataInput,
    spec: VarSpec,
    sigma_divisor: Union[str, SigmaDivisor] = SigmaDivisor.DOF,
) -> VarEstimate:
    """
    Fit a VAR(p) by per-equation least squares.

    The residual covariance uses T - p - (mp + 1) by default, T - p with
    the "mle" divisor.
    """
    divisor_kind = SigmaDivisor.parse(sigma_divisor)
    years, matrix = _unpack(data)
    T = matrix.shape[0]
    required = spec.lag_order + spec.n_regressors + 1
    if T < required:
        raise InsufficientObservations(
            f"VAR({spec.lag_order}) in {spec.n_vars} variables needs at least {required} "
            f"observations for one residual degree of freedom, got {T}",
            required=required,
            available=T,
        )

    X, Y = build_regression((years, matrix), spec)
    B = least_squares(X, Y)
    residuals = Y - X @ B

    m, p = spec.n_vars, spec.lag_order
    offset = int(spec.include_intercept)
    intercept = B[0].copy() if spec.include_intercept else np.zeros(m)
    lag_matrices = tuple(B[offset + (j - 1) * m : offset + j * m].T.copy() for j in range(1, p + 1))

    nobs = residuals.shape[0]
    divisor = nobs - spec.n_regressors if divisor_kind is SigmaDivisor.DOF else nobs
    sigma = residuals.T @ residuals / divisor
    sigma = 0.5 * (sigma + sigma.T)

    estimate = VarEstimate(
        spec=spec,
        intercept=intercept,
        lag_matrices=lag_matrices,
        sigma=sigma,
        residuals=residuals,
        sample_years=np.asarray(years[p:]).copy(),
        observations=matrix.copy(),
        sigma_divisor=divisor_kind,
    )
    logger.debug(
        "Estimated VAR(%d) on %s: %d observations, divisor %d",
        p,
        ",".join(spec.variable_names),
        nobs,
        divisor,
    )
    return estimate


# =============================================================================
# Dynamics
# =============================================================================


def companion_matrix(process: VarProcess) -> np.ndarray:
    """[A_1 ... A_p] on top, identity blocks on the subdiagonal."""
    m, p = process.n_vars, process.lag_order
    companion = np.zeros((m * p, m * p))
    companion[:m, :] = np.hstack(process.lag_matrices)
    if p > 1:
        companion[m:, :-m] = np.eye(m * (p - 1))
    return companion


def stability(process: VarProcess) -> StabilityReport:
    """Spectral radius of the companion matrix; never raises on unstable systems."""
    radius = spectral_radius(companion_matrix(process))
    is_stable = radius < 1.0 - STABILITY_MARGIN
    if not is_stable:
        logger.warning("VAR is not stable: companion spectral radius %.6f", radius)
    return StabilityReport(is_stable=bool(is_stable), radius=radius)


def ma_coefficients(process: VarProcess, horizon: int) -> np.ndarray:
    """Phi_0 = I, Phi_h = sum_{j=1..min(h,p)} A_j Phi_{h-j}; shape (H+1, m, m)."""
    if horizon < 0:
        raise InvalidParameter(f"horizon must be non-negative, got {horizon}", field="horizon")
    m, p = process.n_vars, process.lag_order
    phi = np.zeros((horizon + 1, m, m))
    phi[0] = np.eye(m)
    for h in range(1, horizon + 1):
        for j in range(1, min(h, p) + 1):
            phi[h] += process.lag_matrices[j - 1] @ phi[h - j]
    return phi


def reduced_form_irf(process: VarProcess, horizon: int) -> np.ndarray:
    """Responses to unit innovations; identical to the MA coefficients."""
    return ma_coefficients(process, horizon)


def orthogonal_irf(process: VarProcess, horizon: int) -> IrfResult:
    """Theta_h = Phi_h P with P the lower Cholesky factor of sigma."""
    P = cholesky_lower(process.sigma)
    phi = ma_coefficients(process, horizon)
    theta = phi @ P
    return IrfResult(
        point=theta,
        ordering=process.spec.variable_names,
        metadata={"identification": "cholesky", "shock_size": "one_std"},
    )


def cumulative_irf(responses: np.ndarray) -> np.ndarray:
    return np.cumsum(responses, axis=0)


def fevd(process: VarProcess, horizon: int) -> np.ndarray:
    """Share of variable i's h-step forecast error variance due to orthogonal shock j."""
    theta = orthogonal_irf(process, horizon).point
    accumulated = np.cumsum(theta**2, axis=0)
    return accumulated / accumulated.sum(axis=2, keepdims=True)


def simulate_var(
    process: VarProcess,
    initial: np.ndarray,
    innovations: np.ndarray,
) -> np.ndarray:
    """
    Deterministic recursion from p initial rows.

    Returns the initial rows followed by one row per innovation row.
    """
    m, p = process.n_vars, process.lag_order
    initial = np.asarray(initial, dtype=np.float64).reshape(p, m)
    innovations = np.asarray(innovations, dtype=np.float64).reshape(-1, m)
    n = innovations.shape[0]

    path = np.empty((p + n, m))
    path[:p] = initial
    for t in range(p, p + n):
        value = process.intercept + innovations[t - p]
        for j in range(1, p + 1):
            value = value + process.lag_matrices[j - 1] @ path[t - j]
        path[t] = value
    return path


# =============================================================================
# Bootstrap
# =============================================================================


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    """Independent stream for one replication, fixed by (seed, replication)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replication,)))


def _bootstrap_replication(
    replication: int,
    seed: int,
    estimate: VarEstimate,
    centered: np.ndarray,
    horizon: int,
    max_draws: int,
    skip: int = 0,
) -> Tuple[Optional[np.ndarray], int]:
    rng = replication_rng(seed, replication)
    n = centered.shape[0]
    initial = estimate.initial_values

    for draw in range(1, max_draws + 1):
        rows = rng.integers(0, n, size=n)
        # draws already spent in an earlier pass
        if draw <= skip:
            continue
        path = simulate_var(estimate, initial, centered[rows])
        try:
            refit = estimate_var(path, estimate.spec, estimate.sigma_divisor)
            return orthogonal_irf(refit, horizon).point, draw
        except (RankDeficient, NotPositiveDefinite):
            continue
    return None, max_draws


def _raise_exhausted(
    total_draws: int, replications: int, draw_budget: int, unfinished: int
) -> NoReturn:
    raise BootstrapFailed(
        f"Bootstrap needed more than {draw_budget} draws for {replications} replications "
        f"({total_draws} used, {unfinished} unfinished)",
        details={"total_draws": total_draws, "failed_replications": unfinished},
    )


def bootstrap_bands(
    data: DataInput,
    spec: VarSpec,
    horizon: int,
    replications: int = 1000,
    level: float = 0.95,
    seed: Optional[int] = None,
    n_jobs: int = 1,
    sigma_divisor: Union[str, SigmaDivisor] = SigmaDivisor.DOF,
) -> IrfResult:
    """
    Percentile bands from a recursive-design residual bootstrap.

    Centered residual rows are resampled with replacement, the series is
    rebuilt from the first p actual observations with the fitted
    coefficients, and the model is re-estimated. Replication r draws from
    its own stream derived from (seed, r), so serial and parallel runs
    agree bit for bit.

    Raises:
        ValidationError: replications < 100, level outside (0, 1) or no seed.
        BootstrapFailed: more than 10 x replications draws were needed.
    """
    if seed is None:
        raise ValidationError(message="bootstrap requires an explicit seed", field="seed")
    if replications < MIN_REPLICATIONS:
        raise ValidationError(
            message=f"replications must be at least {MIN_REPLICATIONS}, got {replications}",
            field="replications",
        )
    if not 0.0 < level < 1.0:
        raise ValidationError(message=f"level must lie in (0, 1), got {level}", field="level")

    estimate = estimate_var(data, spec, sigma_divisor)
    point = orthogonal_irf(estimate, horizon)
    centered = estimate.residuals - estimate.residuals.mean(axis=0)
    draw_budget = REDRAW_FACTOR * replications

    # First pass: every replication gets REDRAW_FACTOR draws, so this pass
    # alone never exceeds the budget.
    outcomes = list(
        Parallel(n_jobs=n_jobs)(
            delayed(_bootstrap_replication)(r, seed, estimate, centered, horizon, REDRAW_FACTOR)
            for r in range(replications)
        )
    )

    # Second pass: unfinished replications continue their own streams in
    # index order, each leaving one draw for every later unfinished one.
    pending = [r for r, (theta, _) in enumerate(outcomes) if theta is None]
    total_draws = sum(draws for _, draws in outcomes)
    for position, r in enumerate(pending):
        later = len(pending) - position - 1
        allowed = draw_budget - (total_draws - REDRAW_FACTOR) - later
        if allowed <= REDRAW_FACTOR:
            _raise_exhausted(total_draws, replications, draw_budget, len(pending) - position)
        theta, used = _bootstrap_replication(
            r, seed, estimate, centered, horizon, allowed, skip=REDRAW_FACTOR
        )
        total_draws += used - REDRAW_FACTOR
        if theta is None:
            _raise_exhausted(total_draws, replications, draw_budget, len(pending) - position)
        outcomes[r] = (theta, used)
    if total_draws > replications:
        logger.info("Bootstrap redrew %d degenerate samples", total_draws - replications)

    draws = np.stack([theta for theta, _ in outcomes])
    lower = np.percentile(draws, 100.0 * (1.0 - level) / 2.0, axis=0)
    upper = np.percentile(draws, 100.0 * (1.0 + level) / 2.0, axis=0)

    metadata = dict(point.metadata)
    metadata.update(
        {
            "seed": seed,
            "replications": replications,
            "level": level,
            "total_draws": total_draws,
            "method": "recursive-design residual bootstrap, percentile bands",
        }
    )
    return replace(point, lower=lower, upper=upper, metadata=metadata)


# =============================================================================
# Lag selection
# =============================================================================


def select_lag(
    data: DataInput,
    spec_template: VarSpec,
    p_max: int,
    criterion: Union[str, Criterion] = Criterion.BIC,
) -> LagSelection:
    """
    Fit p = 1..p_max on a common sample and minimize the criterion.

    The first p_max observations are held out for every candidate. Ties
    go to the smaller lag order.
    """
    criterion = Criterion.parse(criterion)
    if p_max < 1:
        raise InvalidParameter(f"p_max must be at least 1, got {p_max}", field="p_max")
    years, matrix = _unpack(data)
    T = matrix.shape[0]
    widest = spec_template.with_lag_order(p_max)
    required = p_max + widest.n_regressors + 1
    if T < required:
        raise InsufficientObservations(
            f"Lag selection up to {p_max} needs at least {required} observations, got {T}",
            required=required,
            available=T,
        )

    table: Dict[int, Dict[str, float]] = {}
    chosen, best = 1, np.inf
    for p in range(1, p_max + 1):
        start = p_max - p
        estimate = estimate_var(
            (years[start:], matrix[start:]),
            spec_template.with_lag_order(p),
            SigmaDivisor.MLE,
        )
        table[p] = estimate.information_criteria()
        value = table[p][criterion.value]
        if value < best:
            chosen, best = p, value

    logger.info("Selected lag order %d by %s (p_max=%d)", chosen, criterion.value.upper(), p_max)
    return LagSelection(chosen=chosen, criterion=criterion, table=table, nobs=T - p_max)


def permute_process(process: VarProcess, order: Sequence[int]) -> VarProcess:
    """Relabel variables: new variable k is old variable order[k]."""
    idx = np.asarray(order)
    spec = replace(process.spec, variable_names=tuple(process.spec.variable_names[i] for i in idx))
    return VarProcess(
        spec=spec,
        intercept=process.intercept[idx],
        lag_matrices=tuple(a[np.ix_(idx, idx)] for a in process.lag_matrices),
        sigma=process.sigma[np.ix_(idx, idx)],
    )
