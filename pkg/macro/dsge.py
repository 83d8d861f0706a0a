# macro/dsge.py
"""
DSGE Equation Block

Evaluatable household, firm and central-bank equations:
- CRRA consumption / convex labor disutility, discounted over a finite horizon
- Cobb-Douglas production
- Household budget constraint residual
- Taylor interest-rate rule

plus a deterministic simulation that chains them period by period and
steady-state helpers. The simulation's consumption closure (budget
constraint solved for C_t under an exogenous savings rule, competitive
factor prices) is scaffolding for evaluation; it is not a
general-equilibrium solution.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from macro.errors import DomainError, InvalidParameter, LengthMismatch

logger = logging.getLogger(__name__)

DEFAULT_T_MAX = 200

SavingsRule = Callable[[int, float], float]


@dataclass(frozen=True)
class DsgeParams:
    """Structural parameters of the equation block."""

    discount: float = 0.99  # beta
    risk_aversion: float = 2.0  # sigma
    labor_disutility: float = 1.0  # chi
    labor_curvature: float = 1.0  # phi
    capital_share: float = 0.33  # alpha
    natural_rate: float = 0.02  # rho
    taylor_pi: float = 1.5
    taylor_y: float = 0.5
    inflation_target: float = 0.02
    potential_output: float = 1.0

    def __post_init__(self) -> None:
        for item in fields(self):
            value = getattr(self, item.name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidParameter(f"{item.name} must be a finite number", field=item.name)
        if not 0.0 < self.discount < 1.0:
            raise InvalidParameter("discount must lie in (0, 1)", field="discount")
        if not 0.0 < self.capital_share < 1.0:
            raise InvalidParameter("capital_share must lie in (0, 1)", field="capital_share")
        for name in ("risk_aversion", "labor_disutility", "labor_curvature"):
            if getattr(self, name) < 0:
                raise InvalidParameter(f"{name} must be non-negative", field=name)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "DsgeParams":
        known = {item.name for item in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidParameter(
                f"Unknown DSGE parameter(s): {', '.join(unknown)}",
                details={"unknown": unknown},
            )
        return cls(**{key: float(value) for key, value in data.items()})

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class EconomyState:
    """One period of the economy; flows follow the household budget constraint."""

    consumption: float = 0.0
    labor: float = 0.0
    capital: float = 0.0
    technology: float = 1.0
    investment: float = 0.0
    bonds: float = 0.0
    wage: float = 0.0
    capital_return: float = 0.0
    profits: float = 0.0
    transfers: float = 0.0
    inflation: float = 0.0
    output: float = 0.0
    interest_rate: float = 0.0

    def __post_init__(self) -> None:
        for name in ("consumption", "labor", "capital"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.technology <= 0:
            raise DomainError(f"technology must be positive, got {self.technology}")

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


# =============================================================================
# Equations
# =============================================================================


def period_utility(consumption: float, labor: float, params: DsgeParams) -> float:
    """C^(1-sigma)/(1-sigma) - chi L^(1+phi)/(1+phi); log C at sigma = 1."""
    sigma = params.risk_aversion
    if consumption < 0:
        raise DomainError(f"consumption must be non-negative, got {consumption}")
    if labor < 0:
        raise DomainError(f"labor must be non-negative, got {labor}")
    if consumption == 0 and sigma >= 1:
        raise DomainError("zero consumption has unbounded disutility when risk_aversion >= 1")

    if sigma == 1.0:
        consumption_term = math.log(consumption)
    else:
        consumption_term = consumption ** (1.0 - sigma) / (1.0 - sigma)

    phi = params.labor_curvature
    labor_term = params.labor_disutility * labor ** (1.0 + phi) / (1.0 + phi)
    return consumption_term - labor_term


def utility(path: Iterable[Tuple[float, float]], params: DsgeParams) -> float:
    """Discounted sum over a finite path of (C_t, L_t), starting at t = 0."""
    total = 0.0
    weight = 1.0
    for consumption, labor in path:
        total += weight * period_utility(consumption, labor, params)
        weight *= params.discount
    return total


def steady_state_utility(
    consumption: float,
    labor: float,
    params: DsgeParams,
    horizon: Optional[int] = None,
) -> float:
    """Value of a constant (C, L) path; infinite horizon when horizon is None."""
    u = period_utility(consumption, labor, params)
    beta = params.discount
    if horizon is None:
        return u / (1.0 - beta)
    return u * (1.0 - beta**horizon) / (1.0 - beta)


def tail_bound(discount: float, t_max: int) -> float:
    """beta^T: weight of the discarded tail relative to a unit flow."""
    return discount**t_max


def production(technology: float, capital: float, labor: float, capital_share: float) -> float:
    """Y = A K^alpha L^(1-alpha)."""
    if not 0.0 < capital_share < 1.0:
        raise InvalidParameter("capital_share must lie in (0, 1)", field="capital_share")
    if technology <= 0:
        raise DomainError(f"technology must be positive, got {technology}")
    if capital < 0 or labor < 0:
        raise DomainError(f"capital and labor must be non-negative, got K={capital}, L={labor}")
    return technology * capital**capital_share * labor ** (1.0 - capital_share)


def budget_sides(state: EconomyState) -> Tuple[float, float]:
    """(expenditure, income) of the household budget constraint."""
    expenditure = state.consumption + state.investment + state.bonds
    income = (
        state.wage * state.labor
        + state.capital_return * state.capital
        + state.profits
        + state.transfers
    )
    return expenditure, income


def budget_residual(state: EconomyState) -> float:
    """C + I + B - (wL + rK + Pi + T); zero when the constraint binds."""
    expenditure, income = budget_sides(state)
    return expenditure - income


def taylor_rate(inflation: float, output: float, params: DsgeParams) -> float:
    """rho + phi_pi (pi - pi*) + phi_y (y - y*), unbounded below."""
    return (
        params.natural_rate
        + params.taylor_pi * (inflation - params.inflation_target)
        + params.taylor_y * (output - params.potential_output)
    )


# =============================================================================
# Simulation
# =============================================================================


def constant_savings_rate(rate: float) -> SavingsRule:
    """Save a fixed fraction of period income."""

    def rule(period: int, income: float) -> float:
        return rate * income

    return rule


@dataclass(frozen=True)
class Scenario:
    """Exogenous paths for a deterministic simulation."""

    technology: Sequence[float]
    inflation: Sequence[float]
    labor: Sequence[float]
    savings_rule: SavingsRule = field(default=constant_savings_rate(0.0))
    transfers: Optional[Sequence[float]] = None
    investment_share: float = 1.0
    depreciation: Optional[float] = None

    @property
    def length(self) -> int:
        return len(self.technology)

    @classmethod
    def constant(
        cls,
        t_max: int,
        technology: float = 1.0,
        inflation: float = 0.0,
        labor: float = 1.0,
        savings_rate: float = 0.0,
        transfers: float = 0.0,
        **kwargs: Any,
    ) -> "Scenario":
        return cls(
            technology=[technology] * t_max,
            inflation=[inflation] * t_max,
            labor=[labor] * t_max,
            savings_rule=constant_savings_rate(savings_rate),
            transfers=[transfers] * t_max,
            **kwargs,
        )


@dataclass(frozen=True)
class SimulationResult:
    states: Tuple[EconomyState, ...]
    total_utility: float
    tail_bound: float
    t_max: int

    def paths(self) -> List[Dict[str, float]]:
        return [
            {
                "period": t,
                "output": state.output,
                "interest_rate": state.interest_rate,
                "consumption": state.consumption,
            }
            for t, state in enumerate(self.states)
        ]


def _period_state(
    params: DsgeParams,
    technology: float,
    capital: float,
    labor: float,
    inflation: float,
    transfers: float,
    savings: Callable[[float], float],
    investment_share: float,
) -> EconomyState:
    alpha = params.capital_share
    output = production(technology, capital, labor, alpha)
    wage = (1.0 - alpha) * output / labor if labor > 0 else 0.0
    capital_return = alpha * output / capital if capital > 0 else 0.0
    income = wage * labor + capital_return * capital + transfers
    saved = savings(income)
    consumption = income - saved
    if consumption < 0:
        raise DomainError(
            f"savings rule leaves negative consumption {consumption:.6g} from income {income:.6g}",
            details={"income": income, "savings": saved},
        )
    investment = investment_share * saved
    return EconomyState(
        consumption=consumption,
        labor=labor,
        capital=capital,
        technology=technology,
        investment=investment,
        bonds=saved - investment,
        wage=wage,
        capital_return=capital_return,
        profits=0.0,
        transfers=transfers,
        inflation=inflation,
        output=output,
        interest_rate=taylor_rate(inflation, output, params),
    )


def simulate(
    initial: EconomyState,
    scenario: Scenario,
    params: DsgeParams,
    t_max: int = DEFAULT_T_MAX,
) -> SimulationResult:
    """
    Chain production, the Taylor rule and the budget constraint for t_max periods.

    Capital stays at its initial level unless the scenario sets a
    depreciation rate, in which case K_{t+1} = (1 - delta) K_t + I_t.

    Raises:
        LengthMismatch: an exogenous path is not t_max long.
        DomainError: the savings rule leaves negative consumption; the
            offending period is in details["period"].
    """
    transfers = scenario.transfers if scenario.transfers is not None else [0.0] * t_max
    for name, path in (
        ("technology", scenario.technology),
        ("inflation", scenario.inflation),
        ("labor", scenario.labor),
        ("transfers", transfers),
    ):
        if len(path) != t_max:
            raise LengthMismatch(
                f"{name} path has {len(path)} periods, expected {t_max}",
                details={"path": name},
            )

    capital = initial.capital
    states: List[EconomyState] = []
    total = 0.0
    weight = 1.0
    for t in range(t_max):
        try:
            state = _period_state(
                params,
                technology=scenario.technology[t],
                capital=capital,
                labor=scenario.labor[t],
                inflation=scenario.inflation[t],
                transfers=transfers[t],
                savings=lambda income, period=t: scenario.savings_rule(period, income),
                investment_share=scenario.investment_share,
            )
            total += weight * period_utility(state.consumption, state.labor, params)
        except DomainError as exc:
            exc.details["period"] = t
            exc.message = f"period {t}: {exc.message}"
            raise
        states.append(state)
        weight *= params.discount
        if scenario.depreciation is not None:
            capital = (1.0 - scenario.depreciation) * capital + state.investment
            if capital < 0:
                raise DomainError(f"capital turns negative after period {t}", details={"period": t})

    bound = tail_bound(params.discount, t_max)
    logger.debug("Simulated %d periods, total utility %.6g, tail bound %.3g", t_max, total, bound)
    return SimulationResult(states=tuple(states), total_utility=total, tail_bound=bound, t_max=t_max)


def steady_state(
    params: DsgeParams,
    technology: float = 1.0,
    capital: float = 1.0,
    labor: float = 1.0,
    savings_rate: float = 0.0,
    transfers: float = 0.0,
    inflation: Optional[float] = None,
    investment_share: float = 1.0,
) -> EconomyState:
    """Stationary state under constant exogenous inputs with capital held fixed."""
    rule = constant_savings_rate(savings_rate)
    return _period_state(
        params,
        technology=technology,
        capital=capital,
        labor=labor,
        inflation=params.inflation_target if inflation is None else inflation,
        transfers=transfers,
        savings=lambda income: rule(0, income),
        investment_share=investment_share,
    )
