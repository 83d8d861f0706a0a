# macro/timeseries.py
"""
Annual Country Panels

This module holds the year-indexed panel type and the deterministic
transforms applied before VAR estimation:
- Panel construction with index and shape checks
- Level, log, diff, log-diff and standardize transforms
- Inversion of log and standardize steps
- Complete-case extraction in a caller-fixed column order

Panels are immutable. Every operation returns a new panel; untouched
columns are carried over bit for bit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from macro.errors import (
    DegenerateSeries,
    DuplicateVariable,
    DuplicateYear,
    EmptyResult,
    LengthMismatch,
    MissingCell,
    NonPositiveValue,
    UnknownVariable,
    UnorderedYears,
    ValidationError,
)

logger = logging.getLogger(__name__)


class TransformKind(str, Enum):
    """Deterministic per-column transforms."""

    LEVEL = "level"
    LOG = "log"
    DIFF = "diff"
    LOG_DIFF = "log_diff"
    STANDARDIZE = "standardize"

    @property
    def requires_positive(self) -> bool:
        return self in (TransformKind.LOG, TransformKind.LOG_DIFF)

    @property
    def shortens(self) -> bool:
        return self in (TransformKind.DIFF, TransformKind.LOG_DIFF)

    @classmethod
    def parse(cls, value: Union[str, "TransformKind"]) -> "TransformKind":
        if isinstance(value, TransformKind):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            allowed = ", ".join(kind.value for kind in cls)
            raise ValidationError(
                message=f"Unknown transform '{value}'. Valid options are: {allowed}",
                field="transform",
            )


@dataclass(frozen=True)
class TransformStep:
    """One entry of a panel's transform chain."""

    variable: str
    kind: TransformKind
    mean: Optional[float] = None
    stddev: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"variable": self.variable, "kind": self.kind.value}
        if self.kind is TransformKind.STANDARDIZE:
            data["mean"] = self.mean
            data["stddev"] = self.stddev
        return data


ColumnsInput = Union[Mapping[str, Sequence[float]], Sequence[Tuple[str, Sequence[float]]]]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class TimeSeriesPanel:
    """
    Year-indexed observations for one country.

    `values` has one row per year and one column per variable; missing
    entries are NaN and only ever produced by diff-family transforms.
    """

    country: str
    variables: Tuple[str, ...]
    years: np.ndarray
    values: np.ndarray
    transform_chain: Tuple[TransformStep, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.values.shape != (len(self.years), len(self.variables)):
            raise LengthMismatch(
                f"values shape {self.values.shape} does not match "
                f"{len(self.years)} years x {len(self.variables)} variables"
            )

    @property
    def n_years(self) -> int:
        return len(self.years)

    def index_of(self, variable: str) -> int:
        try:
            return self.variables.index(variable)
        except ValueError:
            raise UnknownVariable(variable, available=list(self.variables))

    def column(self, variable: str) -> np.ndarray:
        """Read-only view of one column."""
        return self.values[:, self.index_of(variable)]

    def value(self, year: int, variable: str) -> float:
        rows = np.nonzero(self.years == year)[0]
        if rows.size == 0:
            raise EmptyResult(
                f"Year {year} not in panel for {self.country}",
                details={"year": year, "country": self.country},
            )
        return float(self.values[rows[0], self.index_of(variable)])

    def select(self, variables: Sequence[str]) -> "TimeSeriesPanel":
        """Sub-panel with the given columns in the given order."""
        indices = [self.index_of(name) for name in variables]
        return replace(
            self,
            variables=tuple(variables),
            values=_frozen(self.values[:, indices].copy()),
            transform_chain=tuple(
                step for step in self.transform_chain if step.variable in variables
            ),
        )

    def transforms_for(self, variable: str) -> List[TransformKind]:
        return [step.kind for step in self.transform_chain if step.variable == variable]

    def equals(self, other: "TimeSeriesPanel") -> bool:
        """Exact equality, treating NaN positions as equal."""
        return (
            self.country == other.country
            and self.variables == other.variables
            and np.array_equal(self.years, other.years)
            and np.array_equal(self.values, other.values, equal_nan=True)
            and self.transform_chain == other.transform_chain
        )


# =============================================================================
# Construction
# =============================================================================


def _column_pairs(columns: ColumnsInput) -> List[Tuple[str, Sequence[float]]]:
    if isinstance(columns, Mapping):
        return list(columns.items())
    return [(name, values) for name, values in columns]


def build_panel(country: str, years: Sequence[int], columns: ColumnsInput) -> TimeSeriesPanel:
    """
    Build a panel holding exactly the given values.

    Raises:
        LengthMismatch: a column's length differs from the year count.
        DuplicateYear / UnorderedYears: years are not strictly increasing.
        DuplicateVariable: a column name appears twice.
        MissingCell: an input value is not finite.
    """
    year_array = np.asarray(list(years), dtype=np.int64)
    diffs = np.diff(year_array)
    if np.any(diffs == 0):
        duplicate = int(year_array[1:][diffs == 0][0])
        raise DuplicateYear(f"Year {duplicate} appears more than once", details={"year": duplicate})
    if np.any(diffs < 0):
        position = int(np.nonzero(diffs < 0)[0][0])
        raise UnorderedYears(
            f"Years must be strictly increasing: {int(year_array[position])} "
            f"is followed by {int(year_array[position + 1])}",
            details={"position": position + 1},
        )

    pairs = _column_pairs(columns)
    names: List[str] = []
    for name, _ in pairs:
        if name in names:
            raise DuplicateVariable(f"Variable '{name}' appears more than once", details={"variable": name})
        names.append(name)

    values = np.empty((len(year_array), len(pairs)), dtype=np.float64)
    for j, (name, column) in enumerate(pairs):
        column_array = np.asarray(list(column), dtype=np.float64)
        if column_array.shape != (len(year_array),):
            raise LengthMismatch(
                f"Column '{name}' has {column_array.size} values for {len(year_array)} years",
                details={"variable": name},
            )
        if not np.all(np.isfinite(column_array)):
            row = int(np.nonzero(~np.isfinite(column_array))[0][0])
            raise MissingCell(
                f"Column '{name}' has a missing value in year {int(year_array[row])}",
                row=row,
                column=name,
            )
        values[:, j] = column_array

    return TimeSeriesPanel(
        country=country,
        variables=tuple(names),
        years=_frozen(year_array),
        values=_frozen(values),
    )


# =============================================================================
# Transforms
# =============================================================================


def _check_positive(panel: TimeSeriesPanel, variable: str, column: np.ndarray) -> None:
    present = ~np.isnan(column)
    bad = present & (column <= 0)
    if np.any(bad):
        row = int(np.nonzero(bad)[0][0])
        year = int(panel.years[row])
        raise NonPositiveValue(
            f"log transform of '{variable}' needs strictly positive values; "
            f"{panel.country} {year} is {column[row]!r}",
            details={"variable": variable, "year": year, "value": float(column[row])},
        )


def _lagged_difference(column: np.ndarray) -> np.ndarray:
    out = np.full_like(column, np.nan)
    out[1:] = column[1:] - column[:-1]
    return out


def apply_transform(
    panel: TimeSeriesPanel,
    variable: str,
    kind: Union[str, TransformKind],
) -> TimeSeriesPanel:
    """
    Return a new panel with one column transformed.

    Diff-family transforms mark the first year of that column missing.
    The transform chain records every step, including standardize moments.
    """
    kind = TransformKind.parse(kind)
    j = panel.index_of(variable)
    column = panel.values[:, j]
    step = TransformStep(variable=variable, kind=kind)

    if kind.requires_positive:
        _check_positive(panel, variable, column)

    if kind is TransformKind.LEVEL:
        transformed = column.copy()
    elif kind is TransformKind.LOG:
        transformed = np.log(column)
    elif kind is TransformKind.DIFF:
        transformed = _lagged_difference(column)
    elif kind is TransformKind.LOG_DIFF:
        transformed = _lagged_difference(np.log(column))
    else:
        present = column[~np.isnan(column)]
        if present.size < 2:
            raise DegenerateSeries(
                f"Cannot standardize '{variable}' with fewer than two observations",
                details={"variable": variable},
            )
        mean = float(np.mean(present))
        stddev = float(np.std(present, ddof=1))
        if stddev == 0.0:
            raise DegenerateSeries(
                f"Cannot standardize constant series '{variable}'",
                details={"variable": variable},
            )
        transformed = (column - mean) / stddev
        step = TransformStep(variable=variable, kind=kind, mean=mean, stddev=stddev)

    values = panel.values.copy()
    values[:, j] = transformed
    logger.debug("Applied %s to %s/%s", kind.value, panel.country, variable)

    return replace(
        panel,
        values=_frozen(values),
        transform_chain=panel.transform_chain + (step,),
    )


def apply_transforms(
    panel: TimeSeriesPanel,
    transforms: Mapping[str, Union[str, TransformKind]],
) -> TimeSeriesPanel:
    """Apply one transform per variable, in mapping order."""
    for variable, kind in transforms.items():
        panel = apply_transform(panel, variable, kind)
    return panel


def invert_transform(panel: TimeSeriesPanel, variable: str) -> TimeSeriesPanel:
    """
    Undo the most recent transform applied to a column.

    Only level, log and standardize steps are invertible; diff-family
    steps discarded the starting level.
    """
    j = panel.index_of(variable)
    positions = [i for i, step in enumerate(panel.transform_chain) if step.variable == variable]
    if not positions:
        raise ValidationError(
            message=f"Variable '{variable}' has no transform to invert",
            field=variable,
        )
    position = positions[-1]
    step = panel.transform_chain[position]
    column = panel.values[:, j]

    if step.kind is TransformKind.LEVEL:
        restored = column.copy()
    elif step.kind is TransformKind.LOG:
        restored = np.exp(column)
    elif step.kind is TransformKind.STANDARDIZE:
        restored = column * step.stddev + step.mean
    else:
        raise ValidationError(
            message=f"{step.kind.value} on '{variable}' cannot be inverted without the dropped level",
            field=variable,
        )

    values = panel.values.copy()
    values[:, j] = restored
    chain = panel.transform_chain[:position] + panel.transform_chain[position + 1 :]
    return replace(panel, values=_frozen(values), transform_chain=chain)


# =============================================================================
# Sample extraction
# =============================================================================


def complete_cases(
    panel: TimeSeriesPanel,
    variables: Iterable[str],
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rows where every requested variable is present.

    Columns come back in the requested order; that order is the Cholesky
    ordering downstream.
    """
    names = list(variables)
    indices = [panel.index_of(name) for name in names]
    matrix = panel.values[:, indices]
    mask = ~np.isnan(matrix).any(axis=1)
    if not mask.any():
        raise EmptyResult(
            f"No complete rows for {', '.join(names)} in {panel.country}",
            details={"variables": names, "country": panel.country},
        )
    return panel.years[mask].copy(), matrix[mask].copy()
