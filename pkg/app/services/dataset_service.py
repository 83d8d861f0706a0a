# app/services/dataset_service.py
"""
Dataset Service

Reads and writes the country-panel CSV:

    country,year,gdp,interest_rate,inflation,exchange_rate_usd

one row per (country, year), UTF-8, period decimal separator, no gaps.
Cells are parsed with float() so the decimal text maps to the nearest
float64 exactly; values are written back with repr() so a write/load
cycle reproduces the same floats.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List, Mapping, Union

import pandas as pd

from macro.errors import DataError, MissingCell, ParseError, UnknownCountry
from macro.timeseries import TimeSeriesPanel, build_panel

logger = logging.getLogger(__name__)

VARIABLES = ("gdp", "interest_rate", "inflation", "exchange_rate_usd")
COLUMNS = ("country", "year") + VARIABLES

DATASET_NOTE = (
    "The source table for the inflation column is titled as an interest-rate "
    "table, duplicating the title of the interest_rate table; its values are "
    "treated as inflation."
)


def _line_number(index: int) -> int:
    """1-based file line of a data row (line 1 is the header)."""
    return index + 2


def _parse_float(text: str, index: int, column: str) -> float:
    if text.strip() == "":
        raise MissingCell(
            f"Missing value in column '{column}' on line {_line_number(index)}",
            row=_line_number(index),
            column=column,
        )
    try:
        return float(text)
    except ValueError:
        raise ParseError(
            f"Cannot parse '{text}' as a number in column '{column}' on line {_line_number(index)}",
            row=_line_number(index),
            column=column,
        )


def _parse_year(text: str, index: int) -> int:
    if text.strip() == "":
        raise MissingCell(
            f"Missing year on line {_line_number(index)}",
            row=_line_number(index),
            column="year",
        )
    try:
        return int(text)
    except ValueError:
        raise ParseError(
            f"Cannot parse '{text}' as a year on line {_line_number(index)}",
            row=_line_number(index),
            column="year",
        )


def load_dataset(path: Union[str, Path]) -> Dict[str, TimeSeriesPanel]:
    """
    Load one panel per country, in order of first appearance.

    Raises:
        ParseError: unreadable file, wrong header, malformed row or cell.
        MissingCell: an empty cell.
        YearIndexError: duplicate or decreasing years within a country.
    """
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"Dataset not found: {path}")

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.ParserError as exc:
        raise ParseError(f"Malformed CSV {path}: {exc}")
    except (pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise ParseError(f"Cannot read dataset {path}: {exc}")

    header = tuple(frame.columns)
    if header != COLUMNS:
        missing = [name for name in COLUMNS if name not in header]
        extra = [name for name in header if name not in COLUMNS]
        raise ParseError(
            f"Unexpected header {','.join(header)}; expected {','.join(COLUMNS)}",
            row=1,
            column=(missing or extra or [None])[0],
        )

    rows: Dict[str, Dict[str, List]] = {}
    for index, record in enumerate(frame.itertuples(index=False, name=None)):
        country = record[0].strip()
        if not country:
            raise MissingCell(
                f"Missing country on line {_line_number(index)}",
                row=_line_number(index),
                column="country",
            )
        bucket = rows.setdefault(country, {"years": [], **{name: [] for name in VARIABLES}})
        bucket["years"].append(_parse_year(record[1], index))
        for name, text in zip(VARIABLES, record[2:]):
            bucket[name].append(_parse_float(text, index, name))

    panels: Dict[str, TimeSeriesPanel] = {}
    for country, bucket in rows.items():
        try:
            panels[country] = build_panel(
                country,
                bucket["years"],
                [(name, bucket[name]) for name in VARIABLES],
            )
        except DataError as exc:
            exc.details.setdefault("country", country)
            raise

    logger.info("Loaded %d country panels from %s", len(panels), path.name)
    return panels


def select_country(panels: Mapping[str, TimeSeriesPanel], country: str) -> TimeSeriesPanel:
    """Look up a panel by name, ignoring case."""
    if country in panels:
        return panels[country]
    for name, panel in panels.items():
        if name.lower() == country.lower():
            return panel
    raise UnknownCountry(country, available=list(panels))


def dataset_frame(panels: Mapping[str, TimeSeriesPanel]) -> pd.DataFrame:
    """Long-format frame in the CSV column order, floats rendered with repr()."""
    records = []
    for country, panel in panels.items():
        ordered = panel.select(VARIABLES)
        for row, year in enumerate(ordered.years):
            records.append(
                [country, str(int(year))] + [repr(float(value)) for value in ordered.values[row]]
            )
    return pd.DataFrame(records, columns=list(COLUMNS))


def write_dataset(panels: Mapping[str, TimeSeriesPanel], path: Union[str, Path]) -> Path:
    """Emit the CSV schema; load_dataset on the result reproduces the panels."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dataset_frame(panels).to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    logger.debug("Wrote %d country panels to %s", len(panels), path)
    return path


def dataset_bytes(path: Union[str, Path]) -> bytes:
    return Path(path).read_bytes()
