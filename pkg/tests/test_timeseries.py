# tests/test_timeseries.py
"""
Time Series Tests

Tests for panel construction, transforms and complete-case extraction.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

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
    YearIndexError,
)
from macro.timeseries import (
    TransformKind,
    apply_transform,
    apply_transforms,
    build_panel,
    complete_cases,
    invert_transform,
)


def _panel(**columns):
    years = list(range(2000, 2000 + len(next(iter(columns.values())))))
    return build_panel("Testland", years, columns)


class TestBuildPanel:
    """Tests for panel construction."""

    def test_holds_exact_values(self):
        """Test that input values are stored unchanged."""
        panel = build_panel("Brazil", [2000, 2001], {"gdp": [655448000000.0, 559984000000.0]})

        assert panel.value(2001, "gdp") == 559984000000.0
        assert panel.variables == ("gdp",)
        assert list(panel.years) == [2000, 2001]

    def test_single_year_single_column(self):
        """Test the smallest panel."""
        panel = build_panel("X", [2000], {"gdp": [1.0]})

        assert panel.n_years == 1
        assert panel.value(2000, "gdp") == 1.0

    def test_duplicate_year(self):
        """Test a repeated year."""
        with pytest.raises(DuplicateYear):
            build_panel("X", [2000, 2000], {"gdp": [1.0, 2.0]})

    def test_decreasing_years(self):
        """Test years out of order."""
        with pytest.raises(UnorderedYears) as exc_info:
            build_panel("X", [2001, 2000], {"gdp": [1.0, 2.0]})

        assert isinstance(exc_info.value, YearIndexError)

    def test_duplicate_variable(self):
        """Test a repeated column name."""
        with pytest.raises(DuplicateVariable):
            build_panel("X", [2000, 2001], [("gdp", [1.0, 2.0]), ("gdp", [3.0, 4.0])])

    def test_column_length_mismatch(self):
        """Test a column of the wrong length."""
        with pytest.raises(LengthMismatch):
            build_panel("X", [2000, 2001, 2002], {"gdp": [1.0, 2.0]})

    def test_nan_input_is_missing_cell(self):
        """Test a missing input value."""
        with pytest.raises(MissingCell):
            build_panel("X", [2000, 2001], {"gdp": [1.0, float("nan")]})

    def test_values_are_read_only(self):
        """Test that panel values cannot be modified."""
        panel = _panel(gdp=[1.0, 2.0])

        with pytest.raises(ValueError):
            panel.values[0, 0] = 5.0

    def test_unknown_variable_lookup(self):
        """Test looking up an absent column."""
        panel = _panel(gdp=[1.0, 2.0])

        with pytest.raises(UnknownVariable):
            panel.column("inflation")


class TestApplyTransform:
    """Tests for column transforms."""

    def test_log(self):
        """Test the log transform."""
        panel = apply_transform(_panel(x=[1.0, math.e, math.e**2]), "x", "log")

        np.testing.assert_allclose(panel.column("x"), [0.0, 1.0, 2.0], atol=1e-15)

    def test_diff_marks_first_year_missing(self):
        """Test that differencing drops the first year."""
        panel = apply_transform(_panel(x=[3.0, 5.0, 9.0]), "x", TransformKind.DIFF)
        column = panel.column("x")

        assert math.isnan(column[0])
        assert list(column[1:]) == [2.0, 4.0]

    def test_log_diff(self):
        """Test the log difference."""
        panel = apply_transform(_panel(x=[1.0, math.e, math.e**3]), "x", "log_diff")

        np.testing.assert_allclose(panel.column("x")[1:], [1.0, 2.0], rtol=1e-12)

    def test_log_of_negative_interest_rate(self, panels):
        """Test logging a negative interest rate."""
        with pytest.raises(NonPositiveValue) as exc_info:
            apply_transform(panels["Nigeria"], "interest_rate", "log")

        assert exc_info.value.details["year"] == 2000

    def test_log_of_zero(self):
        """Test logging a zero value."""
        with pytest.raises(NonPositiveValue):
            apply_transform(_panel(x=[1.0, 0.0]), "x", "log")

    def test_unknown_variable(self, panels):
        """Test transforming an absent column."""
        with pytest.raises(UnknownVariable):
            apply_transform(panels["Brazil"], "unemployment", "log")

    def test_untouched_columns_identical(self, panels):
        """Test that other columns are unchanged."""
        brazil = panels["Brazil"]
        logged = apply_transform(brazil, "gdp", "log")

        for name in ("interest_rate", "inflation", "exchange_rate_usd"):
            assert np.array_equal(logged.column(name), brazil.column(name))

    def test_input_panel_unchanged(self, panels):
        """Test that the input panel is not modified."""
        brazil = panels["Brazil"]
        before = brazil.column("gdp").copy()
        apply_transform(brazil, "gdp", "log")

        assert np.array_equal(brazil.column("gdp"), before)
        assert brazil.transform_chain == ()

    def test_chain_records_steps(self, panels):
        """Test the recorded transform chain."""
        panel = apply_transforms(panels["India"], {"gdp": "log", "exchange_rate_usd": "diff"})

        assert panel.transforms_for("gdp") == [TransformKind.LOG]
        assert panel.transforms_for("exchange_rate_usd") == [TransformKind.DIFF]
        assert panel.transforms_for("inflation") == []

    def test_standardize(self):
        """Test standardizing a column."""
        panel = apply_transform(_panel(x=[1.0, 2.0, 3.0, 4.0]), "x", "standardize")
        column = panel.column("x")
        step = panel.transform_chain[-1]

        assert step.mean == 2.5
        assert abs(float(np.mean(column))) < 1e-15
        assert abs(float(np.std(column, ddof=1)) - 1.0) < 1e-12

    def test_standardize_constant_series(self):
        """Test standardizing a constant column."""
        with pytest.raises(DegenerateSeries):
            apply_transform(_panel(x=[4.0, 4.0, 4.0]), "x", "standardize")

    def test_unknown_transform_name(self):
        """Test an unknown transform name."""
        with pytest.raises(ValidationError):
            apply_transform(_panel(x=[1.0, 2.0]), "x", "sqrt")


class TestInvertTransform:
    """Tests for undoing invertible transforms."""

    def test_exp_log_round_trip(self, panels):
        """Test undoing a log transform."""
        brazil = panels["Brazil"]
        restored = invert_transform(apply_transform(brazil, "gdp", "log"), "gdp")

        np.testing.assert_allclose(restored.column("gdp"), brazil.column("gdp"), rtol=1e-12)
        assert restored.transforms_for("gdp") == []

    def test_standardize_round_trip(self, panels):
        """Test undoing standardization."""
        nigeria = panels["Nigeria"]
        restored = invert_transform(apply_transform(nigeria, "inflation", "standardize"), "inflation")

        np.testing.assert_allclose(restored.column("inflation"), nigeria.column("inflation"), rtol=1e-12)

    def test_diff_not_invertible(self):
        """Test that a difference cannot be undone."""
        panel = apply_transform(_panel(x=[1.0, 2.0]), "x", "diff")

        with pytest.raises(ValidationError):
            invert_transform(panel, "x")

    def test_nothing_to_invert(self):
        """Test inverting an untransformed column."""
        with pytest.raises(ValidationError):
            invert_transform(_panel(x=[1.0, 2.0]), "x")


class TestCompleteCases:
    """Tests for complete-case extraction."""

    def test_diff_drops_first_year(self, panels):
        """Test that a differenced column loses its first year."""
        panel = apply_transform(panels["Brazil"], "gdp", "log_diff")
        years, matrix = complete_cases(panel, ["gdp", "interest_rate"])

        assert matrix.shape == (22, 2)
        assert years[0] == 2001
        assert not np.isnan(matrix).any()

    def test_complete_panel_unchanged(self, panels):
        """Test a panel with no missing values."""
        brazil = panels["Brazil"]
        years, matrix = complete_cases(brazil, ["gdp", "interest_rate"])

        assert np.array_equal(years, brazil.years)
        assert np.array_equal(matrix[:, 0], brazil.column("gdp"))

    def test_columns_in_requested_order(self, panels):
        """Test that columns follow the requested order."""
        brazil = panels["Brazil"]
        _, matrix = complete_cases(brazil, ["interest_rate", "gdp"])

        assert np.array_equal(matrix[:, 0], brazil.column("interest_rate"))
        assert np.array_equal(matrix[:, 1], brazil.column("gdp"))

    def test_absent_variable(self, panels):
        """Test requesting an absent column."""
        with pytest.raises(UnknownVariable):
            complete_cases(panels["Brazil"], ["gdp", "unemployment"])

    def test_no_complete_rows(self):
        """Test a panel with no complete year."""
        panel = apply_transform(build_panel("X", [2000], {"x": [1.0]}), "x", "diff")

        with pytest.raises(EmptyResult):
            complete_cases(panel, ["x"])
