# macro/errors.py
"""
Error Hierarchy

This module provides the structured exceptions raised by the engine.
Every error carries a stable error code, a human-readable message,
optional details for diagnosis and the process exit code the CLI maps
it to.
"""

from __future__ import annotations

from typing import Any, Dict, Optional


class ErrorCode:
    """Stable error codes, grouped by family."""

    # Configuration / validation errors (exit 2)
    VALIDATION_FAILED = "CFG_001"
    INVALID_PARAMETER = "CFG_002"
    UNKNOWN_KEY = "CFG_003"
    MISSING_SEED = "CFG_004"

    # Data errors (exit 3)
    LENGTH_MISMATCH = "DATA_001"
    DUPLICATE_YEAR = "DATA_002"
    UNORDERED_YEARS = "DATA_003"
    DUPLICATE_VARIABLE = "DATA_004"
    UNKNOWN_VARIABLE = "DATA_005"
    NON_POSITIVE_VALUE = "DATA_006"
    DEGENERATE_SERIES = "DATA_007"
    EMPTY_RESULT = "DATA_008"
    PARSE_ERROR = "DATA_009"
    MISSING_CELL = "DATA_010"
    UNKNOWN_COUNTRY = "DATA_011"
    INSUFFICIENT_OBSERVATIONS = "DATA_012"

    # Numerical errors (exit 4)
    SHAPE_MISMATCH = "NUM_001"
    RANK_DEFICIENT = "NUM_002"
    NOT_SYMMETRIC = "NUM_003"
    NOT_POSITIVE_DEFINITE = "NUM_004"
    NO_CONVERGENCE = "NUM_005"
    BOOTSTRAP_FAILED = "NUM_006"
    DOMAIN_ERROR = "NUM_007"


class EngineError(Exception):
    """
    Base exception for engine errors.

    Provides a consistent structure for error reports including:
    - Process exit code
    - Error code for programmatic handling
    - Human-readable message
    - Optional details for debugging
    """

    exit_code: int = 1
    default_code: str = ErrorCode.VALIDATION_FAILED

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.message = message
        self.error_code = error_code or self.default_code
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to a dictionary for structured reports."""
        report: Dict[str, Any] = {
            "ok": False,
            "error": {
                "code": self.error_code,
                "type": type(self).__name__,
                "message": self.message,
            },
        }

        if self.details:
            report["error"]["details"] = self.details

        return report


# =============================================================================
# Configuration errors
# =============================================================================


class ValidationError(EngineError):
    """Raised when a configuration or argument fails validation."""

    exit_code = 2
    default_code = ErrorCode.VALIDATION_FAILED

    def __init__(
        self,
        message: str = "Validation failed",
        field: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
        error_code: Optional[str] = None,
    ):
        error_details = dict(details or {})
        if field:
            error_details["field"] = field
        super().__init__(message, error_code=error_code, details=error_details)


class InvalidParameter(ValidationError):
    """Raised when a model parameter lies outside its admissible range."""

    default_code = ErrorCode.INVALID_PARAMETER


# =============================================================================
# Data errors
# =============================================================================


class DataError(EngineError):
    """Base class for problems with the input data."""

    exit_code = 3


class LengthMismatch(DataError):
    default_code = ErrorCode.LENGTH_MISMATCH


class YearIndexError(DataError):
    """Raised when the year index is not strictly increasing."""


class DuplicateYear(YearIndexError):
    default_code = ErrorCode.DUPLICATE_YEAR


class UnorderedYears(YearIndexError):
    default_code = ErrorCode.UNORDERED_YEARS


class DuplicateVariable(DataError):
    default_code = ErrorCode.DUPLICATE_VARIABLE


class UnknownVariable(DataError):
    default_code = ErrorCode.UNKNOWN_VARIABLE

    def __init__(self, variable: str, available: Optional[list] = None):
        details: Dict[str, Any] = {"variable": variable}
        if available is not None:
            details["available"] = list(available)
        super().__init__(f"Unknown variable '{variable}'", details=details)


class NonPositiveValue(DataError):
    """Raised when a log-family transform meets a value that is not strictly positive."""

    default_code = ErrorCode.NON_POSITIVE_VALUE


class DegenerateSeries(DataError):
    default_code = ErrorCode.DEGENERATE_SERIES


class EmptyResult(DataError):
    default_code = ErrorCode.EMPTY_RESULT


class ParseError(DataError):
    """Raised when a dataset cell or header cannot be parsed."""

    default_code = ErrorCode.PARSE_ERROR

    def __init__(
        self,
        message: str,
        row: Optional[int] = None,
        column: Optional[str] = None,
        error_code: Optional[str] = None,
    ):
        details: Dict[str, Any] = {}
        if row is not None:
            details["row"] = row
        if column is not None:
            details["column"] = column
        super().__init__(message, error_code=error_code, details=details)


class MissingCell(ParseError):
    default_code = ErrorCode.MISSING_CELL


class UnknownCountry(DataError):
    default_code = ErrorCode.UNKNOWN_COUNTRY

    def __init__(self, country: str, available: Optional[list] = None):
        details: Dict[str, Any] = {"country": country}
        if available is not None:
            details["available"] = sorted(available)
        super().__init__(f"Unknown country '{country}'", details=details)


class InsufficientObservations(DataError):
    default_code = ErrorCode.INSUFFICIENT_OBSERVATIONS

    def __init__(self, message: str, required: int, available: int):
        super().__init__(message, details={"required": required, "available": available})


# =============================================================================
# Numerical errors
# =============================================================================


class NumericalError(EngineError):
    """Base class for numerical failures."""

    exit_code = 4


class ShapeMismatch(NumericalError):
    default_code = ErrorCode.SHAPE_MISMATCH


class RankDeficient(NumericalError):
    default_code = ErrorCode.RANK_DEFICIENT


class NotSymmetric(NumericalError):
    default_code = ErrorCode.NOT_SYMMETRIC


class NotPositiveDefinite(NumericalError):
    default_code = ErrorCode.NOT_POSITIVE_DEFINITE


class NoConvergence(NumericalError):
    default_code = ErrorCode.NO_CONVERGENCE


class BootstrapFailed(NumericalError):
    default_code = ErrorCode.BOOTSTRAP_FAILED


class DomainError(NumericalError):
    """Raised when a model equation is evaluated outside its domain."""

    default_code = ErrorCode.DOMAIN_ERROR
