# app/utils/validation.py
"""
Input Validation

This module provides schema-based validation of configuration documents
with type checking, required fields, numeric ranges, allowed values and
rejection of unknown keys at every nesting level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Set, Type, Union

from macro.errors import ErrorCode, ValidationError


@dataclass
class FieldValidator:
    """Validator for a single key of a configuration section."""

    name: str
    field_type: Type = str
    required: bool = False
    min_value: Optional[Union[int, float]] = None
    max_value: Optional[Union[int, float]] = None
    exclusive_bounds: bool = False
    allowed_values: Optional[Set[Any]] = None
    item_type: Optional[Type] = None
    allow_list: bool = False
    min_items: Optional[int] = None
    custom_validator: Optional[Callable[[Any], bool]] = None
    custom_error: Optional[str] = None
    lowercase: bool = False
    default: Any = None

    def _coerce(self, value: Any, target: Type, label: str) -> Any:
        # TOML booleans are ints to Python; keep them apart.
        if target is bool:
            if not isinstance(value, bool):
                raise ValidationError(message=f"{label} must be true or false", field=label)
            return value
        if target is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValidationError(message=f"{label} must be an integer", field=label)
            return value
        if target is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(message=f"{label} must be a number", field=label)
            if not math.isfinite(value):
                raise ValidationError(message=f"{label} must be finite", field=label)
            return float(value)
        if target is str:
            if not isinstance(value, str):
                raise ValidationError(message=f"{label} must be a string", field=label)
            value = value.strip()
            return value.lower() if self.lowercase else value
        if target is dict:
            if not isinstance(value, dict):
                raise ValidationError(message=f"{label} must be a table", field=label)
            return value
        if target is list:
            if not isinstance(value, list):
                raise ValidationError(message=f"{label} must be a list", field=label)
            return value
        raise TypeError(f"Unsupported field type {target!r}")

    def _check_range(self, value: Any, label: str) -> None:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            return
        if self.min_value is not None:
            too_small = value <= self.min_value if self.exclusive_bounds else value < self.min_value
            if too_small:
                relation = "greater than" if self.exclusive_bounds else "at least"
                raise ValidationError(message=f"{label} must be {relation} {self.min_value}", field=label)
        if self.max_value is not None:
            too_large = value >= self.max_value if self.exclusive_bounds else value > self.max_value
            if too_large:
                relation = "less than" if self.exclusive_bounds else "at most"
                raise ValidationError(message=f"{label} must be {relation} {self.max_value}", field=label)

    def validate(self, value: Any, label: Optional[str] = None) -> Any:
        """
        Validate and transform a value.

        Raises:
            ValidationError: If validation fails
        """
        label = label or self.name
        if value is None:
            if self.required:
                raise ValidationError(message=f"{label} is required", field=label)
            return self.default

        if self.allow_list and isinstance(value, list):
            if self.min_items is not None and len(value) < self.min_items:
                raise ValidationError(message=f"{label} needs at least {self.min_items} entries", field=label)
            items = [self._coerce(item, self.field_type, f"{label}[{i}]") for i, item in enumerate(value)]
            for i, item in enumerate(items):
                self._check_range(item, f"{label}[{i}]")
            value = items
        else:
            value = self._coerce(value, self.field_type, label)
            if self.field_type is list:
                if self.min_items is not None and len(value) < self.min_items:
                    raise ValidationError(
                        message=f"{label} needs at least {self.min_items} entries", field=label
                    )
                if self.item_type is not None:
                    value = [
                        self._coerce(item, self.item_type, f"{label}[{i}]") for i, item in enumerate(value)
                    ]
            self._check_range(value, label)

        if self.allowed_values is not None:
            candidates = value if isinstance(value, list) else [value]
            for candidate in candidates:
                if candidate not in self.allowed_values:
                    raise ValidationError(
                        message=f"{label} must be one of: {', '.join(sorted(str(v) for v in self.allowed_values))}",
                        field=label,
                        details={"allowed_values": sorted(str(v) for v in self.allowed_values)},
                    )

        if self.custom_validator is not None and not self.custom_validator(value):
            raise ValidationError(message=self.custom_error or f"{label} is invalid", field=label)

        return value


def integer_field(
    name: str,
    required: bool = False,
    min_value: Optional[int] = None,
    max_value: Optional[int] = None,
    default: Optional[int] = None,
) -> FieldValidator:
    """Create an integer field validator."""
    return FieldValidator(
        name=name,
        field_type=int,
        required=required,
        min_value=min_value,
        max_value=max_value,
        default=default,
    )


def number_field(
    name: str,
    required: bool = False,
    min_value: Optional[float] = None,
    max_value: Optional[float] = None,
    exclusive_bounds: bool = False,
    allow_list: bool = False,
    default: Optional[float] = None,
) -> FieldValidator:
    """Create a float field validator; allow_list also accepts a list of numbers."""
    return FieldValidator(
        name=name,
        field_type=float,
        required=required,
        min_value=min_value,
        max_value=max_value,
        exclusive_bounds=exclusive_bounds,
        allow_list=allow_list,
        default=default,
    )


def text_field(name: str, required: bool = False, default: Optional[str] = None) -> FieldValidator:
    """Create a text field validator."""
    return FieldValidator(name=name, field_type=str, required=required, default=default)


def boolean_field(name: str, required: bool = False, default: bool = False) -> FieldValidator:
    """Create a boolean field validator."""
    return FieldValidator(name=name, field_type=bool, required=required, default=default)


def enum_field(
    name: str,
    allowed_values: Set[Any],
    required: bool = False,
    default: Optional[str] = None,
) -> FieldValidator:
    """Create an enum field validator."""
    return FieldValidator(
        name=name,
        field_type=str,
        required=required,
        allowed_values=allowed_values,
        lowercase=True,
        default=default,
    )


@dataclass
class ValidationSchema:
    """
    Schema for one table of a configuration document.

    Keys not named by a field or a sub-section are errors, unless
    `open_keys` is set, in which case every key is validated with it.
    """

    fields: List[FieldValidator] = field(default_factory=list)
    sections: Dict[str, "ValidationSchema"] = field(default_factory=dict)
    open_keys: Optional[FieldValidator] = None

    def _collect(self, data: Any, prefix: str, errors: List[Dict[str, Any]]) -> Dict[str, Any]:
        if not isinstance(data, dict):
            errors.append({"field": prefix or "<root>", "message": f"{prefix or 'document'} must be a table"})
            return {}

        validated: Dict[str, Any] = {}
        if self.open_keys is not None:
            for key, value in data.items():
                label = f"{prefix}.{key}" if prefix else key
                try:
                    validated[key] = self.open_keys.validate(value, label)
                except ValidationError as e:
                    errors.append({"field": label, "message": e.message})
            return validated

        known = {validator.name for validator in self.fields} | set(self.sections)
        for key in data:
            if key not in known:
                label = f"{prefix}.{key}" if prefix else key
                errors.append({"field": label, "message": f"unknown key '{label}'", "code": ErrorCode.UNKNOWN_KEY})

        for validator in self.fields:
            label = f"{prefix}.{validator.name}" if prefix else validator.name
            try:
                validated[validator.name] = validator.validate(data.get(validator.name), label)
            except ValidationError as e:
                errors.append({"field": label, "message": e.message})

        for name, schema in self.sections.items():
            if name in data:
                label = f"{prefix}.{name}" if prefix else name
                validated[name] = schema._collect(data[name], label, errors)

        return validated

    def validate(self, data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Validate a document against the schema.

        Returns:
            Validated values; absent optional keys map to their defaults and
            absent sections are omitted.

        Raises:
            ValidationError: listing every failing field
        """
        errors: List[Dict[str, Any]] = []
        validated = self._collect(data, "", errors)

        if errors:
            unknown_only = all(error.get("code") == ErrorCode.UNKNOWN_KEY for error in errors)
            raise ValidationError(
                message="Invalid run configuration: " + "; ".join(error["message"] for error in errors),
                details={"errors": errors},
                error_code=ErrorCode.UNKNOWN_KEY if unknown_only else None,
            )

        return validated
