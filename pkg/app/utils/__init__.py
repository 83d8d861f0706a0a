# app/utils/__init__.py
"""
Utility Package

This package provides common utilities including:
- Config-document validation
- Error-to-exit-code handling
- SVG rendering
"""

from app.utils.errors import exit_code_for, handle_errors
from app.utils.svg import render_irf_svg
from app.utils.validation import FieldValidator, ValidationSchema

__all__ = [
    "FieldValidator",
    "ValidationSchema",
    "exit_code_for",
    "handle_errors",
    "render_irf_svg",
]
