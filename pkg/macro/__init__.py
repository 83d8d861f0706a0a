# macro/__init__.py
"""
Macro Engine Package

Domain engine behind the countercycle CLI:
- timeseries: annual country panels and transforms
- numerics: least squares, Cholesky, spectral radius
- var: VAR estimation, impulse responses, bootstrap bands, lag selection
- dsge: utility, production, budget constraint, Taylor rule, simulation

Importable without the application layer.
"""

from pathlib import Path

from macro.errors import DataError, EngineError, NumericalError, ValidationError

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_DATASET = DATA_DIR / "country_panels.csv"

__all__ = [
    "DATA_DIR",
    "DEFAULT_DATASET",
    "DataError",
    "EngineError",
    "NumericalError",
    "ValidationError",
]
