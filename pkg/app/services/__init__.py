# app/services/__init__.py
"""
Services Package

This package provides the pipelines that sit between the CLI and the
macro engine.

Services:
- dataset_service: Country-panel CSV loading and writing
- run_service: Estimation, IRF, report, simulation and sign-check runs
"""
