# tests/__init__.py
"""
Test Package

This package contains all tests for the countercycle engine and CLI:
- Unit tests for the macro engine
- Integration tests for the CLI commands (marked `integration`)
- Long-running bootstrap checks (marked `slow`)
"""
