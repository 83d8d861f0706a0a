# main.py
# Thin adapter so `python main.py <command>` runs the CLI without installing.

from __future__ import annotations

from app.cli import cli


if __name__ == "__main__":
    cli()
