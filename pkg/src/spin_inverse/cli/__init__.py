"""Command-line interface for spin-inverse."""

from spin_inverse.cli.main import main, parse_config

__all__ = ["main", "parse_config"]
