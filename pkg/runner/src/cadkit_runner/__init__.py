"""Isolated one-shot executor for generated CAD scripts."""

from .runner import DEFAULT_TIMEOUT, main, run_script

__version__ = "0.1.0"

__all__ = ["DEFAULT_TIMEOUT", "main", "run_script"]
