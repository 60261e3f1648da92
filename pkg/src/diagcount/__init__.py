"""Exact solution counts for diagonal equations over finite fields."""

from __future__ import annotations

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("diagcount")
except PackageNotFoundError:  # pragma: no cover - during local dev
    __version__ = "0.1.0"

SCHEMA_VERSION = "diagcount/1"

__all__ = ["SCHEMA_VERSION", "__version__"]
