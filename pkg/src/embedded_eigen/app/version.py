"""Versie-informatie van het pakket."""

from __future__ import annotations

__version__ = "0.1.0"
TOOL_NAME = "embedded-eigen"

__all__ = ["__version__", "TOOL_NAME"]
