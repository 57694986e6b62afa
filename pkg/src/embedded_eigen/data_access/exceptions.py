"""Custom exceptions voor configuratie- en bestandstoegang.

Deze module definieert specifieke exceptions voor het laden van run-configuraties
en het lezen/schrijven van resultaatbestanden, zodat error handling preciezer en
informatiever kan zijn.
"""

from __future__ import annotations

from pathlib import Path


class DataAccessError(Exception):
    """Base exception voor alle data access errors."""

    pass


class DataFileNotFoundError(DataAccessError):
    """Exception wanneer een bestand niet gevonden wordt."""

    def __init__(self, filepath: Path, message: str | None = None) -> None:
        self.filepath = filepath
        self.message = message or f"Data file not found: {filepath}"
        super().__init__(self.message)


def _location(line: int | None, column: int | None) -> str:
    if line is None:
        return ""
    text = f" at line {line}"
    if column is not None:
        text += f", column {column}"
    return text


class DataParseError(DataAccessError):
    """Exception wanneer een CSV- of JSON-resultaatbestand niet te parsen is."""

    def __init__(
        self,
        filepath: Path,
        original_error: Exception | str,
        line: int | None = None,
        column: int | None = None,
    ) -> None:
        self.filepath = filepath
        self.original_error = original_error
        self.line = line
        self.column = column
        self.message = f"Failed to parse {filepath}{_location(line, column)}: {original_error}"
        super().__init__(self.message)


class ConfigError(DataAccessError):
    """Exception voor ongeldige run-configuraties (syntax, onbekende keys, types)."""

    def __init__(
        self,
        filepath: Path | None,
        problem: str,
        line: int | None = None,
        column: int | None = None,
    ) -> None:
        self.filepath = filepath
        self.problem = problem
        self.line = line
        self.column = column
        source = str(filepath) if filepath is not None else "<config>"
        self.message = f"Config error in {source}{_location(line, column)}: {problem}"
        super().__init__(self.message)


class DataPermissionError(DataAccessError):
    """Exception wanneer een bestand niet gelezen of geschreven kan worden."""

    def __init__(self, filepath: Path) -> None:
        self.filepath = filepath
        self.message = f"Permission denied for file: {filepath}"
        super().__init__(self.message)


__all__ = [
    "DataAccessError",
    "DataFileNotFoundError",
    "DataParseError",
    "ConfigError",
    "DataPermissionError",
]
