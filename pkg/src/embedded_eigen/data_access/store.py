"""Resultaatbestanden: CSV voor rijen, JSON voor rapporten.

Elk bestand begint met een kopregel ``# embedded-eigen <versie> config=<hash>``
en wordt atomair geschreven (tijdelijk bestand in de doelmap + ``os.replace``).
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from embedded_eigen.app.version import TOOL_NAME, __version__

from .exceptions import DataFileNotFoundError, DataParseError, DataPermissionError

logger = logging.getLogger(__name__)

HEADER_PREFIX = "#"


def header_line(config_hash: str) -> str:
    return f"{HEADER_PREFIX} {TOOL_NAME} {__version__} config={config_hash}"


def _format(value: Any) -> str:
    if isinstance(value, float | np.floating):
        return f"{float(value):.17g}"
    return str(value)


class ResultStore:
    """Schrijft en leest de uitvoer van een run onder een vaste map."""

    def __init__(self, output_dir: Path, config_hash: str) -> None:
        self._output_dir = output_dir
        self._config_hash = config_hash

    @property
    def output_dir(self) -> Path:
        return self._output_dir

    @property
    def header(self) -> str:
        return header_line(self._config_hash)

    def _write_atomic(self, filename: str, text: str) -> Path:
        """Schrijf text naar filename via een tijdelijk bestand en rename.

        Raises
        ------
        DataPermissionError
            Als de map of het bestand niet beschrijfbaar is.
        """
        target = self._output_dir / filename
        try:
            self._output_dir.mkdir(parents=True, exist_ok=True)
            fd, tmp_name = tempfile.mkstemp(
                prefix=f".{target.name}.", suffix=".tmp", dir=self._output_dir
            )
            try:
                with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
                os.replace(tmp_name, target)
            except BaseException:
                Path(tmp_name).unlink(missing_ok=True)
                raise
        except PermissionError as e:
            logger.error(f"Permission denied writing {target}: {e}")
            raise DataPermissionError(target) from e
        logger.debug(f"Wrote {target}")
        return target

    def write_csv(
        self, filename: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]
    ) -> Path:
        """CSV met kopregel, kolomnamen en waarden in %.17g (floats)."""
        buffer = io.StringIO()
        buffer.write(self.header + "\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(v) for v in row])
        path = self._write_atomic(filename, buffer.getvalue())
        logger.info(f"Wrote CSV: {path}")
        return path

    def write_columns(
        self, filename: str, columns: dict[str, Sequence[float] | np.ndarray], stride: int = 1
    ) -> Path:
        """Schrijf kolommen van gelijke lengte; stride > 1 dunt de rijen uit."""
        names = list(columns)
        arrays = [np.asarray(columns[name]) for name in names]
        if len({a.shape[0] for a in arrays}) > 1:
            raise ValueError(f"Columns of unequal length for {filename}")
        rows = zip(*(a[::stride] for a in arrays))
        return self.write_csv(filename, names, rows)

    def write_json(self, filename: str, payload: dict[str, Any]) -> Path:
        """JSON-rapport; de kopregel staat in het veld ``header``."""
        data = {"header": self.header, **payload}
        text = json.dumps(data, indent=2, sort_keys=False, allow_nan=True) + "\n"
        path = self._write_atomic(filename, text)
        logger.info(f"Wrote report: {path}")
        return path


def read_csv(filepath: Path) -> tuple[str, list[str], np.ndarray]:
    """Lees een CSV terug: (kopregel, kolomnamen, float-matrix).

    Raises
    ------
    DataFileNotFoundError
        Als het bestand niet bestaat.
    DataParseError
        Bij een ontbrekende kopregel of niet-numerieke waarden.
    """
    if not filepath.exists():
        logger.error(f"Result file not found: {filepath}")
        raise DataFileNotFoundError(filepath)
    with filepath.open("r", encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(HEADER_PREFIX):
            raise DataParseError(filepath, "missing header line", line=1)
        reader = csv.reader(fh)
        try:
            columns = next(reader)
        except StopIteration as e:
            raise DataParseError(filepath, "missing column names", line=2) from e
        rows: list[list[float]] = []
        for number, row in enumerate(reader, start=3):
            try:
                rows.append([float(v) for v in row])
            except ValueError as e:
                logger.error(f"Failed to parse {filepath} at line {number}: {e}")
                raise DataParseError(filepath, e, line=number) from e
    values = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    return header, columns, values


def read_json(filepath: Path) -> dict[str, Any]:
    if not filepath.exists():
        raise DataFileNotFoundError(filepath)
    try:
        with filepath.open("r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        logger.error(f"Failed to parse JSON in {filepath}: {e}")
        raise DataParseError(filepath, e, line=e.lineno, column=e.colno) from e


__all__ = ["ResultStore", "header_line", "read_csv", "read_json"]
