"""Tests voor ResultStore: kopregel, atomaire writes en teruglezen."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from embedded_eigen.app.version import __version__
from embedded_eigen.data_access.exceptions import DataFileNotFoundError, DataParseError
from embedded_eigen.data_access.store import ResultStore, header_line, read_csv, read_json


@pytest.fixture
def store(tmp_path: Path) -> ResultStore:
    """ResultStore in een tijdelijke uitvoermap."""
    return ResultStore(tmp_path / "out", "abc123def456")


def test_header_line_format():
    """Test dat de kopregel tool, versie en confighash bevat."""
    assert header_line("0123456789ab") == f"# embedded-eigen {__version__} config=0123456789ab"


def test_write_csv_creates_directory_and_header(store: ResultStore):
    """Test dat write_csv de map aanmaakt en met de kopregel begint."""
    print("\n=== Test 1: CSV header ===")

    path = store.write_csv("bands.csv", ("band_index", "c", "d"), [(0, 0.0, 0.5)])
    lines = path.read_text(encoding="utf-8").splitlines()

    assert path.parent == store.output_dir
    assert lines[0] == store.header
    assert lines[1] == "band_index,c,d"
    assert lines[2] == "0,0,0.5"
    print(f"✓ Wrote {path.name} with header {lines[0]!r}")


def test_floats_keep_full_precision(store: ResultStore):
    """Test dat floats met 17 significante cijfers worden geschreven."""
    value = 1.0 / 3.0
    path = store.write_columns("x.csv", {"x": np.array([value])})

    _, _, values = read_csv(path)

    assert values[0, 0] == value


def test_write_columns_applies_stride(store: ResultStore):
    """Test dat stride de rijen uitdunt."""
    x = np.arange(10.0)
    path = store.write_columns("traj.csv", {"x": x, "lnR": -x}, stride=3)

    header, columns, values = read_csv(path)

    assert header == store.header
    assert columns == ["x", "lnR"]
    np.testing.assert_array_equal(values[:, 0], [0.0, 3.0, 6.0, 9.0])
    np.testing.assert_array_equal(values[:, 1], [-0.0, -3.0, -6.0, -9.0])


def test_write_columns_rejects_unequal_lengths(store: ResultStore):
    """Test dat kolommen van ongelijke lengte worden geweigerd."""
    with pytest.raises(ValueError, match="unequal length"):
        store.write_columns("bad.csv", {"a": [1.0, 2.0], "b": [1.0]})


def test_atomic_write_leaves_no_temporary_files(store: ResultStore):
    """Test dat na een write alleen het doelbestand in de map staat."""
    store.write_csv("one.csv", ("a",), [(1.0,)])
    store.write_csv("one.csv", ("a",), [(2.0,)])

    names = sorted(p.name for p in store.output_dir.iterdir())

    assert names == ["one.csv"]
    _, _, values = read_csv(store.output_dir / "one.csv")
    assert values[0, 0] == 2.0


def test_write_json_embeds_header(store: ResultStore):
    """Test dat het JSON-rapport de kopregel in het veld header draagt."""
    path = store.write_json("report.json", {"experiment_id": "demo", "pass": True})

    data = read_json(path)

    assert data["header"] == store.header
    assert data["experiment_id"] == "demo"
    assert data["pass"] is True


def test_read_csv_missing_file(tmp_path: Path):
    """Test dat een ontbrekend bestand DataFileNotFoundError geeft."""
    with pytest.raises(DataFileNotFoundError):
        read_csv(tmp_path / "nope.csv")


def test_read_csv_without_header(tmp_path: Path):
    """Test dat een CSV zonder kopregel wordt geweigerd."""
    path = tmp_path / "plain.csv"
    path.write_text("x,y\n1,2\n", encoding="utf-8")

    with pytest.raises(DataParseError) as exc_info:
        read_csv(path)

    assert exc_info.value.line == 1


def test_read_csv_with_non_numeric_value(tmp_path: Path):
    """Test dat een niet-numerieke waarde het regelnummer meegeeft."""
    path = tmp_path / "broken.csv"
    path.write_text("# embedded-eigen\nx,y\n1,2\n3,abc\n", encoding="utf-8")

    with pytest.raises(DataParseError) as exc_info:
        read_csv(path)

    assert exc_info.value.line == 4


def test_read_json_invalid(tmp_path: Path):
    """Test dat ongeldige JSON een DataParseError met positie geeft."""
    path = tmp_path / "report.json"
    path.write_text('{"a": 1,,}', encoding="utf-8")

    with pytest.raises(DataParseError) as exc_info:
        read_json(path)

    assert exc_info.value.line == 1
