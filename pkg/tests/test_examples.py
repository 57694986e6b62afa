"""Volledige runs van de voorbeeldconfiguraties (traag, standaard uitgeschakeld)."""

from __future__ import annotations

from pathlib import Path

import pytest

from embedded_eigen.app.main import EXIT_CONTRACT, EXIT_PASS, main
from embedded_eigen.data_access.store import read_csv, read_json

EXAMPLES = Path(__file__).resolve().parents[1] / "config" / "examples"

pytestmark = pytest.mark.slow


def test_free_two_eigenvalues_synthesize(tmp_path: Path):
    """Test de continue synthese voor E = 1, 2: alle records gelden en de bestanden bestaan."""
    print("\n=== Acceptance: free_two_eigenvalues ===")

    code = main(
        [
            "synthesize",
            "--config",
            str(EXAMPLES / "free_two_eigenvalues.toml"),
            "--out",
            str(tmp_path),
        ]
    )

    assert code == EXIT_PASS
    report = read_json(tmp_path / "report.json")
    assert report["pass"] is True
    assert report["schedule"]["epochs"][-1]["J"] == 15200
    for name in ("potential.csv", "trajectory_0.csv", "trajectory_1.csv"):
        assert (tmp_path / name).exists()
    _, columns, values = read_csv(tmp_path / "trajectory_0.csv")
    assert columns == ["x", "lnR", "theta"]
    assert values[-1, 1] < -5.0
    print(f"✓ lnR(J_W) for E=1: {values[-1, 1]:.3f}")


def test_jacobi_two_eigenvalues_verify(tmp_path: Path):
    """Test de discrete keten voor k = 1.0 en 1.3 over vier epochs."""
    code = main(
        [
            "verify",
            "--config",
            str(EXAMPLES / "jacobi_two_eigenvalues.toml"),
            "--out",
            str(tmp_path),
        ]
    )

    assert code == EXIT_PASS
    report = read_json(tmp_path / "report.json")
    assert report["experiment"] == "embedding_finite"
    assert report["quasimomenta"]["half_band"] is True


@pytest.mark.parametrize("name", ["no_embedding.toml", "jacobi_no_embedding.toml"])
def test_no_embedding_examples_pass(name: str, tmp_path: Path):
    """Test de ondergrens R >= x^{-1/3} voor de kleine-storing-voorbeelden."""
    code = main(["verify", "--config", str(EXAMPLES / name), "--out", str(tmp_path)])

    assert code == EXIT_PASS
    assert read_json(tmp_path / "report.json")["pass"] is True


def _verify_infinite(name: str, out: Path) -> tuple[int, dict, dict[str, list[dict]]]:
    code = main(["verify", "--config", str(EXAMPLES / name), "--out", str(out)])
    report = read_json(out / "report.json")
    by_anchor: dict[str, list[dict]] = {}
    for record in report["records"]:
        by_anchor.setdefault(record["anchor"], []).append(record)
    return code, report, by_anchor


def test_infinite_log_envelope_and_contracts(tmp_path: Path):
    """Test dat onder h = ln(2+x) de omhullende, het schema en de epoch-contracten gelden."""
    print("\n=== Acceptance: infinite_log ===")

    code, report, by_anchor = _verify_infinite("infinite_log.toml", tmp_path)

    assert report["experiment"] == "embedding_infinite"
    epochs = report["schedule"]["epochs"]
    assert [e["N"] for e in epochs] == [1, 1, 1, 2, 2, 3, 3]
    assert [e["J"] for e in epochs] == [500, 1500, 3500, 11500, 27500, 75500, 171500]
    assert len(by_anchor["assembly.h_envelope"]) == 6
    for anchor in ("schedule.h", "schedule.ratio", "schedule.length", "assembly.h_envelope"):
        assert all(r["holds"] for r in by_anchor[anchor]), anchor
    assert by_anchor["epoch.contract"]
    assert all(r["holds"] for r in by_anchor["epoch.contract"])
    failing = {r["anchor"] for r in report["records"] if not r["holds"]}
    assert not failing & {"assembly.envelope", "assembly.h_envelope", "epoch.contract"}
    assert code == (EXIT_PASS if not failing else EXIT_CONTRACT)
    print(f"✓ envelope and contracts hold, failing anchors: {sorted(failing)}")


def test_infinite_log_scaled_passes(tmp_path: Path):
    """Test de oneindige modus onder h = 8·ln(2+x): alle records gelden over zes epochs."""
    print("\n=== Acceptance: infinite_log_scaled ===")

    code, report, by_anchor = _verify_infinite("infinite_log_scaled.toml", tmp_path)

    assert code == EXIT_PASS
    assert report["pass"] is True
    epochs = report["schedule"]["epochs"]
    assert [e["J"] for e in epochs] == [500, 1500, 3500, 11500, 27500, 75500, 171500]
    for anchor in ("schedule.h", "schedule.ratio", "schedule.length", "assembly.h_envelope"):
        assert len(by_anchor[anchor]) == 6
    ratios = [r["lhs"] for r in by_anchor["l2.epoch_ratio"]]
    assert len(ratios) == 5 + 3 + 1
    assert max(ratios) < 0.5
    print(f"✓ worst L2 ratio {max(ratios):.3f}")
