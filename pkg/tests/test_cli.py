"""Tests voor de command-line: exit codes, overrides en geschreven bestanden."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from embedded_eigen.app.main import (
    EXIT_CONFIG,
    EXIT_CONTRACT,
    EXIT_NUMERIC,
    EXIT_PASS,
    build_parser,
    main,
)
from embedded_eigen.core.exceptions import IntegrationError
from embedded_eigen.data_access.store import read_csv, read_json
from embedded_eigen.services.pipeline import PipelineService

EXAMPLES = Path(__file__).resolve().parents[1] / "config" / "examples"


def _write_config(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "run.toml"
    path.write_text(text, encoding="utf-8")
    return path


def test_bands_command_writes_tables(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    """Test dat 'bands' bands.csv en quasimomentum.csv schrijft met de vrije randen."""
    print("\n=== Test 1: bands command ===")

    code = main(
        [
            "bands",
            "--config",
            str(EXAMPLES / "free_bands.toml"),
            "--out",
            str(tmp_path),
            "--policy",
            "points_per_unit=100",
        ]
    )

    assert code == EXIT_PASS
    header, columns, values = read_csv(tmp_path / "bands.csv")
    assert header.startswith("# embedded-eigen")
    assert columns == ["band_index", "c", "d"]
    np.testing.assert_allclose(values[:, 1], [0.0, math.pi**2, 4.0 * math.pi**2], atol=1e-6)
    _, k_columns, samples = read_csv(tmp_path / "quasimomentum.csv")
    assert k_columns == ["E", "k"]
    assert samples.shape == (30, 2)
    assert str(tmp_path / "bands.csv") in capsys.readouterr().out
    assert " bands config=" in (tmp_path / "run.log").read_text(encoding="utf-8")
    print(f"✓ {len(values)} bands")


def test_unknown_key_exits_with_config_code(tmp_path: Path):
    """Test dat een onbekende key exit code 2 geeft."""
    config = _write_config(tmp_path, "[policy]\nunknown = 1\n")

    assert main(["bands", "--config", str(config), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_missing_config_exits_with_config_code(tmp_path: Path):
    """Test dat een ontbrekend configbestand exit code 2 geeft."""
    assert main(["bands", "--config", str(tmp_path / "absent.toml")]) == EXIT_CONFIG


def test_synthesize_without_targets_exits_with_config_code(tmp_path: Path):
    """Test dat synthese zonder eigenwaarden ('empty target set') exit code 2 geeft."""
    config = _write_config(tmp_path, "# alleen standaardwaarden\n")

    assert main(["synthesize", "--config", str(config), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert not (tmp_path / "report.json").exists()


def test_resonant_targets_exit_with_config_code(tmp_path: Path):
    """Test dat E = 0.5 en -0.5 op de vrije Jacobi-operator geweigerd worden."""
    config = _write_config(
        tmp_path, '[operator]\nkind = "jacobi"\n\n[targets]\neigenvalues = [0.5, -0.5]\n'
    )

    assert main(["synthesize", "--config", str(config), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_verify_no_embedding_writes_report(tmp_path: Path):
    """Test dat verify een report.json met kopregel en pass-veld schrijft."""
    config = _write_config(
        tmp_path,
        '[operator]\nkind = "jacobi"\n\n[targets]\neigenvalues = [0.5]\n\n'
        '[run]\nexperiment = "no_embedding"\nhorizon = 2000.0\n\n'
        '[perturbation]\nkind = "sin"\n',
    )

    code = main(["verify", "--config", str(config), "--out", str(tmp_path)])

    assert code == EXIT_PASS
    report = read_json(tmp_path / "report.json")
    assert report["header"].startswith("# embedded-eigen")
    assert report["experiment"] == "no_embedding_jacobi"
    assert report["pass"] is True


def test_failed_inequality_exits_with_contract_code(tmp_path: Path):
    """Test dat een geschonden ondergrens (negatieve slack) exit code 1 geeft."""
    config = _write_config(
        tmp_path,
        '[operator]\nkind = "jacobi"\n\n[targets]\neigenvalues = [0.5]\n\n'
        '[run]\nexperiment = "no_embedding"\nhorizon = 500.0\n',
    )

    code = main(
        [
            "verify",
            "--config",
            str(config),
            "--out",
            str(tmp_path),
            "--policy",
            "lower_bound_slack=-1.0",
        ]
    )

    assert code == EXIT_CONTRACT
    assert read_json(tmp_path / "report.json")["pass"] is False


def test_policy_override_must_be_key_value():
    """Test dat --policy zonder '=' door argparse wordt geweigerd."""
    with pytest.raises(SystemExit) as exc_info:
        build_parser().parse_args(["bands", "--policy", "t0"])

    assert exc_info.value.code == 2


def test_mode_and_epochs_flags_are_parsed():
    """Test dat de gedeelde vlaggen op elk subcommando beschikbaar zijn."""
    args = build_parser().parse_args(["verify", "--mode", "infinite", "--epochs", "3"])

    assert args.command == "verify"
    assert args.mode == "infinite"
    assert args.epochs == 3
    assert args.policy == []


def test_strict_run_aborts_on_first_failed_inequality(tmp_path: Path):
    """Test dat run.strict bij een geschonden ondergrens afbreekt zonder report.json."""
    config = _write_config(
        tmp_path,
        '[operator]\nkind = "jacobi"\n\n[targets]\neigenvalues = [0.5]\n\n'
        '[run]\nexperiment = "no_embedding"\nhorizon = 500.0\nstrict = true\n',
    )

    code = main(
        [
            "verify",
            "--config",
            str(config),
            "--out",
            str(tmp_path),
            "--policy",
            "lower_bound_slack=-1.0",
        ]
    )

    assert code == EXIT_CONTRACT
    assert not (tmp_path / "report.json").exists()
    assert "Contract violated" in (tmp_path / "run.log").read_text(encoding="utf-8")


def test_energy_outside_bands_exits_with_config_code(tmp_path: Path):
    """Test dat een doelenergie buiten de banden als ongeldige invoer telt."""
    config = _write_config(
        tmp_path, '[operator]\nkind = "jacobi"\n\n[targets]\neigenvalues = [3.0]\n'
    )

    assert main(["synthesize", "--config", str(config), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_integration_failure_exits_with_numeric_code(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
):
    """Test dat een falende integratie exit code 3 geeft en niet als configfout telt."""

    def failing_verify(self: PipelineService) -> None:
        raise IntegrationError("run_stage", "step size underflow")

    monkeypatch.setattr(PipelineService, "verify", failing_verify)
    config = _write_config(tmp_path, "# alleen standaardwaarden\n")

    code = main(["verify", "--config", str(config), "--out", str(tmp_path)])

    assert code == EXIT_NUMERIC
    assert "Numerical failure" in (tmp_path / "run.log").read_text(encoding="utf-8")
