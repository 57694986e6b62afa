"""Tests voor RunConfig: laden, foutmeldingen met regelnummers, overrides en hash."""

from __future__ import annotations

from pathlib import Path

import pytest

from embedded_eigen.core.config import RunConfig, ScalingPolicy, parse_scalar
from embedded_eigen.data_access.exceptions import ConfigError, DataFileNotFoundError

CONFIG_DIR = Path(__file__).parent.parent / "config"


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "run.toml"
    path.write_text(text, encoding="utf-8")
    return path


def test_default_config_matches_dataclass_defaults():
    """Test dat default_config.toml precies de dataclass-defaults beschrijft."""
    print("\n=== Test 1: Default config matches defaults ===")

    loaded = RunConfig.load(CONFIG_DIR / "default_config.toml")

    assert loaded.to_dict() == RunConfig().to_dict()
    assert loaded.config_hash() == RunConfig().config_hash()
    print(f"✓ Defaults match, config={loaded.config_hash()}")


def test_all_example_configs_load():
    """Test dat alle voorbeeldconfigs zonder fouten laden."""
    paths = sorted((CONFIG_DIR / "examples").glob("*.toml"))

    assert paths, "Expected example configs"
    for path in paths:
        config = RunConfig.load(path)
        assert config.source == path


def test_unknown_key_reports_line(tmp_path: Path):
    """Test dat een onbekende key wordt geweigerd met het juiste regelnummer."""
    path = _write(tmp_path, "[policy]\nt0 = 100\nbogus = 3\n")

    with pytest.raises(ConfigError) as exc_info:
        RunConfig.load(path)

    assert exc_info.value.line == 3
    assert "unknown key 'bogus'" in str(exc_info.value)


def test_run_section_has_strict_flag_and_no_seed(tmp_path: Path):
    """Test dat [run] strict leest en de oude seed-key weigert."""
    config = RunConfig.load(_write(tmp_path, "[run]\nstrict = true\n"))

    assert config.run.strict is True
    assert RunConfig().run.strict is False
    with pytest.raises(ConfigError, match="unknown key 'seed'"):
        RunConfig.load(_write(tmp_path, "[run]\nseed = 0\n"))


def test_unknown_section_is_rejected(tmp_path: Path):
    """Test dat een onbekende sectie wordt geweigerd."""
    path = _write(tmp_path, "[run]\nepochs = 2\n\n[extras]\nx = 1\n")

    with pytest.raises(ConfigError) as exc_info:
        RunConfig.load(path)

    assert exc_info.value.line == 4
    assert "unknown section [extras]" in exc_info.value.problem


def test_toml_syntax_error_has_line_and_column(tmp_path: Path):
    """Test dat een TOML-syntaxfout regel en kolom meegeeft."""
    path = _write(tmp_path, "[run]\nepochs = = 2\n")

    with pytest.raises(ConfigError) as exc_info:
        RunConfig.load(path)

    assert exc_info.value.line == 2
    assert exc_info.value.column is not None
    assert "invalid TOML" in exc_info.value.problem


def test_wrong_type_is_rejected(tmp_path: Path):
    """Test dat een verkeerd type (string voor int) wordt geweigerd."""
    path = _write(tmp_path, '[run]\nepochs = "four"\n')

    with pytest.raises(ConfigError, match="run.epochs expects int"):
        RunConfig.load(path)


def test_invalid_choice_is_rejected(tmp_path: Path):
    """Test dat een ongeldige keuze voor run.mode wordt geweigerd."""
    path = _write(tmp_path, '[run]\nmode = "forever"\n')

    with pytest.raises(ConfigError, match="run.mode must be one of"):
        RunConfig.load(path)


def test_integer_is_accepted_for_float_key(tmp_path: Path):
    """Test dat een int voor een float-key wordt omgezet."""
    path = _write(tmp_path, "[policy]\nk_min = 500\n\n[targets]\neigenvalues = [1, 2.5]\n")

    config = RunConfig.load(path)

    assert isinstance(config.policy.k_min, float)
    assert config.policy.k_min == 500.0
    assert config.targets.eigenvalues == [1.0, 2.5]


def test_missing_file_raises(tmp_path: Path):
    """Test dat een ontbrekend configbestand DataFileNotFoundError geeft."""
    with pytest.raises(DataFileNotFoundError):
        RunConfig.load(tmp_path / "missing.toml")


def test_jacobi_rows_must_match(tmp_path: Path):
    """Test dat operator.a en operator.b even lang moeten zijn."""
    path = _write(tmp_path, '[operator]\nkind = "jacobi"\na = [1.0, 2.0]\nb = [0.0]\n')

    with pytest.raises(ConfigError, match="equal length"):
        RunConfig.load(path)


def test_angles_must_match_eigenvalues(tmp_path: Path):
    """Test dat het aantal randhoeken gelijk moet zijn aan het aantal eigenwaarden."""
    path = _write(tmp_path, "[targets]\neigenvalues = [1.0, 2.0]\nangles = [0.5]\n")

    with pytest.raises(ConfigError, match="targets.angles"):
        RunConfig.load(path)


def test_overrides_apply_to_policy_and_run():
    """Test dat CLI-overrides policy-keys en run-instellingen aanpassen."""
    print("\n=== Test: Overrides ===")

    config = RunConfig()
    updated = config.with_overrides(
        mode="infinite",
        epochs=7,
        output_dir="elsewhere",
        policy={"t0": "250", "run.log_level": '"DEBUG"'},
    )

    assert updated.run.mode == "infinite"
    assert updated.run.epochs == 7
    assert updated.run.output_dir == "elsewhere"
    assert updated.policy.t0 == 250
    assert updated.run.log_level == "DEBUG"
    # origineel blijft ongewijzigd
    assert config.policy.t0 == ScalingPolicy().t0
    print(f"✓ Overrides applied: t0={updated.policy.t0}, mode={updated.run.mode}")


def test_override_with_unknown_key_is_rejected():
    """Test dat een override naar een onbekende policy-key een ConfigError geeft."""
    with pytest.raises(ConfigError, match="unknown key 'warp'"):
        RunConfig().with_overrides(policy={"warp": "9"})


def test_config_hash_is_stable_and_sensitive():
    """Test dat de hash deterministisch is en verandert met de inhoud."""
    first = RunConfig().config_hash()
    second = RunConfig().config_hash()
    changed = RunConfig().with_overrides(epochs=5).config_hash()

    assert first == second
    assert len(first) == 12
    assert changed != first


def test_parse_scalar():
    """Test dat CLI-waarden als TOML-scalars worden geinterpreteerd."""
    assert parse_scalar("3") == 3
    assert parse_scalar("2.5") == 2.5
    assert parse_scalar("true") is True
    assert parse_scalar("[1, 2]") == [1, 2]
    assert parse_scalar("plain") == "plain"
