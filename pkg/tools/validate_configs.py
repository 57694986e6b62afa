#!/usr/bin/env python3
"""Config validation tool voor embedded-eigen.

Dit script laadt config/default_config.toml en alle voorbeeldconfigs, en
controleert dat de default-file precies de dataclass-defaults beschrijft.

Usage:
    python -m tools.validate_configs
    python tools/validate_configs.py
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path

# Add src to path so we can import from embedded_eigen
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root / "src"))

from embedded_eigen.core.config import RunConfig
from embedded_eigen.data_access.exceptions import DataAccessError

logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s", stream=sys.stdout)
logger = logging.getLogger(__name__)


def validate_default(config_dir: Path) -> bool:
    """Default-file moet laden en gelijk zijn aan ``RunConfig()``."""
    logger.info("=" * 70)
    logger.info("Validating default configuration")
    logger.info("=" * 70)
    try:
        loaded = RunConfig.load(config_dir / "default_config.toml")
    except DataAccessError as e:
        logger.error(f"✗ {e}")
        return False
    expected = RunConfig().to_dict()
    actual = loaded.to_dict()
    drift = [
        f"{section}.{key}: file={actual[section][key]!r} code={value!r}"
        for section, values in expected.items()
        for key, value in values.items()
        if actual[section][key] != value
    ]
    for line in drift:
        logger.error(f"✗ Default drift {line}")
    if not drift:
        logger.info(f"✓ Defaults match (config={loaded.config_hash()})")
    return not drift


def validate_examples(config_dir: Path) -> bool:
    logger.info("")
    logger.info("=" * 70)
    logger.info("Validating example configurations")
    logger.info("=" * 70)
    ok = True
    for path in sorted((config_dir / "examples").glob("*.toml")):
        try:
            config = RunConfig.load(path)
        except DataAccessError as e:
            logger.error(f"✗ {e}")
            ok = False
            continue
        targets = config.targets.eigenvalues or config.targets.band_fractions
        logger.info(
            f"✓ {path.name}: {config.operator.kind}, {config.run.experiment}, "
            f"{len(targets)} target(s), config={config.config_hash()}"
        )
    return ok


def main() -> int:
    """Main entry point.

    Returns
    -------
    int
        Exit code (0 = success, 1 = errors found)
    """
    config_dir = project_root / "config"
    default_ok = validate_default(config_dir)
    examples_ok = validate_examples(config_dir)

    logger.info("")
    logger.info(f"Default:  {'✓ OK' if default_ok else '✗ FAILED'}")
    logger.info(f"Examples: {'✓ OK' if examples_ok else '✗ FAILED'}")
    if default_ok and examples_ok:
        logger.info("✓ All validation checks passed!")
        return 0
    logger.error("✗ Validation failed. See errors above.")
    return 1


if __name__ == "__main__":
    sys.exit(main())
