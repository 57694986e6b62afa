"""Applicatie-entrypoint: ``embedded-eigen {bands,synthesize,verify}``."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from embedded_eigen.app.version import TOOL_NAME, __version__
from embedded_eigen.core.config import RunConfig
from embedded_eigen.core.exceptions import (
    ContractViolation,
    InfeasibleScheduleError,
    NotInBandError,
    PreconditionError,
    ResonantSetError,
    SpectralError,
    UnresolvedEdgeError,
)
from embedded_eigen.core.logging_setup import configure_logging
from embedded_eigen.data_access.exceptions import DataAccessError
from embedded_eigen.services.pipeline import CommandResult, PipelineService

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_CONTRACT = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

# Ongeldige invoer; geeft EXIT_CONFIG.
INPUT_ERRORS = (
    DataAccessError,
    PreconditionError,
    ResonantSetError,
    InfeasibleScheduleError,
    NotInBandError,
    UnresolvedEdgeError,
)

DEFAULT_CONFIG = Path("config") / "default_config.toml"


def _key_value(raw: str) -> tuple[str, str]:
    key, sep, value = raw.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected KEY=VAL, got {raw!r}")
    return key.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Embedded eigenvalues for periodic Schrodinger and Jacobi operators.",
    )
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=DEFAULT_CONFIG, help="TOML run config")
    common.add_argument("--out", dest="output_dir", help="output directory (run.output_dir)")
    common.add_argument("--mode", choices=("finite", "infinite"), help="schedule mode")
    common.add_argument("--epochs", type=int, help="number of epochs W")
    common.add_argument(
        "--policy",
        type=_key_value,
        action="append",
        default=[],
        metavar="KEY=VAL",
        help="override a policy key (or section.key); repeatable",
    )
    common.add_argument(
        "--log-level", type=str.upper, choices=("DEBUG", "INFO", "WARNING", "ERROR")
    )

    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("bands", parents=[common], help="write band edges and k(E) samples")
    commands.add_parser(
        "synthesize", parents=[common], help="build the perturbation and write all outputs"
    )
    commands.add_parser("verify", parents=[common], help="run the configured experiment")
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.load(args.config)
    overrides = dict(args.policy)
    if args.log_level:
        overrides["run.log_level"] = f'"{args.log_level}"'
    return config.with_overrides(
        mode=args.mode, epochs=args.epochs, output_dir=args.output_dir, policy=overrides
    )


def run_command(command: str, config: RunConfig) -> CommandResult:
    service = PipelineService(config)
    if command == "bands":
        return service.bands()
    if command == "synthesize":
        return service.synthesize()
    return service.verify()


def main(argv: Sequence[str] | None = None) -> int:
    """Voer een commando uit en geef de exit code terug.

    0 pass, 1 geschonden ongelijkheid, 2 ongeldige invoer, 3 numeriek falen
    (integratie of ontaarde Floquet-data).
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or logging.INFO)
    try:
        config = _resolve_config(args)
        configure_logging(config.run.log_level, log_dir=Path(config.run.output_dir))
        logger.info(f"{TOOL_NAME} {__version__} {args.command} config={config.config_hash()}")
        result = run_command(args.command, config)
    except ContractViolation as e:
        logger.error(str(e))
        return EXIT_CONTRACT
    except INPUT_ERRORS as e:
        logger.error(str(e))
        return EXIT_CONFIG
    except SpectralError as e:
        logger.error(f"Numerical failure: {e}")
        return EXIT_NUMERIC

    for path in result.files:
        print(path)
    if not result.passed:
        logger.error(f"{args.command}: one or more checked inequalities failed")
        return EXIT_CONTRACT
    return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
