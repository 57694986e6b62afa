"""Loggingconfiguratie voor de command-line tools.

De console krijgt gekleurde regels via ``colorlog``; optioneel schrijft een
tweede handler dezelfde regels zonder kleurcodes naar ``run.log`` in de
outputmap, zodat een run achteraf naast ``report.json`` te lezen is.
"""

from __future__ import annotations

import logging
from pathlib import Path

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"
FILE_FORMAT = "%(asctime)s " + LOG_FORMAT
RUN_LOG_NAME = "run.log"


def parse_level(level: int | str) -> int:
    """Vertaal een levelnaam ("DEBUG", "info", ...) of int naar een logging-level."""
    if isinstance(level, int):
        return level
    value = logging.getLevelName(level.upper())
    if not isinstance(value, int):
        raise ValueError(f"Unknown log level: {level!r}")
    return value


def _reset_root(root: logging.Logger) -> None:
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()


def configure_logging(level: int | str = logging.INFO, log_dir: Path | None = None) -> None:
    """Configureer console-logging en, met ``log_dir``, een run.log in die map.

    Parameters
    ----------
    level:
        Levelnaam of numeriek level voor de root logger.
    log_dir:
        Outputmap van de run; wordt aangemaakt als die nog niet bestaat.
    """
    numeric = parse_level(level)
    root = logging.getLogger()
    _reset_root(root)
    try:
        import colorlog

        console: logging.Handler = colorlog.StreamHandler()
        console.setFormatter(
            colorlog.ColoredFormatter(
                "%(log_color)s[%(levelname)s]%(reset)s %(name)s: %(message)s",
                log_colors={
                    "DEBUG": "cyan",
                    "INFO": "green",
                    "WARNING": "yellow",
                    "ERROR": "red",
                    "CRITICAL": "bold_red",
                },
            )
        )
    except ImportError:
        # Zonder colorlog: zelfde regels, geen kleur
        console = logging.StreamHandler()
        console.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(console)

    if log_dir is not None:
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_dir / RUN_LOG_NAME, mode="w", encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT))
        root.addHandler(file_handler)
    root.setLevel(numeric)


__all__ = ["RUN_LOG_NAME", "configure_logging", "parse_level"]
