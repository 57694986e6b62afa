"""Eenvoudige profiler hooks."""

from __future__ import annotations

import contextlib
import logging
import time
from collections.abc import Iterator
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class Stopwatch:
    """Houdt de verstreken tijd van een sectie vast zodat rapporten die kunnen tonen."""

    label: str
    elapsed: float = field(default=0.0)


@contextlib.contextmanager
def profile_section(label: str) -> Iterator[Stopwatch]:
    """Contextmanager om ruwe timing te loggen."""
    watch = Stopwatch(label)
    start = time.perf_counter()
    try:
        yield watch
    finally:
        watch.elapsed = time.perf_counter() - start
        logger.debug("%s: %.4fs", label, watch.elapsed)


__all__ = ["Stopwatch", "profile_section"]
