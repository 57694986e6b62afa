"""Protocol definitions voor loose coupling tussen systems en de uitvoerlaag.

Continue banen (``PruferTrajectory``) en discrete banen (``JacobiTrajectory``)
hebben verschillende namen voor hun as; de export praat alleen met deze
interfaces.
"""

from __future__ import annotations

from typing import Any, Protocol, runtime_checkable

import numpy as np
from numpy.typing import NDArray


# =============================================================================
# Banen
# =============================================================================


class TrajectoryLike(Protocol):
    """Protocol voor een (ln R, θ)-baan van een energie."""

    @property
    def energy(self) -> float:
        ...

    @property
    def ln_r(self) -> NDArray[np.float64]:
        ...

    @property
    def theta(self) -> NDArray[np.float64]:
        ...


# =============================================================================
# Storingen
# =============================================================================


@runtime_checkable
class EnvelopeBounded(Protocol):
    """Storing met een exact bekend supremum van |V(x)|(1+x)."""

    def weighted_sup(self, start: float, end: float) -> float:
        """sup |V(x)|(1+x) over [start, end]."""
        ...


# =============================================================================
# Rapporten
# =============================================================================


@runtime_checkable
class ReportLike(Protocol):
    """Protocol voor rapporten die naar JSON gaan en een eindoordeel hebben."""

    @property
    def passed(self) -> bool:
        ...

    def to_dict(self) -> dict[str, Any]:
        """Serialiseerbare weergave."""
        ...


__all__ = ["TrajectoryLike", "EnvelopeBounded", "ReportLike"]
