"""Diagnostiek van oscillerende integralen langs Prüfer-banen.

Het verval van de doelenergie en de stabiliteit van beschermde energieën
rusten op de begrensdheid van

    ∫ cos 4θ(y,E) / (1+y) dy
    ∫ sin 2θ(y,E) sin 2θ(y,Ê) / (2γ'(y,Ê)(1+y-b)) dy

over alle bovengrenzen. Hier worden de lopende integralen numeriek bepaald.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import cumulative_trapezoid

from embedded_eigen.core.exceptions import PreconditionError, ResonantPairError
from embedded_eigen.systems.floquet import DEFAULT_TOL, FloquetData
from embedded_eigen.systems.prufer import PruferTrajectory
from embedded_eigen.systems.reports import OscillationReport

logger = logging.getLogger(__name__)

ANGULAR_TOL = 1e-6


def is_resonant_pair(k: float, k_hat: float, angular_tol: float = ANGULAR_TOL) -> bool:
    """k + k̂ = π binnen de hoektolerantie."""
    return abs(k + k_hat - math.pi) < angular_tol


def _refined_theta(
    traj: PruferTrajectory, fd: FloquetData, fine: NDArray[np.float64]
) -> NDArray[np.float64]:
    """θ op een fijner grid: θ - γ varieert langzaam en wordt lineair geinterpoleerd."""
    slow = traj.theta - fd.gamma(traj.grid)
    return np.interp(fine, traj.grid, slow) + fd.gamma(fine)


def oscillation_diagnostic(
    traj: PruferTrajectory,
    fd: FloquetData,
    b: float,
    other: PruferTrajectory | None = None,
    fd_other: FloquetData | None = None,
    *,
    refine: int = 4,
    angular_tol: float = ANGULAR_TOL,
    energy_tol: float = DEFAULT_TOL,
) -> OscillationReport:
    """Sup van |lopende integraal| voor de zelf- en kruisterm.

    Parameters
    ----------
    traj, fd:
        Baan en Floquet-data van E.
    b:
        Offset van de stage (x - b in de noemer van de kruisterm).
    other, fd_other:
        Optionele baan en Floquet-data van Ê op hetzelfde grid.
    refine:
        Verfijningsfactor van het quadratuurgrid.
    energy_tol:
        Relatieve en absolute tolerantie waarbinnen Ê als gelijk aan E geldt.

    Raises
    ------
    PreconditionError
        Als Ê binnen energy_tol gelijk is aan E, of de grids verschillen.
    ResonantPairError
        Als k(E) + k(Ê) binnen angular_tol van π ligt.
    """
    grid = traj.grid
    if grid.size < 2:
        return OscillationReport(traj.energy, None, float(grid[0]), float(grid[-1]), 0.0, None)
    fine = np.linspace(grid[0], grid[-1], (grid.size - 1) * refine + 1)
    theta = _refined_theta(traj, fd, fine)
    self_term = cumulative_trapezoid(np.cos(4.0 * theta) / (1.0 + fine), fine, initial=0.0)
    sup_self = float(np.max(np.abs(self_term)))

    sup_cross: float | None = None
    other_energy: float | None = None
    if other is not None and fd_other is not None:
        other_energy = fd_other.energy
        if math.isclose(other_energy, fd.energy, rel_tol=energy_tol, abs_tol=energy_tol):
            raise PreconditionError("oscillation_diagnostic", "E_hat must differ from E")
        if is_resonant_pair(fd.k, fd_other.k, angular_tol):
            raise ResonantPairError(fd.energy, other_energy)
        if not np.array_equal(other.grid, grid):
            raise PreconditionError("oscillation_diagnostic", "trajectories need a common grid")
        theta_hat = _refined_theta(other, fd_other, fine)
        weight = 2.0 * fd_other.gamma_prime(fine) * (1.0 + fine - b)
        cross = cumulative_trapezoid(
            np.sin(2.0 * theta) * np.sin(2.0 * theta_hat) / weight, fine, initial=0.0
        )
        sup_cross = float(np.max(np.abs(cross)))

    logger.debug(
        f"Oscillation sup on [{grid[0]:g}, {grid[-1]:g}] for E={fd.energy:.6g}: "
        f"self={sup_self:.3e} cross={sup_cross}"
    )
    return OscillationReport(
        energy=fd.energy,
        other_energy=other_energy,
        start=float(grid[0]),
        end=float(grid[-1]),
        sup_self=sup_self,
        sup_cross=sup_cross,
    )


__all__ = ["ANGULAR_TOL", "is_resonant_pair", "oscillation_diagnostic"]
