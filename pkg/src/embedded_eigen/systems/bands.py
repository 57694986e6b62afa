"""Bandstructuur en het lokaliseren van bandranden uit een discriminant.

Zowel de continue (Hill) als de discrete (Jacobi) operator leveren een
discriminant Δ(E) en zijn afgeleide; deze module zoekt daaruit de energieën
met |Δ(E)| = 2 en bouwt de banden ertussen.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq

from embedded_eigen.core.exceptions import PreconditionError, UnresolvedEdgeError

logger = logging.getLogger(__name__)

# Sampler: energieën -> (Δ(E), dΔ/dE) als arrays van dezelfde lengte.
DiscriminantSampler = Callable[
    [NDArray[np.float64]], tuple[NDArray[np.float64], NDArray[np.float64]]
]


@dataclass(frozen=True, slots=True)
class BandStructure:
    """Geordende lijst van banden [c_k, d_k] met richtingsvlaggen.

    Attributes
    ----------
    bands:
        Gesloten intervallen, oplopend geordend; opeenvolgende banden delen hoogstens een punt.
    edges:
        Alle gevonden energieën met |Δ| = 2 binnen het scanbereik.
    direction_flags:
        +1 als k(E) van 0 naar π loopt over de band (Δ dalend), -1 als k van π naar 0 loopt.
    discriminant_sampler:
        E -> Δ(E) voor losse energieën.
    """

    bands: tuple[tuple[float, float], ...]
    edges: tuple[float, ...]
    direction_flags: tuple[int, ...]
    discriminant_sampler: Callable[[float], float] = field(repr=False, compare=False)

    def band_index(self, energy: float) -> int | None:
        """Index van de band die energy bevat, of None als energy in geen enkele band ligt."""
        for index, (lo, hi) in enumerate(self.bands):
            if lo <= energy <= hi:
                return index
        return None

    def contains(self, energy: float) -> bool:
        return self.band_index(energy) is not None

    def interior_points(self, index: int, count: int) -> NDArray[np.float64]:
        """count equidistante punten strikt binnen band index."""
        lo, hi = self.bands[index]
        return np.linspace(lo, hi, count + 2)[1:-1]

    def rows(self) -> list[tuple[int, float, float]]:
        """Tabelrijen (band_index, c, d) voor export."""
        return [(i, lo, hi) for i, (lo, hi) in enumerate(self.bands)]


def _scalar(
    sampler: DiscriminantSampler,
) -> tuple[Callable[[float], float], Callable[[float], float]]:
    def value(energy: float) -> float:
        return float(sampler(np.array([energy]))[0][0])

    def slope(energy: float) -> float:
        return float(sampler(np.array([energy]))[1][0])

    return value, slope


def locate_edges(
    sampler: DiscriminantSampler,
    e_min: float,
    e_max: float,
    *,
    root_tol: float = 1e-10,
    points_per_unit: int = 400,
    tangency_tol: float = 1e-8,
) -> BandStructure:
    """Zoek alle bandranden in [e_min, e_max] en bouw de BandStructure.

    Randen waar Δ ∓ 2 van teken wisselt worden met brentq verfijnd. Gesloten
    gaten (Δ raakt ±2 zonder te kruisen) worden gevonden als nulpunt van dΔ/dE
    met |Δ| binnen tangency_tol van 2.

    Raises
    ------
    PreconditionError
        Als e_min >= e_max of root_tol <= 0.
    UnresolvedEdgeError
        Als een scancel randen van beide soorten (Δ = 2 en Δ = -2) bevat.
    """
    if not e_min < e_max:
        raise PreconditionError("locate_bands", f"E_min={e_min} must be < E_max={e_max}")
    if root_tol <= 0.0:
        raise PreconditionError("locate_bands", f"root_tol must be positive, got {root_tol}")

    cells = max(8, math.ceil((e_max - e_min) * points_per_unit))
    grid = np.linspace(e_min, e_max, cells + 1)
    delta, slope = sampler(grid)
    value_at, slope_at = _scalar(sampler)
    logger.debug(f"Scanning discriminant on {grid.size} points in [{e_min}, {e_max}]")

    edges: list[float] = []
    node_tol = 10.0 * root_tol
    for level in (2.0, -2.0):
        shifted = delta - level
        edges.extend(float(e) for e in grid[np.abs(shifted) <= node_tol])

    extremum_cells = set(np.nonzero(slope[:-1] * slope[1:] < 0.0)[0].tolist())
    upper = (delta[:-1] - 2.0) * (delta[1:] - 2.0) < 0.0
    lower = (delta[:-1] + 2.0) * (delta[1:] + 2.0) < 0.0
    both = np.nonzero(upper & lower)[0]
    if both.size:
        i = int(both[0])
        raise UnresolvedEdgeError((float(grid[i]), float(grid[i + 1])), "edges at +2 and -2")

    for i in np.nonzero(upper | lower)[0].tolist():
        if i in extremum_cells:
            continue
        level = 2.0 if upper[i] else -2.0
        root = brentq(lambda e, lv=level: value_at(e) - lv, grid[i], grid[i + 1], xtol=root_tol)
        edges.append(float(root))

    for i in sorted(extremum_cells):
        lo, hi = float(grid[i]), float(grid[i + 1])
        turning = float(brentq(slope_at, lo, hi, xtol=root_tol))
        peak = value_at(turning)
        if abs(peak) < 2.0 - tangency_tol:
            if upper[i] or lower[i]:
                level = 2.0 if upper[i] else -2.0
                root = brentq(lambda e, lv=level: value_at(e) - lv, lo, hi, xtol=root_tol)
                edges.append(float(root))
            continue
        level = math.copysign(2.0, peak)
        if abs(abs(peak) - 2.0) <= tangency_tol:
            # gesloten gat: Δ raakt ±2
            edges.append(turning)
            continue
        for a, b in ((lo, turning), (turning, hi)):
            fa, fb = value_at(a) - level, value_at(b) - level
            if fa * fb < 0.0:
                edges.append(float(brentq(lambda e: value_at(e) - level, a, b, xtol=root_tol)))
            elif fa * fb == 0.0:
                edges.append(a if fa == 0.0 else b)

    merged: list[float] = []
    for edge in sorted(edges):
        if not merged or edge - merged[-1] > 100.0 * root_tol:
            merged.append(edge)

    points = [e_min] + [e for e in merged if e_min < e < e_max] + [e_max]
    bands: list[tuple[float, float]] = []
    flags: list[int] = []
    for lo, hi in zip(points[:-1], points[1:]):
        if hi - lo <= root_tol:
            continue
        mid = 0.5 * (lo + hi)
        if abs(value_at(mid)) < 2.0:
            bands.append((lo, hi))
            flags.append(1 if slope_at(mid) < 0.0 else -1)

    logger.info(f"Located {len(merged)} edges and {len(bands)} bands in [{e_min}, {e_max}]")
    return BandStructure(
        bands=tuple(bands),
        edges=tuple(merged),
        direction_flags=tuple(flags),
        discriminant_sampler=value_at,
    )


__all__ = ["BandStructure", "DiscriminantSampler", "locate_edges"]
