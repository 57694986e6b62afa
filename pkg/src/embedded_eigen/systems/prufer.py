"""Gegeneraliseerde Prüfer-variabelen voor -u'' + (V0 + V)u = Eu.

Een reele oplossing wordt geschreven als

    u  = R · Im(e^{i(θ-γ)} φ),    u' = R · Im(e^{i(θ-γ)} φ'),

zodat u = R|φ| sin θ. Dan geldt

    (ln R)' = V sin 2θ / (2γ'),    θ' = γ' - (V/γ') sin²θ.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp

from embedded_eigen.core.exceptions import IntegrationError, PreconditionError
from embedded_eigen.systems.floquet import DEFAULT_TOL, FloquetData, PeriodicPotential

logger = logging.getLogger(__name__)

Perturbation = Callable[[float], float]

POINTS_PER_PERIOD = 16
MAX_STEP = 0.5


@dataclass(frozen=True, slots=True)
class BoundaryCondition:
    """Randvoorwaarde u'(a)/u(a) = tan θ0 met θ0 in [0, π]."""

    theta0: float
    location: float = 0.0

    def __post_init__(self) -> None:
        if not -1e-12 <= self.theta0 <= math.pi + 1e-12:
            raise ValueError(f"Boundary angle must lie in [0, pi], got {self.theta0}")

    @property
    def direction(self) -> tuple[float, float]:
        """(u(a), u'(a)) op een positieve factor na; θ0 = π/2 is precies (0, 1)."""
        if math.isclose(self.theta0, math.pi / 2.0, rel_tol=0.0, abs_tol=1e-15):
            return (0.0, 1.0)
        return (math.cos(self.theta0), math.sin(self.theta0))


@dataclass(frozen=True, slots=True)
class PruferTrajectory:
    """Baan (ln R, θ) op een strikt stijgend grid; θ is niet gereduceerd modulo π."""

    grid: NDArray[np.float64]
    ln_r: NDArray[np.float64]
    theta: NDArray[np.float64]
    energy: float
    floquet_ref: str

    def __post_init__(self) -> None:
        if self.grid.ndim != 1 or self.grid.size < 1:
            raise ValueError("Trajectory grid must be a non-empty 1-d array")
        if self.grid.size > 1 and not np.all(np.diff(self.grid) > 0.0):
            raise ValueError("Trajectory grid must be strictly increasing")
        if self.ln_r.shape != self.grid.shape or self.theta.shape != self.grid.shape:
            raise ValueError("Trajectory arrays must match the grid shape")

    @property
    def final(self) -> tuple[float, float, float]:
        """(x, ln R, θ) in het laatste gridpunt."""
        return float(self.grid[-1]), float(self.ln_r[-1]), float(self.theta[-1])

    def ln_r_at(self, x: float) -> float:
        return float(np.interp(x, self.grid, self.ln_r))

    def window(self, x0: float, x1: float) -> PruferTrajectory:
        """Deelbaan op [x0, x1] (gridpunten binnen het interval)."""
        mask = (self.grid >= x0) & (self.grid <= x1)
        return PruferTrajectory(
            self.grid[mask], self.ln_r[mask], self.theta[mask], self.energy, self.floquet_ref
        )

    @classmethod
    def concatenate(cls, parts: Sequence[PruferTrajectory]) -> PruferTrajectory:
        """Plak aansluitende banen; een gedeeld verbindingspunt wordt een keer bewaard."""
        if not parts:
            raise ValueError("Nothing to concatenate")
        grids, ln_rs, thetas = [parts[0].grid], [parts[0].ln_r], [parts[0].theta]
        for prev, part in zip(parts[:-1], parts[1:]):
            skip = 1 if part.grid[0] <= prev.grid[-1] else 0
            grids.append(part.grid[skip:])
            ln_rs.append(part.ln_r[skip:])
            thetas.append(part.theta[skip:])
        return cls(
            np.concatenate(grids),
            np.concatenate(ln_rs),
            np.concatenate(thetas),
            parts[0].energy,
            parts[0].floquet_ref,
        )


@dataclass(frozen=True, slots=True)
class SolutionSamples:
    """(u, u') samples op een grid."""

    grid: NDArray[np.float64]
    u: NDArray[np.float64]
    du: NDArray[np.float64]


# =============================================================================
# Hoeken
# =============================================================================


def initial_prufer_angle(bc: BoundaryCondition, fd: FloquetData) -> float:
    """Prüfer-hoek θ(a) in [0, π) die de randrichting (cos θ0, sin θ0) reproduceert.

    Met ψ = θ - γ moet Im(e^{iψ}(sin θ0 · φ(a) - cos θ0 · φ'(a))) = 0; de
    wortel ψ = -arg(w) (mod π) is expliciet en w ≠ 0 omdat omega_c > 0.
    """
    c, s = bc.direction
    a = bc.location
    w = s * complex(fd.phi(a)) - c * complex(fd.dphi(a))
    psi = -math.atan2(w.imag, w.real)
    return (psi + fd.gamma_at(a)) % math.pi


def boundary_angle(theta: float, fd: FloquetData, x: float) -> float:
    """Inverse van ``initial_prufer_angle``: θ0 in [0, π) met u'(x)/u(x) = tan θ0."""
    phase = np.exp(1j * (theta - fd.gamma_at(x)))
    u = float((phase * fd.phi(x)).imag)
    du = float((phase * fd.dphi(x)).imag)
    return math.atan2(du, u) % math.pi


def dense_grid(
    fd: FloquetData, x0: float, x1: float, points_per_period: int = POINTS_PER_PERIOD
) -> NDArray[np.float64]:
    """Uitvoergrid met points_per_period punten per periode 2π/κ van γ."""
    spacing = min(2.0 * math.pi / (points_per_period * abs(fd.phase_advance)), 0.25)
    count = max(2, math.ceil((x1 - x0) / spacing) + 1)
    return np.linspace(x0, x1, count)


# =============================================================================
# Integratie
# =============================================================================


def integrate_prufer_many(
    fds: Sequence[FloquetData],
    V: Perturbation,
    x0: float,
    x1: float,
    psi0s: Sequence[float],
    *,
    ln_r0s: Sequence[float] | None = None,
    grid: NDArray[np.float64] | None = None,
    rtol: float = DEFAULT_TOL,
    atol: float = 1e-12,
) -> list[PruferTrajectory]:
    """Integreer de Prüfer-vergelijkingen voor meerdere (energie, hoek)-paren tegelijk.

    Raises
    ------
    PreconditionError
        Als x0 >= x1 of de lijsten niet even lang zijn.
    IntegrationError
        Bij falende stapgrootte-controle (pathologische V).
    """
    if not x0 < x1:
        raise PreconditionError("integrate_prufer", f"x0={x0} must be < x1={x1}")
    if len(fds) != len(psi0s):
        raise PreconditionError("integrate_prufer", "one initial angle per Floquet frame")
    m = len(fds)
    start_ln_r = np.zeros(m) if ln_r0s is None else np.asarray(ln_r0s, dtype=float)
    if grid is None:
        grid = dense_grid(fds[0], x0, x1)

    unique = {id(fd): fd for fd in fds}
    order = list(unique)
    frame_index = np.array([order.index(id(fd)) for fd in fds])
    frames = [unique[key] for key in order]
    # the state carries θ - κx so the relative tolerance stays meaningful on long ranges
    kappas = np.array([fd.phase_advance for fd in fds])

    def rhs(x: float, y: NDArray[np.float64]) -> NDArray[np.float64]:
        theta = y[:m] + kappas * x
        gp = np.array([fd.gamma_prime_at(x) for fd in frames])[frame_index]
        v = float(V(x))
        out = np.empty_like(y)
        sin_t = np.sin(theta)
        out[:m] = gp - kappas - (v / gp) * sin_t * sin_t
        out[m:] = v * np.sin(2.0 * theta) / (2.0 * gp)
        return out

    sol = solve_ivp(
        rhs,
        (x0, x1),
        np.concatenate([np.asarray(psi0s, dtype=float) - kappas * x0, start_ln_r]),
        method="DOP853",
        rtol=rtol,
        atol=atol,
        t_eval=grid,
        max_step=MAX_STEP,
    )
    if not sol.success:
        raise IntegrationError("integrate_prufer", sol.message)
    logger.debug(f"Prufer integration on [{x0:g}, {x1:g}]: {sol.nfev} evaluations, m={m}")
    return [
        PruferTrajectory(
            sol.t, sol.y[m + j], sol.y[j] + kappas[j] * sol.t, fd.energy, fd.identifier
        )
        for j, fd in enumerate(fds)
    ]


def integrate_prufer(
    fd: FloquetData,
    V: Perturbation,
    x0: float,
    x1: float,
    psi0: float,
    *,
    grid: NDArray[np.float64] | None = None,
    rtol: float = DEFAULT_TOL,
    atol: float = 1e-12,
) -> PruferTrajectory:
    """Los (ln R, θ) op [x0, x1] op met θ(x0) = psi0 en ln R(x0) = 0."""
    return integrate_prufer_many([fd], V, x0, x1, [psi0], grid=grid, rtol=rtol, atol=atol)[0]


def reconstruct_solution(traj: PruferTrajectory, fd: FloquetData) -> SolutionSamples:
    """(u, u') uit een Prüfer-baan: u = R Im(e^{i(θ-γ)}φ), u' = R Im(e^{i(θ-γ)}φ')."""
    if not math.isclose(traj.energy, fd.energy, rel_tol=1e-12, abs_tol=1e-12):
        raise PreconditionError(
            "reconstruct_solution", f"trajectory E={traj.energy} but Floquet E={fd.energy}"
        )
    amplitude = np.exp(traj.ln_r)
    phase = np.exp(1j * (traj.theta - fd.gamma(traj.grid)))
    u = amplitude * (phase * fd.phi(traj.grid)).imag
    du = amplitude * (phase * fd.dphi(traj.grid)).imag
    return SolutionSamples(traj.grid, u, du)


def direct_solve(
    V0: PeriodicPotential,
    V: Perturbation,
    E: float,
    bc: BoundaryCondition,
    x0: float,
    x1: float,
    *,
    grid: NDArray[np.float64] | None = None,
    initial: tuple[float, float] | None = None,
    tol: float = DEFAULT_TOL,
) -> SolutionSamples:
    """Directe integratie van u'' = (V0 + V - E)u vanaf de randrichting in x0.

    ``initial`` overschrijft de richting van bc met expliciete (u(x0), u'(x0)).
    """
    if grid is None:
        grid = np.linspace(x0, x1, max(2, math.ceil(16 * (x1 - x0)) + 1))
    start = initial if initial is not None else bc.direction

    def rhs(x: float, y: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.array([y[1], (V0.value(x) + float(V(x)) - E) * y[0]])

    sol = solve_ivp(
        rhs,
        (x0, x1),
        np.array(start, dtype=float),
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-2,
        t_eval=grid,
        max_step=MAX_STEP,
    )
    if not sol.success:
        raise IntegrationError("direct_solve", sol.message)
    return SolutionSamples(sol.t, sol.y[0], sol.y[1])


def zero_perturbation(x: float) -> float:
    return 0.0


__all__ = [
    "BoundaryCondition",
    "PruferTrajectory",
    "SolutionSamples",
    "Perturbation",
    "initial_prufer_angle",
    "boundary_angle",
    "dense_grid",
    "integrate_prufer",
    "integrate_prufer_many",
    "reconstruct_solution",
    "direct_solve",
    "zero_perturbation",
]
