"""Een enkele Wigner-von Neumann stage op [x0, x1].

De stage kiest V = -C sin 2θ(x) / (1+x-b) · χ(x), waarbij θ de Prüfer-hoek
van de doelenergie zelf is. Daardoor geldt langs de stage

    (ln R)' = -χ C sin² 2θ / (2γ'(1+x-b)) <= 0

voor het doel, terwijl beschermde energieën alleen oscillerende termen zien.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from embedded_eigen.core.exceptions import (
    IntegrationError,
    PreconditionError,
    ResonantSetError,
)
from embedded_eigen.systems.floquet import DEFAULT_TOL, FloquetData
from embedded_eigen.systems.oscillation import (
    ANGULAR_TOL,
    is_resonant_pair,
    oscillation_diagnostic,
)
from embedded_eigen.systems.prufer import (
    MAX_STEP,
    BoundaryCondition,
    PruferTrajectory,
    dense_grid,
    initial_prufer_angle,
)
from embedded_eigen.systems.reports import InequalityRecord, OscillationReport, StageReport
from embedded_eigen.utils.math_helpers import bump_cutoff, fit_slope, smooth_step_scalar
from embedded_eigen.utils.profiler import profile_section

logger = logging.getLogger(__name__)

DEFAULT_PROBES = 8


def stage_coupling(fd: FloquetData, decay_exponent: float) -> float:
    """C(D) = 4·D·G: het doel vervalt dan minstens als ((x-b)/(x0-b))^{-D}."""
    return 4.0 * decay_exponent * fd.G


def probe_angles(count: int = DEFAULT_PROBES) -> tuple[float, ...]:
    """count equidistante randhoeken in [0, π)."""
    return tuple(j * math.pi / count for j in range(count))


# =============================================================================
# Stage
# =============================================================================


@dataclass(frozen=True, slots=True)
class Stage:
    """Parameters van een stage.

    Attributes
    ----------
    E_target:
        Energie die op deze stage vervalt.
    protected:
        Energieën waarvan de groei begrensd moet blijven.
    x0, x1, b:
        Interval en offset (b < x0).
    theta0:
        Randhoek in x0 (u'/u = tan θ0).
    C:
        Koppelingsconstante.
    mollify_width:
        Breedte van de afsnijzone; standaard min(1, (x1-x0)/100).
    initial_angle:
        Optioneel: doorlopende Prüfer-hoek van het doel in x0; overschrijft theta0.
    """

    E_target: float
    protected: tuple[float, ...]
    x0: float
    x1: float
    b: float
    theta0: float
    C: float
    mollify_width: float | None = None
    initial_angle: float | None = None

    def __post_init__(self) -> None:
        if not self.b < self.x0 < self.x1:
            raise PreconditionError(
                "Stage", f"need b < x0 < x1, got {self.b}, {self.x0}, {self.x1}"
            )
        if self.C < 0.0:
            raise PreconditionError("Stage", f"coupling must be non-negative, got {self.C}")

    @property
    def width(self) -> float:
        if self.mollify_width is not None:
            return self.mollify_width
        return min(1.0, (self.x1 - self.x0) / 100.0)

    def cutoff_at(self, x: float) -> float:
        w = self.width
        return smooth_step_scalar((x - self.x0) / w) * smooth_step_scalar((self.x1 - x) / w)

    def cutoff(self, x: ArrayLike) -> NDArray[np.float64]:
        return bump_cutoff(x, self.x0, self.x1, self.width)

    def start_angle(self, fd: FloquetData) -> float:
        if self.initial_angle is not None:
            return self.initial_angle
        return initial_prufer_angle(BoundaryCondition(self.theta0, self.x0), fd)

    def validate(
        self,
        k_target: float,
        k_protected: Sequence[float],
        k_min: float,
        angular_tol: float = ANGULAR_TOL,
    ) -> None:
        """Controleer toelaatbaarheid en niet-resonantie.

        Raises
        ------
        PreconditionError
            Als x0 - b < k_min.
        ResonantSetError
            Bij gelijke quasimomenta, k + k̂ = π, of k(doel) = π/2.
        """
        if self.x0 - self.b < k_min:
            raise PreconditionError("Stage", f"x0 - b = {self.x0 - self.b:g} below K_min={k_min:g}")
        pairs: list[tuple[float, float, str]] = []
        if abs(k_target - math.pi / 2.0) < angular_tol:
            pairs.append((self.E_target, self.E_target, "target quasimomentum equals pi/2"))
        for energy, k_hat in zip(self.protected, k_protected):
            if abs(k_hat - k_target) < angular_tol:
                pairs.append((self.E_target, energy, "equal quasimomenta"))
            if is_resonant_pair(k_target, k_hat, angular_tol):
                pairs.append((self.E_target, energy, "k sum equals pi"))
        if pairs:
            raise ResonantSetError(pairs)


@dataclass(frozen=True, slots=True)
class StageTheta:
    """Hoekbaan van een stage met Hermite-interpolatie tussen gridpunten."""

    grid: NDArray[np.float64]
    theta: NDArray[np.float64]
    dtheta: NDArray[np.float64]
    _spline: CubicHermiteSpline = field(repr=False)

    @classmethod
    def from_samples(
        cls, grid: NDArray[np.float64], theta: NDArray[np.float64], dtheta: NDArray[np.float64]
    ) -> StageTheta:
        return cls(grid, theta, dtheta, CubicHermiteSpline(grid, theta, dtheta))

    def __call__(self, x: ArrayLike) -> NDArray[np.float64]:
        return np.asarray(self._spline(x), dtype=float)


@dataclass(frozen=True, slots=True)
class StagePotential:
    """V(x) = -C sin 2θ(x)/(1+x-b) · χ(x) op (x0, x1), nul daarbuiten."""

    stage: Stage
    theta: StageTheta = field(repr=False)

    def raw(self, x: ArrayLike) -> NDArray[np.float64]:
        arr = np.asarray(x, dtype=float)
        inside = np.clip(arr, self.stage.x0, self.stage.x1)
        value = -self.stage.C * np.sin(2.0 * self.theta(inside)) / (1.0 + inside - self.stage.b)
        return np.where((arr > self.stage.x0) & (arr < self.stage.x1), value, 0.0)

    def __call__(self, x: ArrayLike) -> NDArray[np.float64]:
        return self.raw(x) * self.stage.cutoff(x)


def _angle_derivative(
    stage: Stage, fd: FloquetData, grid: NDArray[np.float64], theta: NDArray[np.float64]
) -> NDArray[np.float64]:
    gp = fd.gamma_prime(grid)
    coupling = stage.cutoff(grid) * stage.C / (1.0 + grid - stage.b)
    sin_t = np.sin(theta)
    return gp + coupling * np.sin(2.0 * theta) * sin_t * sin_t / gp


def solve_stage_theta(
    stage: Stage,
    fd: FloquetData,
    *,
    grid: NDArray[np.float64] | None = None,
    rtol: float = DEFAULT_TOL,
    atol: float = 1e-12,
) -> StageTheta:
    """Los θ' = γ' + χ C sin 2θ sin²θ / (γ'(1+x-b)) op [x0, x1].

    Raises
    ------
    PreconditionError
        Als fd niet bij E_target hoort.
    IntegrationError
        Bij falende integratie.
    """
    if not math.isclose(fd.energy, stage.E_target, rel_tol=1e-12, abs_tol=1e-12):
        raise PreconditionError("solve_stage_theta", "Floquet data must belong to E_target")
    if grid is None:
        grid = dense_grid(fd, stage.x0, stage.x1)
    kappa = fd.phase_advance

    def rhs(x: float, y: NDArray[np.float64]) -> NDArray[np.float64]:
        theta = y[0] + kappa * x
        gp = fd.gamma_prime_at(x)
        coupling = stage.cutoff_at(x) * stage.C / (1.0 + x - stage.b)
        sin_t = math.sin(theta)
        return np.array([gp - kappa + coupling * math.sin(2.0 * theta) * sin_t * sin_t / gp])

    sol = solve_ivp(
        rhs,
        (stage.x0, stage.x1),
        np.array([stage.start_angle(fd) - kappa * stage.x0]),
        method="DOP853",
        rtol=rtol,
        atol=atol,
        t_eval=grid,
        max_step=MAX_STEP,
    )
    if not sol.success:
        raise IntegrationError("solve_stage_theta", sol.message)
    theta = sol.y[0] + kappa * sol.t
    return StageTheta.from_samples(sol.t, theta, _angle_derivative(stage, fd, sol.t, theta))


def stage_potential(stage: Stage, theta_traj: StageTheta) -> StagePotential:
    """Gemollificeerde stagepotentiaal bij een hoekbaan."""
    return StagePotential(stage, theta_traj)


# =============================================================================
# Gezamenlijke integratie van doel en meegevolgde energieën
# =============================================================================


@dataclass(frozen=True, slots=True)
class TrackedState:
    """Lopende Prüfer-toestand van een meegevolgde energie aan het begin van een stage."""

    fd: FloquetData
    theta: float
    ln_r: float = 0.0


@dataclass(frozen=True, slots=True)
class StageRun:
    """Uitkomst van ``run_stage``: hoek, potentiaal en alle banen op het stagegrid."""

    stage: Stage
    theta: StageTheta
    potential: StagePotential
    target: PruferTrajectory
    tracked: tuple[PruferTrajectory, ...]


def run_stage(
    stage: Stage,
    fd_target: FloquetData,
    others: Sequence[TrackedState] = (),
    *,
    target_ln_r0: float = 0.0,
    grid: NDArray[np.float64] | None = None,
    rtol: float = DEFAULT_TOL,
    atol: float = 1e-12,
) -> StageRun:
    """Integreer het doel en alle andere toestanden tegelijk over de stage.

    V wordt uit de lopende doelhoek berekend, zodat de doelbaan exact de
    Prüfer-baan onder de gebouwde potentiaal is.
    """
    if grid is None:
        grid = dense_grid(fd_target, stage.x0, stage.x1)
    m = len(others)
    kt = fd_target.phase_advance
    unique = {id(s.fd): s.fd for s in others}
    order = list(unique)
    frames = [unique[key] for key in order]
    frame_index = np.array([order.index(id(s.fd)) for s in others], dtype=int)
    kappas = np.array([s.fd.phase_advance for s in others])

    def rhs(x: float, y: NDArray[np.float64]) -> NDArray[np.float64]:
        out = np.empty_like(y)
        theta_t = y[0] + kt * x
        gt = fd_target.gamma_prime_at(x)
        coupling = stage.cutoff_at(x) * stage.C / (1.0 + x - stage.b)
        s2 = math.sin(2.0 * theta_t)
        st = math.sin(theta_t)
        v = -coupling * s2
        out[0] = gt - kt + coupling * s2 * st * st / gt
        out[1] = v * s2 / (2.0 * gt)
        if m:
            theta = y[2 : 2 + m] + kappas * x
            gp = np.array([fd.gamma_prime_at(x) for fd in frames])[frame_index]
            sin_t = np.sin(theta)
            out[2 : 2 + m] = gp - kappas - (v / gp) * sin_t * sin_t
            out[2 + m :] = v * np.sin(2.0 * theta) / (2.0 * gp)
        return out

    y0 = np.concatenate(
        [
            [stage.start_angle(fd_target) - kt * stage.x0, target_ln_r0],
            [s.theta - s.fd.phase_advance * stage.x0 for s in others],
            [s.ln_r for s in others],
        ]
    )
    with profile_section(f"stage E={stage.E_target:.6g} [{stage.x0:g}, {stage.x1:g}]"):
        sol = solve_ivp(
            rhs,
            (stage.x0, stage.x1),
            y0,
            method="DOP853",
            rtol=rtol,
            atol=atol,
            t_eval=grid,
            max_step=MAX_STEP,
        )
    if not sol.success:
        raise IntegrationError("run_stage", sol.message)
    logger.debug(f"Stage integration: {sol.nfev} evaluations, {m + 1} tracked states")

    theta_t = sol.y[0] + kt * sol.t
    angle = StageTheta.from_samples(
        sol.t, theta_t, _angle_derivative(stage, fd_target, sol.t, theta_t)
    )
    target = PruferTrajectory(sol.t, sol.y[1], theta_t, fd_target.energy, fd_target.identifier)
    tracked = tuple(
        PruferTrajectory(
            sol.t,
            sol.y[2 + m + j],
            sol.y[2 + j] + kappas[j] * sol.t,
            s.fd.energy,
            s.fd.identifier,
        )
        for j, s in enumerate(others)
    )
    return StageRun(stage, angle, stage_potential(stage, angle), target, tracked)


# =============================================================================
# Contract
# =============================================================================


def check_stage_contract(
    stage: Stage,
    fd_target: FloquetData,
    fd_protected: Sequence[FloquetData],
    decay_exponent: float,
    *,
    k_min: float = 0.0,
    probes: int = DEFAULT_PROBES,
    slope_slack: float = 0.1,
    monotone_tol: float = 1e-8,
    ratio_bound: float = 2.0,
    strict_ratio_bound: float = 1.5,
    strict_threshold: float | None = None,
    angular_tol: float = ANGULAR_TOL,
    diagnostics: bool = True,
    rtol: float = DEFAULT_TOL,
    strict: bool = False,
) -> StageReport:
    """Draai een stage en controleer verval, monotonie, omhullende en beschermde groei.

    De beschermde energieën worden voor ``probes`` randhoeken in x0 gevolgd.
    De strengere grens 1.5 wordt alleen gecontroleerd als x0 - b minstens
    ``strict_threshold`` is (standaard k_min).

    Raises
    ------
    ContractViolation
        Als ``strict`` en een van de records niet geldt.
    """
    stage.validate(fd_target.k, [fd.k for fd in fd_protected], k_min, angular_tol)
    others = [
        TrackedState(fd, initial_prufer_angle(BoundaryCondition(angle, stage.x0), fd))
        for fd in fd_protected
        for angle in probe_angles(probes)
    ]
    run = run_stage(stage, fd_target, others, rtol=rtol)
    grid = run.target.grid
    records: list[InequalityRecord] = []

    scale = np.log((grid - stage.b) / (stage.x0 - stage.b))
    slope = fit_slope(scale, run.target.ln_r)
    records.append(
        InequalityRecord(
            "fitted target decay slope <= -D(1 - slack)",
            "stage.target.slope",
            slope,
            -decay_exponent * (1.0 - slope_slack),
        )
    )
    excess = run.target.ln_r - run.target.ln_r[0]
    worst = int(np.argmax(excess))
    records.append(
        InequalityRecord(
            "target lnR(x) <= lnR(x0)",
            "stage.target.monotone",
            float(excess[worst]),
            monotone_tol,
            float(grid[worst]),
        )
    )
    envelope = np.abs(run.potential(grid)) * (grid - stage.b)
    worst = int(np.argmax(envelope))
    records.append(
        InequalityRecord(
            "sup |V|(x-b) <= C",
            "stage.envelope",
            float(envelope[worst]),
            stage.C,
            float(grid[worst]),
        )
    )

    threshold = k_min if strict_threshold is None else strict_threshold
    ratios: list[tuple[float, float]] = []
    for i, fd in enumerate(fd_protected):
        block = run.tracked[i * probes : (i + 1) * probes]
        growth = [float(np.max(t.ln_r - t.ln_r[0])) for t in block]
        worst_angle = int(np.argmax(growth))
        ratio = math.exp(growth[worst_angle])
        location = float(grid[int(np.argmax(block[worst_angle].ln_r))])
        ratios.append((fd.energy, ratio))
        records.append(
            InequalityRecord(
                f"protected R ratio for E={fd.energy:.6g} <= {ratio_bound:g}",
                "stage.protected.ratio",
                ratio,
                ratio_bound,
                location,
            )
        )
        if stage.x0 - stage.b >= threshold:
            records.append(
                InequalityRecord(
                    f"protected R ratio for E={fd.energy:.6g} <= {strict_ratio_bound:g}",
                    "stage.protected.ratio_strict",
                    ratio,
                    strict_ratio_bound,
                    location,
                )
            )

    reports: list[OscillationReport] = []
    if diagnostics:
        reports.append(oscillation_diagnostic(run.target, fd_target, stage.b))
        for i, fd in enumerate(fd_protected):
            reports.append(
                oscillation_diagnostic(
                    run.target,
                    fd_target,
                    stage.b,
                    run.tracked[i * probes],
                    fd,
                    angular_tol=angular_tol,
                )
            )

    report = StageReport(
        energy=stage.E_target,
        x0=stage.x0,
        x1=stage.x1,
        b=stage.b,
        coupling=stage.C,
        slope=slope,
        protected_ratios=tuple(ratios),
        records=tuple(records),
        diagnostics=tuple(reports),
    )
    level = logging.INFO if report.passed else logging.WARNING
    logger.log(level, f"Stage E={stage.E_target:.6g}: slope={slope:.4f} pass={report.passed}")
    if strict:
        report.raise_if_failed()
    return report


def calibrate_k_min(
    fd_target: FloquetData,
    fd_protected: Sequence[FloquetData],
    decay_exponent: float,
    candidates: Sequence[float] = (100.0, 300.0, 1000.0, 3000.0),
    *,
    stage_ratio: float = 10.0,
    probes: int = DEFAULT_PROBES,
    bound: float = 1.5,
) -> float | None:
    """Kleinste x0 - b uit candidates waarvoor de beschermde verhouding <= bound blijft.

    Returns None als geen kandidaat voldoet.
    """
    coupling = stage_coupling(fd_target, decay_exponent)
    for start in sorted(candidates):
        stage = Stage(
            E_target=fd_target.energy,
            protected=tuple(fd.energy for fd in fd_protected),
            x0=start,
            x1=start * stage_ratio,
            b=0.0,
            theta0=0.0,
            C=coupling,
        )
        others = [
            TrackedState(fd, initial_prufer_angle(BoundaryCondition(angle, start), fd))
            for fd in fd_protected
            for angle in probe_angles(probes)
        ]
        run = run_stage(stage, fd_target, others)
        worst = max((float(np.max(t.ln_r - t.ln_r[0])) for t in run.tracked), default=0.0)
        logger.info(f"K_min candidate x0-b={start:g}: max protected ratio {math.exp(worst):.4f}")
        if math.exp(worst) <= bound:
            return float(start)
    return None


__all__ = [
    "Stage",
    "StageTheta",
    "StagePotential",
    "StageRun",
    "TrackedState",
    "stage_coupling",
    "probe_angles",
    "solve_stage_theta",
    "stage_potential",
    "run_stage",
    "check_stage_contract",
    "calibrate_k_min",
]
