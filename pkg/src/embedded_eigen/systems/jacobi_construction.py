"""Discrete stages: b'-rijen die een doel-energie laten vervallen.

Een stage op (n0, n1) met offset v kiest

    b'_{n+1} = C/(n - v) · sin 2θ(n),    n0 <= n <= n1 - 2,

met θ(n) = η(n) + γ(n) de lopende Prüfer-hoek van het doel, zodat de drager
strikt binnen (n0, n1) ligt.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from embedded_eigen.core.config import ScalingPolicy
from embedded_eigen.core.exceptions import PreconditionError, ResonantSetError
from embedded_eigen.systems.assembly import EpochRecord, TailReport, build_tail_report, close_epoch
from embedded_eigen.systems.construction import probe_angles
from embedded_eigen.systems.jacobi import (
    JacobiFloquet,
    JacobiTrajectory,
    PeriodicJacobi,
    evolve,
    jacobi_floquet,
    z_from_solution,
)
from embedded_eigen.systems.oscillation import ANGULAR_TOL, is_resonant_pair
from embedded_eigen.systems.reports import ExperimentReport, InequalityRecord
from embedded_eigen.systems.schedule import Schedule
from embedded_eigen.utils.math_helpers import fit_slope, rational_approximation, running_sup
from embedded_eigen.utils.profiler import profile_section

logger = logging.getLogger(__name__)

GROWTH_SLACK = 0.2
DEFAULT_EPS = 0.01
NO_EMBED_GATE = 1.0 / 3.0


def jacobi_stage_coupling(jf: JacobiFloquet, decay_exponent: float) -> float:
    """C(D) = 2·D·ω / min|φ|²: vervalsnelheid minstens D bij gemiddelde sin²2θ = 1/2."""
    return 2.0 * decay_exponent * jf.omega / jf.min_abs_sq


# =============================================================================
# Stage
# =============================================================================


@dataclass(frozen=True, slots=True)
class JacobiStage:
    """Discrete stage op sites n0..n1 met offset v; theta0 is θ(n0) van het doel."""

    E_target: float
    protected: tuple[float, ...]
    n0: int
    n1: int
    v: int
    theta0: float
    C: float

    def __post_init__(self) -> None:
        if not self.v < self.n0 < self.n1 - 1:
            raise PreconditionError(
                "JacobiStage", f"need v < n0 < n1 - 1, got {self.v}, {self.n0}, {self.n1}"
            )
        if self.C < 0.0:
            raise PreconditionError("JacobiStage", f"coupling must be non-negative, got {self.C}")

    def validate(
        self,
        k_target: float,
        k_protected: Sequence[float],
        k_min: float,
        angular_tol: float = ANGULAR_TOL,
    ) -> None:
        """Zelfde toelaatbaarheid en niet-resonantie als de continue stage."""
        if self.n0 - self.v < k_min:
            raise PreconditionError(
                "JacobiStage", f"n0 - v = {self.n0 - self.v} below K_min={k_min:g}"
            )
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
class JacobiStageRun:
    """b' op sites n0..n1 (b_prime[i] hoort bij site n0 + i) en de doelbaan."""

    stage: JacobiStage
    b_prime: NDArray[np.float64]
    target: JacobiTrajectory

    def envelope(self) -> tuple[float, int]:
        """max_m |b'_m|(m - 1 - v) en de site van het maximum."""
        sites = np.arange(self.stage.n0, self.stage.n1 + 1)
        scaled = np.abs(self.b_prime) * np.maximum(sites - 1 - self.stage.v, 0)
        worst = int(np.argmax(scaled))
        return float(scaled[worst]), int(sites[worst])


def synthesize_stage(
    stage: JacobiStage,
    jf: JacobiFloquet,
    *,
    eta0: float | None = None,
    ln_r0: float = 0.0,
) -> JacobiStageRun:
    """Voorwaartse recursie die b' en de doelbaan tegelijk oplevert.

    Zonder eta0 start het doel met θ(n0) = theta0, anders met η(n0) = eta0.
    """
    n0, n1, v = stage.n0, stage.n1, stage.v
    size = n1 - n0 + 1
    b_prime = np.zeros(size)
    ln_r = np.empty(size)
    theta = np.empty(size)
    eta = stage.theta0 - jf.gamma_mod(n0) if eta0 is None else eta0
    current = ln_r0
    omega = jf.omega
    gammas = jf.gamma_array(np.arange(n0, n1 + 1))
    abs_sq = jf.abs_sq_array(np.arange(n0, n1 + 1))
    with profile_section(f"jacobi stage E={stage.E_target:.6g} [{n0}, {n1}]"):
        for i in range(size - 1):
            th = eta + gammas[i]
            theta[i] = th
            ln_r[i] = current
            if i > size - 3:
                continue
            sin2 = math.sin(2.0 * th)
            bp = stage.C / (n0 + i - v) * sin2
            b_prime[i + 1] = bp
            s = bp * abs_sq[i] / omega
            sin_t = math.sin(th)
            real = 1.0 - s * sin2
            imag = 2.0 * s * sin_t * sin_t
            current += 0.5 * math.log(real * real + imag * imag)
            eta += math.atan2(imag, real)
    theta[-1] = eta + gammas[-1]
    ln_r[-1] = current
    target = JacobiTrajectory(np.arange(n0, n1 + 1), ln_r, theta, jf.energy)
    return JacobiStageRun(stage, b_prime, target)


@dataclass(frozen=True, slots=True)
class JacobiStageReport:
    energy: float
    n0: int
    n1: int
    v: int
    coupling: float
    slope: float
    protected_growth: tuple[tuple[float, float], ...]
    records: tuple[InequalityRecord, ...]

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.records)

    def raise_if_failed(self) -> None:
        for record in self.records:
            if not record.holds:
                raise record.to_violation()

    def to_dict(self) -> dict[str, Any]:
        return {
            "energy": self.energy,
            "n0": self.n0,
            "n1": self.n1,
            "v": self.v,
            "coupling": self.coupling,
            "slope": self.slope,
            "protected_growth": [list(p) for p in self.protected_growth],
            "records": [r.to_dict() for r in self.records],
            "pass": self.passed,
        }


def build_jacobi_stage(
    stage: JacobiStage,
    jf_target: JacobiFloquet,
    jf_protected: Sequence[JacobiFloquet],
    decay_exponent: float,
    *,
    eps: float = DEFAULT_EPS,
    k_min: float = 0.0,
    probes: int = 8,
    slope_slack: float = 0.1,
    growth_slack: float = GROWTH_SLACK,
    angular_tol: float = ANGULAR_TOL,
    strict: bool = False,
) -> tuple[JacobiStageRun, JacobiStageReport]:
    """Bouw b' op de stage en controleer omhullende, verval en beschermde groei.

    Beschermde groei: max ln(R(n)/R(n0)) <= ln(1 + growth_slack) + ε ln((n1-v)/(n0-v))
    over ``probes`` randhoeken. Met ``strict`` wordt de eerste geschonden
    ongelijkheid als ContractViolation opgegooid.
    """
    stage.validate(jf_target.k, [jf.k for jf in jf_protected], k_min, angular_tol)
    run = synthesize_stage(stage, jf_target)
    records: list[InequalityRecord] = []

    envelope, where = run.envelope()
    records.append(
        InequalityRecord(
            "|b'_m|(m-1-v) <= C", "jacobi.stage.envelope", envelope, stage.C, float(where)
        )
    )
    sites = run.target.sites
    scale = np.log((sites - stage.v) / (stage.n0 - stage.v))
    slope = fit_slope(scale, run.target.ln_r)
    records.append(
        InequalityRecord(
            "fitted target decay slope <= -D(1 - slack)",
            "jacobi.stage.target.slope",
            slope,
            -decay_exponent * (1.0 - slope_slack),
        )
    )

    span = math.log((stage.n1 - stage.v) / (stage.n0 - stage.v))
    allowance = math.log1p(growth_slack) + eps * span
    padded = np.zeros(stage.n1 + 2)
    padded[stage.n0 : stage.n1 + 1] = run.b_prime
    growth: list[tuple[float, float]] = []
    for jf in jf_protected:
        etas = [angle - jf.gamma_mod(stage.n0) for angle in probe_angles(probes)]
        trajs = evolve([jf] * probes, padded, stage.n0, stage.n1, etas)
        worst = max(float(np.max(t.ln_r - t.ln_r[0])) for t in trajs)
        growth.append((jf.energy, worst))
        records.append(
            InequalityRecord(
                f"protected lnR growth for E={jf.energy:.6g} <= ln(1+slack) + eps ln span",
                "jacobi.stage.protected.eps",
                worst,
                allowance,
            )
        )

    report = JacobiStageReport(
        energy=stage.E_target,
        n0=stage.n0,
        n1=stage.n1,
        v=stage.v,
        coupling=stage.C,
        slope=slope,
        protected_growth=tuple(growth),
        records=tuple(records),
    )
    level = logging.INFO if report.passed else logging.WARNING
    logger.log(
        level, f"Jacobi stage E={stage.E_target:.6g}: slope={slope:.4f} pass={report.passed}"
    )
    if strict:
        report.raise_if_failed()
    return run, report


def calibrate_coupling(
    jf: JacobiFloquet,
    decay_exponent: float,
    *,
    start: int = 1000,
    ratio: int = 10,
) -> float:
    """Startwaarde 2Dω/min|φ|², eenmaal bijgesteld met een proefstage [start, ratio·start]."""
    coupling = jacobi_stage_coupling(jf, decay_exponent)
    trial = JacobiStage(jf.energy, (), start, start * ratio, 0, math.pi / 4.0, coupling)
    run = synthesize_stage(trial, jf)
    slope = fit_slope(np.log(run.target.sites / start), run.target.ln_r)
    if -slope < decay_exponent and slope < 0.0:
        coupling *= 1.05 * decay_exponent / -slope
    logger.info(f"Calibrated Jacobi coupling for E={jf.energy:.6g}: C={coupling:.4f}")
    return coupling


# =============================================================================
# Ergodische sommen
# =============================================================================


@dataclass(frozen=True, slots=True)
class ErgodicReport:
    """Suprema van de partiele sommen en de kleinste (D, ε) met sup <= D + ε ln."""

    energy: float
    other_energy: float | None
    branch: str
    denominator: int | None
    sup_self: float
    sup_cross: float | None
    fitted_D: float
    fitted_eps: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "energy": self.energy,
            "other_energy": self.other_energy,
            "branch": self.branch,
            "denominator": self.denominator,
            "sup_self": self.sup_self,
            "sup_cross": self.sup_cross,
            "fitted_D": self.fitted_D,
            "fitted_eps": self.fitted_eps,
        }


def classify_quasimomentum(
    k: float, max_denominator: int = 10**6, tol: float = 1e-13
) -> Fraction | None:
    """k/π als breuk met noemer <= max_denominator, of None (irrationeel behandeld)."""
    return rational_approximation(k / math.pi, max_denominator, tol)


def _fit_envelope(
    partial: NDArray[np.float64], log_span: NDArray[np.float64]
) -> tuple[float, float]:
    sup = running_sup(np.abs(partial))
    eps = max(fit_slope(log_span, sup), 0.0) if log_span.size > 2 else 0.0
    return float(np.max(sup - eps * log_span)), eps


def ergodic_sum_check(
    jf: JacobiFloquet,
    f: Sequence[float],
    record: JacobiTrajectory,
    v: int,
    other: JacobiTrajectory | None = None,
    *,
    max_denominator: int = 10**6,
    rational_tol: float = 1e-13,
) -> ErgodicReport:
    """Partiele sommen Σ f(t) cos 4θ(t)/(t-v) en Σ f(t) sin 2θ(t,Ê) sin 2θ(t,E)/(t-v).

    ``f`` is een periode van een q-periodieke rij (f[t mod q]).
    """
    fraction = classify_quasimomentum(jf.k, max_denominator, rational_tol)
    branch = "rational" if fraction is not None else "irrational"
    denominator = fraction.denominator if fraction is not None else None
    if record.sites.size == 0:
        return ErgodicReport(jf.energy, None, "empty", denominator, 0.0, None, 0.0, 0.0)
    if np.any(record.sites <= v):
        raise PreconditionError("ergodic_sum_check", "sites must lie beyond the offset v")

    period = np.asarray(f, dtype=float)
    weights = period[np.mod(record.sites, period.size)] / (record.sites - v)
    log_span = np.log((record.sites - v) / (record.sites[0] - v))
    partial = np.cumsum(weights * np.cos(4.0 * record.theta))
    fitted_D, fitted_eps = _fit_envelope(partial, log_span)
    sup_self = float(np.max(np.abs(partial)))

    sup_cross: float | None = None
    other_energy: float | None = None
    if other is not None:
        if not np.array_equal(other.sites, record.sites):
            raise PreconditionError("ergodic_sum_check", "records need common sites")
        other_energy = other.energy
        cross = np.cumsum(weights * np.sin(2.0 * other.theta) * np.sin(2.0 * record.theta))
        sup_cross = float(np.max(np.abs(cross)))
        cross_D, cross_eps = _fit_envelope(cross, log_span)
        fitted_D, fitted_eps = max(fitted_D, cross_D), max(fitted_eps, cross_eps)

    return ErgodicReport(
        energy=jf.energy,
        other_energy=other_energy,
        branch=branch,
        denominator=denominator,
        sup_self=sup_self,
        sup_cross=sup_cross,
        fitted_D=fitted_D,
        fitted_eps=fitted_eps,
    )


def mean_block_sum(
    record: JacobiTrajectory, block: int, v: int, span_fraction: float = 0.1
) -> float:
    """Gemiddelde |Σ cos 4θ| over blokken van lengte ``block`` vlak na de start.

    Bij rationale k/π = N1/N en blok N·q heffen de termen elkaar exact op als θ
    niet verstoord is; de rest schaalt als 1/(n0 - v).
    """
    start = int(record.sites[0])
    stop = start + max(block, int(span_fraction * (start - v)))
    window = record.window(start, stop)
    values = np.cos(4.0 * window.theta)
    count = values.size // block
    if count == 0:
        return 0.0
    sums = values[: count * block].reshape(count, block).sum(axis=1)
    return float(np.mean(np.abs(sums)))


# =============================================================================
# Assemblage
# =============================================================================


@dataclass(frozen=True, slots=True)
class JacobiAssembly:
    """Volledige b'-rij (index = site), banen per eigenwaarde en epoch-metingen."""

    schedule: Schedule
    b_prime: NDArray[np.float64]
    trajectories: tuple[JacobiTrajectory, ...]
    epochs: tuple[EpochRecord, ...]
    stage_records: tuple[InequalityRecord, ...]
    couplings: tuple[float, ...]

    @property
    def records(self) -> list[InequalityRecord]:
        out = list(self.stage_records)
        for epoch in self.epochs:
            out.extend(epoch.records)
        return out

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.records)

    @property
    def envelope_sup(self) -> float:
        sites = np.arange(self.b_prime.size)
        return float(np.max(np.abs(self.b_prime) * (1.0 + sites)))

    @property
    def envelope_constant(self) -> float:
        return max((e.envelope_constant for e in self.epochs), default=0.0)

    def envelopes(self) -> dict[str, Any]:
        return {
            "sup_abs_b_prime_times_1_plus_n": self.envelope_sup,
            "envelope_constant_M": self.envelope_constant,
            "per_epoch": [
                {
                    "epoch": e.epoch,
                    "sup": e.envelope_sup,
                    "M": e.envelope_constant,
                    "h_ratio": e.h_ratio,
                }
                for e in self.epochs
            ],
        }


def initial_state(jf: JacobiFloquet, angle: float) -> complex:
    """Z(1) bij (u(0), u(1)) = (cos θ_j, sin θ_j), dus u(1)/u(0) = tan θ_j."""
    return z_from_solution(math.cos(angle), math.sin(angle), 1, jf)


def assemble_jacobi(
    schedule: Schedule,
    frames: Sequence[JacobiFloquet],
    couplings: Sequence[float],
    policy: ScalingPolicy,
    *,
    strict: bool = True,
) -> JacobiAssembly:
    """Discrete tegenhanger van ``assemble`` met ε_w-toelagen per epoch.

    Raises
    ------
    PreconditionError
        Als de tabel niet bij het schema past of een stage ontoelaatbaar is.
    ResonantSetError
        Bij resonante doelen binnen een stage.
    EpochContractError
        Als strict en een actieve eigenwaarde het epoch-contract schendt.
    """
    count = len(schedule.eigenvalues)
    if len(frames) != count or len(couplings) != count:
        raise PreconditionError("assemble_jacobi", "one Floquet frame and coupling per eigenvalue")
    end = schedule.end
    b_prime = np.zeros(end + 2)

    starts = [initial_state(jf, angle) for jf, angle in zip(frames, schedule.angles)]
    lead = evolve(
        frames,
        b_prime,
        1,
        schedule.lead_in,
        [cmath.phase(z) for z in starts],
        [math.log(abs(z)) for z in starts],
    )
    segments: list[list[JacobiTrajectory]] = [[t] for t in lead]
    ln_r = [float(t.ln_r[-1]) for t in lead]
    eta = [cmath.phase(z) for z in starts]

    stage_records: list[InequalityRecord] = []
    epochs: list[EpochRecord] = []
    for w in range(1, schedule.epochs + 1):
        start_ln_r = tuple(ln_r)
        active = schedule.active(w)
        eps = float(schedule.eps[w])
        envelope_sup = 0.0
        h_ratio: float | None = None
        for slot in schedule.epoch_slots(w):
            i = slot.target
            jf = frames[i]
            protected = [j for j in active if j != i]
            others = [j for j in range(count) if j != i]
            stage = JacobiStage(
                E_target=jf.energy,
                protected=tuple(frames[j].energy for j in protected),
                n0=slot.x0,
                n1=slot.x1,
                v=slot.b,
                theta0=(eta[i] + jf.gamma_mod(slot.x0)) % math.pi,
                C=float(couplings[i]),
            )
            stage.validate(jf.k, [frames[j].k for j in protected], policy.k_min, policy.angular_tol)
            run = synthesize_stage(stage, jf, eta0=eta[i], ln_r0=ln_r[i])
            b_prime[slot.x0 : slot.x1 + 1] = run.b_prime
            segments[i].append(run.target)
            ln_r[i] = float(run.target.ln_r[-1])
            eta[i] = float(run.target.theta[-1]) - jf.gamma_mod(slot.x1)

            tracked = evolve(
                [frames[j] for j in others],
                b_prime,
                slot.x0,
                slot.x1,
                [eta[j] for j in others],
                [ln_r[j] for j in others],
            )
            span = math.log((slot.x1 - slot.b) / (slot.x0 - slot.b))
            for j, traj in zip(others, tracked):
                segments[j].append(traj)
                ln_r[j] = float(traj.ln_r[-1])
                eta[j] = float(traj.theta[-1]) - frames[j].gamma_mod(slot.x1)
                if j in protected:
                    stage_records.append(
                        InequalityRecord(
                            f"stage {w}.{slot.slot}: protected lnR growth for E={traj.energy:.6g}",
                            "jacobi.protected.eps",
                            float(np.max(traj.ln_r - traj.ln_r[0])),
                            math.log1p(GROWTH_SLACK) + eps * span,
                            float(slot.x1),
                        )
                    )
            envelope, where = run.envelope()
            stage_records.append(
                InequalityRecord(
                    f"stage {w}.{slot.slot}: |b'_m|(m-1-v) <= C",
                    "jacobi.stage.envelope",
                    envelope,
                    stage.C,
                    float(where),
                )
            )
            sites = np.arange(slot.x0, slot.x1 + 1)
            values = np.abs(run.b_prime) * (1.0 + sites)
            envelope_sup = max(envelope_sup, float(np.max(values)))
            if schedule.h is not None:
                ratio = float(np.max(values / schedule.h(sites)))
                h_ratio = ratio if h_ratio is None else max(h_ratio, ratio)

        epochs.append(
            close_epoch(
                schedule,
                w,
                policy,
                start_ln_r,
                tuple(ln_r),
                envelope_sup,
                h_ratio,
                strict=strict,
                symbol="b'",
            )
        )

    return JacobiAssembly(
        schedule=schedule,
        b_prime=b_prime,
        trajectories=tuple(JacobiTrajectory.concatenate(parts) for parts in segments),
        epochs=tuple(epochs),
        stage_records=tuple(stage_records),
        couplings=tuple(float(c) for c in couplings),
    )


def jacobi_epoch_contributions(traj: JacobiTrajectory, joints: Sequence[int]) -> list[float]:
    """Σ R(n)² per epoch; epoch 0 is de aanloop."""
    bounds = [0, *joints]
    out = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        mask = (traj.sites > lo) & (traj.sites <= hi)
        out.append(float(np.sum(np.exp(2.0 * traj.ln_r[mask]))))
    return out


def verify_l2_jacobi(assembly: JacobiAssembly, ratio_bound: float = 0.5) -> TailReport:
    """ℓ²-tegenhanger van ``verify_l2``."""
    contributions = [
        jacobi_epoch_contributions(traj, assembly.schedule.J) for traj in assembly.trajectories
    ]
    return build_tail_report(assembly.schedule, contributions, ratio_bound)


# =============================================================================
# Geen inbedding bij kleine storing
# =============================================================================


PerturbationLike = Callable[[NDArray[np.int64]], ArrayLike] | ArrayLike


def _as_sequence(b_prime: PerturbationLike, end: int) -> NDArray[np.float64]:
    if callable(b_prime):
        return np.asarray(b_prime(np.arange(end + 2)), dtype=float)
    values = np.asarray(b_prime, dtype=float)
    if values.size < end + 2:
        raise PreconditionError("no_embed_jacobi", "b' sequence shorter than the horizon")
    return values


def no_embed_jacobi(
    J0: PeriodicJacobi,
    b_prime: PerturbationLike,
    E: float,
    horizon: int,
    *,
    start: int = 10,
    probes: int = 8,
    slack: float = 0.5,
) -> ExperimentReport:
    """lnR(n) >= lnR(n0) - (1/3) ln(n/n0) - slack voor alle randhoeken.

    Raises
    ------
    PreconditionError
        Als sup_{n >= n0} |b'_n| (1+n) max|φ|²/ω groter is dan 1/3.
    """
    jf = jacobi_floquet(J0, E)
    values = _as_sequence(b_prime, horizon)
    sites = np.arange(start, horizon + 2)
    envelope = float(np.max(np.abs(values[start : horizon + 2]) * (1.0 + sites)))
    gate = envelope * jf.max_abs_sq / jf.omega
    if gate > NO_EMBED_GATE:
        logger.error(f"No-embedding gate failed: {gate:.4g} > 1/3")
        raise PreconditionError("no_embed_jacobi", f"envelope gate {gate:.4g} exceeds 1/3")

    etas = [angle - jf.gamma_mod(start) for angle in probe_angles(probes)]
    trajs = evolve([jf] * probes, values, start, horizon, etas)
    log_ratio = np.log(trajs[0].sites / start)
    records = [
        InequalityRecord(
            "gate sup |b'|(1+n) max|phi|^2/omega <= 1/3", "no_embedding.gate", gate, NO_EMBED_GATE
        )
    ]
    for angle, traj in zip(probe_angles(probes), trajs):
        margin = traj.ln_r - traj.ln_r[0] + log_ratio / 3.0
        worst = int(np.argmax(-margin))
        records.append(
            InequalityRecord(
                f"lnR(n) - lnR(n0) + ln(n/n0)/3 >= -slack, theta0={angle:.4f}",
                "no_embedding.lower_bound",
                float(-margin[worst]),
                slack,
                float(traj.sites[worst]),
            )
        )
    report = ExperimentReport(
        experiment_id="no_embedding_jacobi",
        inputs={"E": E, "horizon": horizon, "start": start, "probes": probes, "slack": slack},
        records=tuple(records),
    )
    logger.info(f"Jacobi no-embedding E={E:.6g}: pass={report.passed}")
    return report


__all__ = [
    "GROWTH_SLACK",
    "NO_EMBED_GATE",
    "jacobi_stage_coupling",
    "JacobiStage",
    "JacobiStageRun",
    "JacobiStageReport",
    "synthesize_stage",
    "build_jacobi_stage",
    "calibrate_coupling",
    "ErgodicReport",
    "classify_quasimomentum",
    "ergodic_sum_check",
    "mean_block_sum",
    "JacobiAssembly",
    "initial_state",
    "assemble_jacobi",
    "jacobi_epoch_contributions",
    "verify_l2_jacobi",
    "no_embed_jacobi",
]
