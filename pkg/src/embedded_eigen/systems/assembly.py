"""Plakken van stages tot een potentiaal op [0, J_W] en de bijbehorende controles.

Alle doelen worden continu over elke stage meegevolgd. De randhoek van een
nieuwe stage is de lopende Prüfer-hoek van het doel op het verbindingspunt,
zodat er geen tan-omweg nodig is.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import trapezoid

from embedded_eigen.core.config import ScalingPolicy
from embedded_eigen.core.exceptions import EpochContractError, PreconditionError
from embedded_eigen.systems.construction import (
    Stage,
    StagePotential,
    TrackedState,
    run_stage,
)
from embedded_eigen.systems.floquet import FloquetData
from embedded_eigen.systems.prufer import (
    BoundaryCondition,
    PruferTrajectory,
    boundary_angle,
    dense_grid,
    initial_prufer_angle,
)
from embedded_eigen.systems.reports import InequalityRecord
from embedded_eigen.systems.schedule import Schedule

logger = logging.getLogger(__name__)

GROWTH_BOUND = 2.0
STRICT_GROWTH_BOUND = 1.5


# =============================================================================
# Potentiaal
# =============================================================================


@dataclass(frozen=True, slots=True)
class AssembledPotential:
    """Stuksgewijze potentiaal: nul op [0, lead_in], daarna de stagepotentialen."""

    lead_in: float
    pieces: tuple[StagePotential, ...]
    _starts: NDArray[np.float64] = field(repr=False)

    @classmethod
    def from_pieces(cls, lead_in: float, pieces: Sequence[StagePotential]) -> AssembledPotential:
        starts = np.array([p.stage.x0 for p in pieces], dtype=float)
        if starts.size > 1 and not np.all(np.diff(starts) > 0.0):
            raise PreconditionError("AssembledPotential", "stages must be ordered")
        for prev, nxt in zip(pieces[:-1], pieces[1:]):
            if prev.stage.x1 != nxt.stage.x0:
                raise PreconditionError("AssembledPotential", "stages must abut exactly")
        return cls(float(lead_in), tuple(pieces), starts)

    @property
    def stages(self) -> tuple[Stage, ...]:
        return tuple(p.stage for p in self.pieces)

    @property
    def end(self) -> float:
        return self.pieces[-1].stage.x1 if self.pieces else self.lead_in

    def __call__(self, x: ArrayLike) -> NDArray[np.float64]:
        arr = np.asarray(x, dtype=float)
        flat = arr.reshape(-1)
        out = np.zeros_like(flat)
        index = np.searchsorted(self._starts, flat, side="right") - 1
        for i in np.unique(index[index >= 0]):
            mask = index == i
            out[mask] = self.pieces[i](flat[mask])
        return out.reshape(arr.shape)

    def value(self, x: float) -> float:
        return float(self(np.array([x]))[0])

    def samples(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """(x, V) op de gridpunten van alle stages, aansluitend en strikt stijgend."""
        grids = [np.array([0.0, self.lead_in])]
        for piece in self.pieces:
            grids.append(piece.theta.grid[1:])
        grid = np.concatenate(grids)
        return grid, self(grid)


# =============================================================================
# Resultaat
# =============================================================================


@dataclass(frozen=True, slots=True)
class EpochRecord:
    """Metingen van een epoch [J_{w-1}, J_w]."""

    epoch: int
    start: float
    end: float
    count: int
    ratio: int
    active: tuple[float, ...]
    ln_r_start: tuple[float, ...]
    ln_r_end: tuple[float, ...]
    envelope_sup: float
    envelope_constant: float
    h_ratio: float | None
    records: tuple[InequalityRecord, ...]

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.records)

    def to_dict(self) -> dict[str, Any]:
        return {
            "epoch": self.epoch,
            "start": self.start,
            "end": self.end,
            "N": self.count,
            "C": self.ratio,
            "active": list(self.active),
            "ln_r_start": list(self.ln_r_start),
            "ln_r_end": list(self.ln_r_end),
            "envelope_sup": self.envelope_sup,
            "envelope_constant": self.envelope_constant,
            "h_ratio": self.h_ratio,
            "records": [r.to_dict() for r in self.records],
            "pass": self.passed,
        }


@dataclass(frozen=True, slots=True)
class Assembly:
    """Geplakte potentiaal, volledige banen per eigenwaarde en epoch-metingen."""

    schedule: Schedule
    potential: AssembledPotential
    trajectories: tuple[PruferTrajectory, ...]
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
    def envelope_constant(self) -> float:
        """Gemeten M: max over epochs van sup|V|(x+1)/(N(w)C_w²)."""
        return max((e.envelope_constant for e in self.epochs), default=0.0)

    @property
    def envelope_sup(self) -> float:
        """sup |V(x)|(1+x) over de hele run."""
        return max((e.envelope_sup for e in self.epochs), default=0.0)

    def ln_r_at_joints(self, index: int) -> list[float]:
        traj = self.trajectories[index]
        return [traj.ln_r_at(float(x)) for x in self.schedule.J]

    def envelopes(self) -> dict[str, Any]:
        return {
            "sup_abs_V_times_1_plus_x": self.envelope_sup,
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


def _free_lead_in(fd: FloquetData, theta_start: float, end: float) -> PruferTrajectory:
    grid = dense_grid(fd, 0.0, end)
    theta = theta_start + fd.gamma(grid) - fd.gamma_at(0.0)
    return PruferTrajectory(grid, np.zeros_like(grid), theta, fd.energy, fd.identifier)


def epoch_contract_bound(schedule: Schedule, w: int, policy: ScalingPolicy) -> float:
    """ln van 2^{N(w)} · N(w-1)^p · C_w^{-p'}."""
    return (
        schedule.N[w] * math.log(2.0)
        + policy.p * math.log(schedule.N[w - 1])
        - policy.p_prime * math.log(schedule.C[w])
    )


def close_epoch(
    schedule: Schedule,
    w: int,
    policy: ScalingPolicy,
    start_ln_r: tuple[float, ...],
    end_ln_r: tuple[float, ...],
    envelope_sup: float,
    h_ratio: float | None,
    *,
    strict: bool,
    symbol: str = "V",
) -> EpochRecord:
    """Omhullende, h-omhullende en epoch-contract van epoch w als records.

    Raises
    ------
    EpochContractError
        Als strict en een actieve eigenwaarde het contract schendt.
    """
    constant = envelope_sup / (schedule.N[w] * schedule.C[w] ** 2)
    records = [
        InequalityRecord(
            f"epoch {w}: sup |{symbol}|(1+x)/(N(w)C_w^2) <= {policy.envelope_bound:g}",
            "assembly.envelope",
            constant,
            policy.envelope_bound,
            float(w),
        )
    ]
    if h_ratio is not None:
        records.append(
            InequalityRecord(
                f"epoch {w}: sup |{symbol}|(1+x)/h(x) <= 1",
                "assembly.h_envelope",
                h_ratio,
                1.0,
                float(w),
            )
        )
    bound = epoch_contract_bound(schedule, w, policy)
    active = schedule.active(w)
    for i in active:
        change = end_ln_r[i] - start_ln_r[i]
        energy = schedule.eigenvalues[i]
        record = InequalityRecord(
            f"epoch {w}: lnR change for E={energy:.6g}",
            "epoch.contract",
            change,
            bound,
            float(schedule.J[w]),
        )
        records.append(record)
        if not record.holds:
            logger.error(
                f"Epoch contract failed for E={energy:.6g} in epoch {w}: "
                f"{change:.4f} > {bound:.4f}"
            )
            if strict:
                raise EpochContractError(energy, w, change, bound)
    epoch = EpochRecord(
        epoch=w,
        start=float(schedule.J[w - 1]),
        end=float(schedule.J[w]),
        count=schedule.N[w],
        ratio=schedule.C[w],
        active=tuple(schedule.eigenvalues[i] for i in active),
        ln_r_start=start_ln_r,
        ln_r_end=end_ln_r,
        envelope_sup=envelope_sup,
        envelope_constant=constant,
        h_ratio=h_ratio,
        records=tuple(records),
    )
    logger.info(
        f"Epoch {w} [{epoch.start:g}, {epoch.end:g}]: N={epoch.count} C={epoch.ratio} "
        f"M={constant:.3g} pass={epoch.passed}"
    )
    return epoch


def assemble(
    schedule: Schedule,
    floquet_table: Sequence[FloquetData],
    couplings: Sequence[float],
    policy: ScalingPolicy,
    *,
    strict: bool = True,
) -> Assembly:
    """Bouw de potentiaal epoch voor epoch en volg alle eigenwaarden mee.

    Parameters
    ----------
    schedule:
        Schema uit ``build_schedule``.
    floquet_table:
        Floquet-data per eigenwaarde, in de volgorde van het schema.
    couplings:
        Stagekoppeling C(E) per eigenwaarde.
    policy:
        Schaalbeleid (K_min, p, p', omhullende grens, tolerantie).
    strict:
        Raise bij een geschonden epoch-contract in plaats van alleen rapporteren.

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
    if len(floquet_table) != count or len(couplings) != count:
        raise PreconditionError("assemble", "one Floquet frame and coupling per eigenvalue")
    for fd, energy in zip(floquet_table, schedule.eigenvalues):
        if not math.isclose(fd.energy, energy, rel_tol=1e-12, abs_tol=1e-12):
            raise PreconditionError("assemble", f"Floquet data for E={energy} missing")

    lead_in = float(schedule.lead_in)
    segments: list[list[PruferTrajectory]] = []
    theta: list[float] = []
    ln_r: list[float] = [0.0] * count
    for fd, angle in zip(floquet_table, schedule.angles):
        start = initial_prufer_angle(BoundaryCondition(angle, 0.0), fd)
        lead = _free_lead_in(fd, start, lead_in)
        segments.append([lead])
        theta.append(float(lead.theta[-1]))

    pieces: list[StagePotential] = []
    stage_records: list[InequalityRecord] = []
    epochs: list[EpochRecord] = []

    for w in range(1, schedule.epochs + 1):
        start_ln_r = tuple(ln_r)
        active = schedule.active(w)
        envelope_sup = 0.0
        h_ratio: float | None = None
        for slot in schedule.epoch_slots(w):
            i = slot.target
            fd = floquet_table[i]
            protected = [j for j in active if j != i]
            others = [j for j in range(count) if j != i]
            stage = Stage(
                E_target=fd.energy,
                protected=tuple(floquet_table[j].energy for j in protected),
                x0=float(slot.x0),
                x1=float(slot.x1),
                b=float(slot.b),
                theta0=boundary_angle(theta[i], fd, float(slot.x0)),
                C=float(couplings[i]),
                initial_angle=theta[i],
            )
            stage.validate(
                fd.k,
                [floquet_table[j].k for j in protected],
                policy.k_min,
                policy.angular_tol,
            )
            run = run_stage(
                stage,
                fd,
                [TrackedState(floquet_table[j], theta[j], ln_r[j]) for j in others],
                target_ln_r0=ln_r[i],
                rtol=policy.rtol,
            )
            pieces.append(run.potential)
            segments[i].append(run.target)
            theta[i], ln_r[i] = float(run.target.theta[-1]), float(run.target.ln_r[-1])
            for j, traj in zip(others, run.tracked):
                segments[j].append(traj)
                theta[j], ln_r[j] = float(traj.theta[-1]), float(traj.ln_r[-1])

            grid = run.target.grid
            values = np.abs(run.potential(grid))
            worst = int(np.argmax(values * (grid - stage.b)))
            stage_records.append(
                InequalityRecord(
                    f"stage {w}.{slot.slot}: sup |V|(x-b) <= C",
                    "stage.envelope",
                    float(values[worst] * (grid[worst] - stage.b)),
                    stage.C,
                    float(grid[worst]),
                )
            )
            excess = run.target.ln_r - run.target.ln_r[0]
            worst = int(np.argmax(excess))
            stage_records.append(
                InequalityRecord(
                    f"stage {w}.{slot.slot}: target lnR(x) <= lnR(x0)",
                    "stage.target.monotone",
                    float(excess[worst]),
                    1e-8,
                    float(grid[worst]),
                )
            )
            for j, traj in zip(others, run.tracked):
                if j not in protected:
                    continue
                growth = traj.ln_r - traj.ln_r[0]
                worst = int(np.argmax(growth))
                protected_ratio = math.exp(float(growth[worst]))
                stage_records.append(
                    InequalityRecord(
                        f"stage {w}.{slot.slot}: protected R ratio for E={traj.energy:.6g}",
                        "stage.protected.ratio",
                        protected_ratio,
                        GROWTH_BOUND,
                        float(grid[worst]),
                    )
                )
                if slot.x0 - slot.b >= policy.k_min:
                    stage_records.append(
                        InequalityRecord(
                            f"stage {w}.{slot.slot}: protected R ratio for "
                            f"E={traj.energy:.6g} <= {STRICT_GROWTH_BOUND:g}",
                            "stage.protected.ratio_strict",
                            protected_ratio,
                            STRICT_GROWTH_BOUND,
                            float(grid[worst]),
                        )
                    )
            envelope_sup = max(envelope_sup, float(np.max(values * (1.0 + grid))))
            if schedule.h is not None:
                ratio = float(np.max(values * (1.0 + grid) / schedule.h(grid)))
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
            )
        )

    return Assembly(
        schedule=schedule,
        potential=AssembledPotential.from_pieces(lead_in, pieces),
        trajectories=tuple(PruferTrajectory.concatenate(parts) for parts in segments),
        epochs=tuple(epochs),
        stage_records=tuple(stage_records),
        couplings=tuple(float(c) for c in couplings),
    )


# =============================================================================
# L²-staarten
# =============================================================================


@dataclass(frozen=True, slots=True)
class TailRow:
    """Epochbijdragen ∫ R² van een eigenwaarde en hun opeenvolgende verhoudingen."""

    energy: float
    activation: int
    contributions: tuple[float, ...]
    ratios: tuple[float, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "energy": self.energy,
            "activation_epoch": self.activation,
            "contributions": list(self.contributions),
            "ratios": list(self.ratios),
        }


@dataclass(frozen=True, slots=True)
class TailReport:
    rows: tuple[TailRow, ...]
    records: tuple[InequalityRecord, ...]
    control: tuple[float, ...] = ()

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.records)

    def to_dict(self) -> dict[str, Any]:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "control": list(self.control),
            "records": [r.to_dict() for r in self.records],
            "pass": self.passed,
        }


def epoch_contributions(traj: PruferTrajectory, joints: Sequence[float]) -> list[float]:
    """∫_{J_{w-1}}^{J_w} R² dx voor w = 0..W (w = 0 is de aanloop [0, J_0])."""
    bounds = [0.0, *joints]
    out = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        part = traj.window(lo, hi)
        if part.grid.size < 2:
            out.append(0.0)
            continue
        out.append(float(trapezoid(np.exp(2.0 * part.ln_r), part.grid)))
    return out


def build_tail_report(
    schedule: Schedule,
    contributions: Sequence[Sequence[float]],
    ratio_bound: float,
    *,
    control: bool = True,
) -> TailReport:
    """Verhoudingen c_w/c_{w-1} vanaf de epoch na de activatie, met records.

    De controle-rij is de onverstoorde referentie (R ≡ 1): de bijdragen zijn
    dan de epochlengtes en groeien mee met T_w.
    """
    rows: list[TailRow] = []
    records: list[InequalityRecord] = []
    for index, (energy, values) in enumerate(zip(schedule.eigenvalues, contributions)):
        activation = schedule.activation_epoch(index)
        ratios: list[float] = []
        if activation is not None:
            for w in range(activation + 1, schedule.epochs + 1):
                ratio = values[w] / values[w - 1]
                ratios.append(ratio)
                records.append(
                    InequalityRecord(
                        f"L2 epoch ratio for E={energy:.6g}, epoch {w}",
                        "l2.epoch_ratio",
                        ratio,
                        ratio_bound,
                        float(w),
                    )
                )
        rows.append(TailRow(energy, activation or 0, tuple(values), tuple(ratios)))
    joints = [float(j) for j in schedule.J]
    lengths = tuple(hi - lo for lo, hi in zip([0.0, *joints[:-1]], joints)) if control else ()
    report = TailReport(tuple(rows), tuple(records), lengths)
    logger.info(f"L2 tails: {len(records)} ratios checked, pass={report.passed}")
    return report


def verify_l2(
    assembly: Assembly, ratio_bound: float = 0.5, *, control: bool = True
) -> TailReport:
    """Controleer dat de epochbijdragen ∫ R² vanaf de activatie met factor <= ratio_bound
    dalen."""
    joints = [float(j) for j in assembly.schedule.J]
    contributions = [epoch_contributions(traj, joints) for traj in assembly.trajectories]
    return build_tail_report(assembly.schedule, contributions, ratio_bound, control=control)


__all__ = [
    "AssembledPotential",
    "EpochRecord",
    "Assembly",
    "TailRow",
    "TailReport",
    "epoch_contract_bound",
    "close_epoch",
    "assemble",
    "epoch_contributions",
    "build_tail_report",
    "verify_l2",
]
