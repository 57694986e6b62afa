"""Epoch-schema voor het aan elkaar plakken van stages.

Boekhouding gebeurt in gehele getallen:

    T_w = T_{w-1} · C_w,    J_w = Σ_{i=0}^{w} N(i) · T_i,    N(0) = 1.

[0, J_0] is een vrij aanloopinterval. Epoch w bestaat uit N(w) stages van
lengte T_w; stage t begint in J_{w-1} + t·T_w met offset b = t·T_w, zodat
x0 - b = J_{w-1} voor elke stage van de epoch.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from embedded_eigen.core.config import ScalingPolicy
from embedded_eigen.core.exceptions import InfeasibleScheduleError, PreconditionError
from embedded_eigen.systems.reports import InequalityRecord

logger = logging.getLogger(__name__)

Envelope = Callable[[ArrayLike], NDArray[np.float64]]

UNSCALED_RATIO_BASE = 4
UNSCALED_EPOCH_BASE = 1000
H_SAMPLES = 1025
GROWTH_PER_DECADE = 1e-3


class GrowthMode(Enum):
    """Eindig aantal doelen of een oneindige opsomming."""

    FINITE = "finite"
    INFINITE = "infinite"


# =============================================================================
# Omhullende h
# =============================================================================


def envelope_function(kind: str, scale: float = 1.0) -> Envelope:
    """Omhullende h(x) voor de oneindige modus.

    ``log``: scale·ln(2+x), ``loglog``: scale·ln(ln(e+x)) + scale,
    ``sqrt``: scale·sqrt(1+x), ``constant``: scale (begrensd, wordt geweigerd).
    """
    if kind == "log":
        return lambda x: scale * np.log(2.0 + np.asarray(x, dtype=float))
    if kind == "loglog":
        return lambda x: scale * (np.log(np.log(math.e + np.asarray(x, dtype=float))) + 1.0)
    if kind == "sqrt":
        return lambda x: scale * np.sqrt(1.0 + np.asarray(x, dtype=float))
    if kind == "constant":
        return lambda x: np.full_like(np.asarray(x, dtype=float), scale)
    raise ValueError(f"Unknown envelope kind: {kind}")


def is_unbounded(h: Envelope) -> bool:
    """Heuristiek voor h → ∞: elk van de laatste vijf decaden stijgt h met minstens
    GROWTH_PER_DECADE maal de eindwaarde (ln ln x haalt dit nog, 1 - 1/x niet)."""
    values = np.asarray(h(10.0 ** np.arange(2, 16)), dtype=float)
    if not np.all(np.isfinite(values)) or values[-1] <= 0.0:
        return False
    steps = np.diff(values[-6:])
    return bool(np.all(steps > GROWTH_PER_DECADE * values[-1]))


def sampled_minimum(h: Envelope, lo: float, hi: float, samples: int = H_SAMPLES) -> float:
    """Minimum van h op [lo, hi], bemonsterd op een lineair en een geometrisch grid."""
    grid = np.concatenate(
        [np.linspace(lo, hi, samples), np.geomspace(max(lo, 1.0), max(hi, 1.0), samples)]
    )
    return float(np.min(h(grid)))


# =============================================================================
# Schema
# =============================================================================


@dataclass(frozen=True, slots=True)
class StageSlot:
    """Plaats van een stage in het schema: [x0, x1] met offset b."""

    epoch: int
    slot: int
    target: int
    x0: int
    x1: int
    b: int


@dataclass(frozen=True, slots=True)
class ConstraintAudit:
    """Schemavoorwaarde in de vorm uit de constructie en de geschaalde vervanging."""

    name: str
    epoch: int
    unscaled_lhs: float
    unscaled_rhs: float
    scaled_lhs: float
    scaled_rhs: float

    @property
    def unscaled_holds(self) -> bool:
        return self.unscaled_lhs >= self.unscaled_rhs

    @property
    def scaled_holds(self) -> bool:
        return self.scaled_lhs >= self.scaled_rhs

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "epoch": self.epoch,
            "unscaled": {
                "lhs": self.unscaled_lhs,
                "rhs": self.unscaled_rhs,
                "holds": self.unscaled_holds,
            },
            "scaled": {
                "lhs": self.scaled_lhs,
                "rhs": self.scaled_rhs,
                "holds": self.scaled_holds,
            },
        }


@dataclass(frozen=True, slots=True)
class Schedule:
    """Volledig epoch-schema; index w loopt van 0 (aanloop) tot en met W."""

    eigenvalues: tuple[float, ...]
    angles: tuple[float, ...]
    mode: GrowthMode
    N: tuple[int, ...]
    C: tuple[int, ...]
    T: tuple[int, ...]
    J: tuple[int, ...]
    audits: tuple[ConstraintAudit, ...] = ()
    h_records: tuple[InequalityRecord, ...] = ()
    h: Envelope | None = field(default=None, repr=False, compare=False)

    @property
    def epochs(self) -> int:
        return len(self.T) - 1

    @property
    def lead_in(self) -> int:
        return self.J[0]

    @property
    def end(self) -> int:
        return self.J[-1]

    @property
    def eps(self) -> tuple[Fraction, ...]:
        """Groeitoelage ε_w = 1/(100·N(w)) per epoch (discreet geval)."""
        return tuple(Fraction(1, 100 * n) for n in self.N)

    def active(self, w: int) -> tuple[int, ...]:
        """Indices van de doelen die in epoch w een stage krijgen."""
        return tuple(range(self.N[w]))

    def activation_epoch(self, index: int) -> int | None:
        """Eerste epoch w >= 1 waarin doel ``index`` actief is."""
        return next((w for w in range(1, self.epochs + 1) if index < self.N[w]), None)

    def epoch_slots(self, w: int) -> list[StageSlot]:
        if not 1 <= w <= self.epochs:
            raise IndexError(f"Epoch {w} outside 1..{self.epochs}")
        start, length = self.J[w - 1], self.T[w]
        return [
            StageSlot(w, t, t, start + t * length, start + (t + 1) * length, t * length)
            for t in range(self.N[w])
        ]

    def slots(self) -> Iterator[StageSlot]:
        for w in range(1, self.epochs + 1):
            yield from self.epoch_slots(w)

    def epoch_of(self, x: float) -> int:
        """Epoch die x bevat (0 voor de aanloop)."""
        return min(int(np.searchsorted(self.J, x, side="left")), self.epochs)

    def identity_records(self) -> list[InequalityRecord]:
        """Exacte controle van de recursies, als |verschil| <= 0."""
        records: list[InequalityRecord] = []
        for w in range(1, self.epochs + 1):
            records.append(
                InequalityRecord(
                    f"T_{w} = T_{w - 1}·C_{w}",
                    "schedule.recurrence",
                    float(abs(self.T[w] - self.T[w - 1] * self.C[w])),
                    0.0,
                    float(w),
                )
            )
        for w in range(self.epochs + 1):
            total = sum(self.N[i] * self.T[i] for i in range(w + 1))
            records.append(
                InequalityRecord(
                    f"J_{w} = sum N(i)·T_i",
                    "schedule.epoch_end",
                    float(abs(self.J[w] - total)),
                    0.0,
                    float(w),
                )
            )
        return records

    def records(self) -> list[InequalityRecord]:
        """Identiteiten, geschaalde voorwaarden en (oneindige modus) de h-voorwaarde."""
        records = self.identity_records()
        for audit in self.audits:
            records.append(
                InequalityRecord(
                    f"{audit.name} (scaled)",
                    f"schedule.{audit.name}",
                    audit.scaled_rhs,
                    audit.scaled_lhs,
                    float(audit.epoch),
                    note=f"unscaled form holds: {audit.unscaled_holds}",
                )
            )
        records.extend(self.h_records)
        return records

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode.value,
            "eigenvalues": list(self.eigenvalues),
            "angles": list(self.angles),
            "epochs": [
                {
                    "epoch": w,
                    "N": self.N[w],
                    "C": self.C[w],
                    "T": self.T[w],
                    "J": self.J[w],
                    "eps": str(self.eps[w]),
                }
                for w in range(self.epochs + 1)
            ],
            "audits": [a.to_dict() for a in self.audits],
            "h_checks": [r.to_dict() for r in self.h_records],
        }


def _ratio_floor(policy: ScalingPolicy, next_count: int) -> int:
    return max(policy.c_min, math.ceil(policy.ratio_base**next_count - 1e-12))


def build_schedule(
    eigenvalues: Sequence[float],
    angles: Sequence[float],
    mode: GrowthMode | str,
    policy: ScalingPolicy,
    *,
    epochs: int,
    h: Envelope | None = None,
    couplings: Sequence[float] | None = None,
) -> Schedule:
    """Bouw een schema met W = epochs epochs.

    N(w) stijgt met stappen van 1 om de ``policy.increment_every`` epochs, tot
    het aantal opgegeven doelen. C_w is het kleinste gehele getal
    >= max(c_min, ratio_base^{N(w+1)}) dat niet onder C_{w-1} ligt.

    In de oneindige modus moet elke epoch voldoen aan

        max_{actief} C(E) · (J_w + 1) / J_{w-1} <= h_margin · min_{[J_{w-1}, J_w]} h,

    wat |V(x)|(1+x) <= h(x) garandeert. Faalt dit, dan wordt de verhoging van
    N(w) een epoch uitgesteld; lukt het dan nog niet, dan volgt
    InfeasibleScheduleError("h").

    Raises
    ------
    PreconditionError
        Bij een lege doelset of ongelijke lengtes.
    InfeasibleScheduleError
        "scaling" als T_w >= epoch_base^w niet haalbaar is, "h" bij een begrensde
        h of een geschonden h-voorwaarde.
    """
    mode = GrowthMode(mode)
    if not eigenvalues:
        raise PreconditionError("build_schedule", "empty target set")
    if len(angles) != len(eigenvalues):
        raise PreconditionError("build_schedule", "one boundary angle per eigenvalue required")
    if epochs < 1:
        raise PreconditionError("build_schedule", f"need at least one epoch, got {epochs}")
    if couplings is not None and len(couplings) != len(eigenvalues):
        raise PreconditionError("build_schedule", "one coupling per eigenvalue required")
    if mode is GrowthMode.INFINITE:
        if h is None or couplings is None:
            raise PreconditionError("build_schedule", "infinite mode needs h and couplings")
        if not is_unbounded(h):
            logger.error("Envelope h does not grow without bound")
            raise InfeasibleScheduleError("h (bounded envelope)")

    cap = len(eigenvalues)
    every = max(1, policy.increment_every)
    N: list[int] = [1]
    C: list[int] = [1]
    T: list[int] = [policy.t0]
    J: list[int] = [policy.t0]
    audits: list[ConstraintAudit] = []
    h_records: list[InequalityRecord] = []
    last_increment = 1

    for w in range(1, epochs + 1):
        proposed = N[-1]
        if w >= 2 and N[-1] < cap and w - last_increment >= every:
            proposed = N[-1] + 1
        candidates = [proposed] if proposed == N[-1] else [proposed, N[-1]]

        accepted = None
        for count in candidates:
            ratio = max(_ratio_floor(policy, min(count + 1, cap)), C[-1])
            length = T[-1] * ratio
            end = J[-1] + count * length
            if mode is GrowthMode.INFINITE:
                assert h is not None and couplings is not None
                coupling = max(couplings[:count])
                lhs = coupling * (end + 1) / J[-1]
                floor = sampled_minimum(h, J[-1], end)
                record = InequalityRecord(
                    f"max C(E)·(J_{w}+1)/J_{w - 1} <= margin·min h",
                    "schedule.h",
                    lhs,
                    policy.h_margin * floor,
                    float(w),
                    note=f"unscaled form C_w^2 N(w) <= min h/100: "
                    f"{ratio * ratio * count <= floor / 100.0}",
                )
                if not record.holds:
                    logger.info(
                        f"Epoch {w}: h condition fails for N={count} ({lhs:.4g} > {floor:.4g})"
                    )
                    continue
                h_records.append(record)
            accepted = (count, ratio, length, end)
            break
        if accepted is None:
            logger.error(f"No N(w) satisfies the h condition in epoch {w}")
            raise InfeasibleScheduleError("h", epoch=w)

        count, ratio, length, end = accepted
        if count > N[-1]:
            last_increment = w
        N.append(count)
        C.append(ratio)
        T.append(length)
        J.append(end)

        next_count = min(count + 1, cap)
        audits.append(
            ConstraintAudit(
                "ratio",
                w,
                float(ratio),
                float(UNSCALED_RATIO_BASE**next_count),
                float(ratio),
                policy.ratio_base**next_count,
            )
        )
        audits.append(
            ConstraintAudit(
                "length",
                w,
                float(length),
                float(UNSCALED_EPOCH_BASE**w),
                float(length),
                float(policy.epoch_base**w),
            )
        )
        if length < policy.epoch_base**w:
            logger.error(f"T_{w}={length} below epoch_base^{w}={policy.epoch_base**w}")
            raise InfeasibleScheduleError("scaling", epoch=w)

    if mode is GrowthMode.INFINITE and N[-1] == cap:
        logger.warning(f"Enumeration exhausted: all {cap} eigenvalues active by epoch {epochs}")
    schedule = Schedule(
        eigenvalues=tuple(float(e) for e in eigenvalues),
        angles=tuple(float(a) for a in angles),
        mode=mode,
        N=tuple(N),
        C=tuple(C),
        T=tuple(T),
        J=tuple(J),
        audits=tuple(audits),
        h_records=tuple(h_records),
        h=h,
    )
    logger.info(
        f"Schedule ({mode.value}): W={epochs}, N={schedule.N[1:]}, C={schedule.C[1:]}, "
        f"J_W={schedule.end}"
    )
    return schedule


__all__ = [
    "Envelope",
    "GrowthMode",
    "StageSlot",
    "ConstraintAudit",
    "Schedule",
    "envelope_function",
    "is_unbounded",
    "sampled_minimum",
    "build_schedule",
]
