"""Immutable rapport-modellen voor contractcontroles en experimenten.

Net als de viewmodels elders zijn dit frozen dataclasses zonder logica
buiten afgeleide eigenschappen en serialisatie.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from embedded_eigen.core.exceptions import ContractViolation


@dataclass(frozen=True, slots=True)
class InequalityRecord:
    """Een gecontroleerde ongelijkheid lhs <= rhs.

    Attributes
    ----------
    name:
        Leesbare omschrijving.
    anchor:
        Stabiele tag van de ongelijkheid (bijv. "stage.target.slope").
    lhs, rhs:
        Gemeten waarde en grens.
    location:
        Plaats (x of n) van het slechtste geval, indien zinvol.
    """

    name: str
    anchor: str
    lhs: float
    rhs: float
    location: float | None = None
    note: str = ""

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        if math.isnan(self.lhs) or math.isnan(self.rhs):
            return False
        return self.lhs <= self.rhs

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "location": self.location,
            "holds": self.holds,
            "note": self.note,
        }

    def to_violation(self) -> ContractViolation:
        return ContractViolation(self.name, self.anchor, self.lhs, self.rhs, self.location)


def _first_failure(records: tuple[InequalityRecord, ...]) -> InequalityRecord | None:
    return next((r for r in records if not r.holds), None)


@dataclass(frozen=True, slots=True)
class OscillationReport:
    """Suprema van de lopende oscillerende integralen (of sommen)."""

    energy: float
    other_energy: float | None
    start: float
    end: float
    sup_self: float
    sup_cross: float | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "energy": self.energy,
            "other_energy": self.other_energy,
            "start": self.start,
            "end": self.end,
            "sup_self": self.sup_self,
            "sup_cross": self.sup_cross,
        }


@dataclass(frozen=True, slots=True)
class StageReport:
    """Resultaat van de contractcontrole voor een enkele stage."""

    energy: float
    x0: float
    x1: float
    b: float
    coupling: float
    slope: float
    protected_ratios: tuple[tuple[float, float], ...]
    records: tuple[InequalityRecord, ...]
    diagnostics: tuple[OscillationReport, ...] = ()

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.records)

    def raise_if_failed(self) -> None:
        """Raise ContractViolation voor de eerste ongelijkheid die niet geldt."""
        failure = _first_failure(self.records)
        if failure is not None:
            raise failure.to_violation()

    def to_dict(self) -> dict[str, Any]:
        return {
            "energy": self.energy,
            "x0": self.x0,
            "x1": self.x1,
            "b": self.b,
            "coupling": self.coupling,
            "slope": self.slope,
            "protected_ratios": [list(p) for p in self.protected_ratios],
            "records": [r.to_dict() for r in self.records],
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "pass": self.passed,
        }


@dataclass(frozen=True, slots=True)
class ExperimentReport:
    """Rapport van een volledig experiment (verify-harnas of synthese).

    ``tables`` bevat de extra JSON-secties (schedule, epochs, envelopes, l2_tails).
    ``runtime`` wordt standaard niet geserialiseerd zodat rapporten bit-identiek zijn.
    """

    experiment_id: str
    inputs: dict[str, Any]
    records: tuple[InequalityRecord, ...]
    runtime: float = 0.0
    tables: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.records)

    def failures(self) -> list[InequalityRecord]:
        return [r for r in self.records if not r.holds]

    def raise_if_failed(self) -> None:
        failure = _first_failure(self.records)
        if failure is not None:
            raise failure.to_violation()

    def to_dict(self, include_runtime: bool = False) -> dict[str, Any]:
        data: dict[str, Any] = {
            "experiment": self.experiment_id,
            "inputs": self.inputs,
            "records": [r.to_dict() for r in self.records],
            **self.tables,
            "pass": self.passed,
        }
        if include_runtime:
            data["runtime"] = self.runtime
        return data


__all__ = ["InequalityRecord", "OscillationReport", "StageReport", "ExperimentReport"]
