"""Experimenten die de hoofdresultaten als uitvoerbare controles verpakken.

Elk experiment levert een ``ExperimentReport`` met een record per gecontroleerde
ongelijkheid. Continue en discrete operatoren lopen via dezelfde functies; het
type van de ongestoorde operator bepaalt de route.
"""

from __future__ import annotations

import logging
import math
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from embedded_eigen.core.config import ScalingPolicy
from embedded_eigen.core.exceptions import PreconditionError, ResonantSetError
from embedded_eigen.core.protocols import EnvelopeBounded
from embedded_eigen.systems.assembly import Assembly, assemble, verify_l2
from embedded_eigen.systems.bands import BandStructure
from embedded_eigen.systems.construction import probe_angles, stage_coupling
from embedded_eigen.systems.floquet import PeriodicPotential, floquet_solution, quasimomentum
from embedded_eigen.systems.jacobi import PeriodicJacobi, jacobi_floquet, jacobi_quasimomentum
from embedded_eigen.systems.jacobi_construction import (
    NO_EMBED_GATE,
    JacobiAssembly,
    PerturbationLike,
    assemble_jacobi,
    calibrate_coupling,
    no_embed_jacobi,
    verify_l2_jacobi,
)
from embedded_eigen.systems.oscillation import ANGULAR_TOL, is_resonant_pair
from embedded_eigen.systems.prufer import (
    BoundaryCondition,
    Perturbation,
    initial_prufer_angle,
    integrate_prufer_many,
    zero_perturbation,
)
from embedded_eigen.systems.reports import ExperimentReport, InequalityRecord
from embedded_eigen.systems.schedule import Envelope, GrowthMode, build_schedule
from embedded_eigen.utils.math_helpers import fit_slope
from embedded_eigen.utils.profiler import profile_section

logger = logging.getLogger(__name__)

Operator = PeriodicPotential | PeriodicJacobi

GATE_POINTS_PER_UNIT = 10
GATE_CHUNK = 100_000
TRACE_POINTS = 4001


# =============================================================================
# Resonantie
# =============================================================================


@dataclass(frozen=True, slots=True)
class QuasimomentumTable:
    """Gevalideerde quasimomenta van de doelset.

    ``half_band`` is waar als alle k in (0, π/2) of alle k in (π/2, π) liggen;
    de somvoorwaarde is dan automatisch vervuld.
    """

    energies: tuple[float, ...]
    k: tuple[float, ...]
    band_indices: tuple[int | None, ...]
    half_band: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "energies": list(self.energies),
            "k": list(self.k),
            "band_indices": list(self.band_indices),
            "half_band": self.half_band,
        }


def resonance_guard(
    energies: Sequence[float],
    k_of: Callable[[float], float],
    bands: BandStructure | None = None,
    *,
    stage_targets: bool = True,
    angular_tol: float = ANGULAR_TOL,
) -> QuasimomentumTable:
    """Bereken k(E_i) en weiger gelijke k, paren met k + k̂ = π en (voor stagedoelen) k = π/2.

    Raises
    ------
    NotInBandError
        Via ``k_of`` als een energie niet in het inwendige van een band ligt.
    ResonantSetError
        Met alle gevonden paren.
    """
    ks = [k_of(float(energy)) for energy in energies]
    pairs: list[tuple[float, float, str]] = []
    for i, (energy, k) in enumerate(zip(energies, ks)):
        if stage_targets and abs(k - math.pi / 2.0) < angular_tol:
            pairs.append((energy, energy, "quasimomentum equals pi/2"))
        for other, k_hat in zip(energies[i + 1 :], ks[i + 1 :]):
            if abs(k - k_hat) < angular_tol:
                pairs.append((energy, other, "equal quasimomenta"))
            elif is_resonant_pair(k, k_hat, angular_tol):
                pairs.append((energy, other, "k sum equals pi"))
    if pairs:
        logger.error(f"Resonance guard rejected {len(pairs)} pair(s)")
        raise ResonantSetError(pairs)

    half_band = all(k < math.pi / 2.0 for k in ks) or all(k > math.pi / 2.0 for k in ks)
    indices = tuple(bands.band_index(e) if bands is not None else None for e in energies)
    table = QuasimomentumTable(tuple(float(e) for e in energies), tuple(ks), indices, half_band)
    logger.info(f"Resonance guard passed for {len(ks)} energies (half-band={half_band})")
    return table


def quasimomentum_function(
    operator: Operator, policy: ScalingPolicy
) -> Callable[[float], float]:
    if isinstance(operator, PeriodicJacobi):
        return lambda energy: jacobi_quasimomentum(operator, energy, policy.root_tol)
    return lambda energy: quasimomentum(operator, energy, policy.root_tol, policy.rtol)


# =============================================================================
# Geen inbedding
# =============================================================================


def _sampled_weighted_sup(V: Perturbation, start: float, horizon: float) -> float:
    """sup |V(x)|(1+x) op een rooster met GATE_POINTS_PER_UNIT punten per lengte-eenheid."""
    count = max(int(math.ceil((horizon - start) * GATE_POINTS_PER_UNIT)) + 1, 2)
    step = (horizon - start) / (count - 1)
    sup = 0.0
    for lo in range(0, count, GATE_CHUNK):
        xs = start + np.arange(lo, min(lo + GATE_CHUNK, count)) * step
        values = np.fromiter((V(float(x)) for x in xs), dtype=float, count=xs.size)
        sup = max(sup, float(np.max(np.abs(values) * (1.0 + xs))))
    logger.debug(f"Gate sampled at {count} points on [{start:g}, {horizon:g}]")
    return sup


def _continuous_gate(V: Perturbation, G: float, start: float, horizon: float) -> float:
    if isinstance(V, EnvelopeBounded):
        sup = V.weighted_sup(start, horizon)
    elif V is zero_perturbation:
        sup = 0.0
    else:
        sup = _sampled_weighted_sup(V, start, horizon)
    return sup * G / 2.0


def no_embedding_demo(
    operator: Operator,
    perturbation: Perturbation | PerturbationLike,
    E: float,
    horizon: float,
    *,
    start: float = 10.0,
    probes: int = 8,
    slack: float = 0.5,
    rtol: float = 1e-10,
) -> ExperimentReport:
    """Kleine storing: lnR(x) >= lnR(x0) - (1/3) ln(x/x0) - slack voor alle randhoeken.

    De poort eist sup |V|(1+x)·G/2 <= 1/3 (continu) of
    sup |b'|(1+n)·max|φ|²/ω <= 1/3 (discreet); dan kan R niet sneller dalen
    dan x^{-1/3} en is geen L²-verval mogelijk.

    Raises
    ------
    PreconditionError
        Als de omhullende-poort faalt.
    """
    with profile_section(f"no_embedding E={E:.6g}") as watch:
        if isinstance(operator, PeriodicJacobi):
            report = no_embed_jacobi(
                operator,
                perturbation,
                E,
                int(horizon),
                start=int(start),
                probes=probes,
                slack=slack,
            )
        else:
            report = _no_embedding_continuous(
                operator, perturbation, E, horizon, start, probes, slack, rtol
            )
    return ExperimentReport(
        report.experiment_id, report.inputs, report.records, watch.elapsed, report.tables
    )


def _no_embedding_continuous(
    V0: PeriodicPotential,
    V: Perturbation,
    E: float,
    horizon: float,
    start: float,
    probes: int,
    slack: float,
    rtol: float,
) -> ExperimentReport:
    fd = floquet_solution(V0, E)
    gate = _continuous_gate(V, fd.G, start, horizon)
    if gate > NO_EMBED_GATE:
        logger.error(f"No-embedding gate failed: {gate:.4g} > 1/3")
        raise PreconditionError("no_embedding_demo", f"envelope gate {gate:.4g} exceeds 1/3")

    angles = probe_angles(probes)
    psi0s = [initial_prufer_angle(BoundaryCondition(angle, start), fd) for angle in angles]
    grid = np.geomspace(start, horizon, TRACE_POINTS)
    trajs = integrate_prufer_many([fd] * probes, V, start, horizon, psi0s, grid=grid, rtol=rtol)

    log_ratio = np.log(grid / start)
    records = [
        InequalityRecord(
            "gate sup |V|(1+x) G/2 <= 1/3", "no_embedding.gate", gate, NO_EMBED_GATE
        )
    ]
    slopes: list[float] = []
    for angle, traj in zip(angles, trajs):
        margin = traj.ln_r - traj.ln_r[0] + log_ratio / 3.0
        worst = int(np.argmax(-margin))
        records.append(
            InequalityRecord(
                f"lnR(x) - lnR(x0) + ln(x/x0)/3 >= -slack, theta0={angle:.4f}",
                "no_embedding.lower_bound",
                float(-margin[worst]),
                slack,
                float(grid[worst]),
            )
        )
        slopes.append(fit_slope(log_ratio, traj.ln_r))
    report = ExperimentReport(
        experiment_id="no_embedding",
        inputs={"E": E, "horizon": horizon, "start": start, "probes": probes, "slack": slack},
        records=tuple(records),
        tables={"decay": {"probe_angles": list(angles), "fitted_slopes": slopes}},
    )
    logger.info(f"No-embedding E={E:.6g}: min fitted slope {min(slopes):.4f} pass={report.passed}")
    return report


# =============================================================================
# Inbedding
# =============================================================================


def _envelope_finite(sup: float, symbol: str) -> InequalityRecord:
    return InequalityRecord(
        f"sup |{symbol}|(1+x) is finite", "assembly.envelope_finite", sup, sys.float_info.max
    )


@dataclass(frozen=True, slots=True)
class EmbeddingRun:
    """Rapport plus de volledige assemblage (voor export van potentiaal en banen)."""

    report: ExperimentReport
    assembly: Assembly | JacobiAssembly


def run_embedding(
    operator: Operator,
    eigenvalues: Sequence[float],
    angles: Sequence[float],
    policy: ScalingPolicy,
    mode: GrowthMode | str,
    *,
    epochs: int,
    h: Envelope | None = None,
    strict: bool = False,
) -> EmbeddingRun:
    """Guard, schema, assemblage en L2-staarten voor continue of discrete operatoren.

    Raises
    ------
    ResonantSetError
        Als de doelset de resonantie-guard niet passeert (geen run).
    InfeasibleScheduleError
        Als het schema niet haalbaar is.
    ContractViolation
        Alleen als ``strict``: het epoch-contract (EpochContractError) of de
        eerste andere ongelijkheid in het rapport die niet geldt.
    """
    mode = GrowthMode(mode)
    experiment_id = f"embedding_{mode.value}"
    table = resonance_guard(
        eigenvalues, quasimomentum_function(operator, policy), angular_tol=policy.angular_tol
    )
    inputs: dict[str, Any] = {
        "operator": "jacobi" if isinstance(operator, PeriodicJacobi) else "continuous",
        "eigenvalues": list(eigenvalues),
        "angles": list(angles),
        "mode": mode.value,
        "epochs": epochs,
    }
    assembly: Assembly | JacobiAssembly
    with profile_section(experiment_id) as watch:
        if isinstance(operator, PeriodicJacobi):
            frames = [jacobi_floquet(operator, e, policy.root_tol) for e in eigenvalues]
            start = max(int(policy.k_min), 100)
            couplings = [
                calibrate_coupling(jf, policy.decay_exponent, start=start) for jf in frames
            ]
            schedule = build_schedule(
                eigenvalues, angles, mode, policy, epochs=epochs, h=h, couplings=couplings
            )
            jacobi_run = assemble_jacobi(schedule, frames, couplings, policy, strict=strict)
            tails = verify_l2_jacobi(jacobi_run, policy.l2_ratio_bound)
            envelope = _envelope_finite(jacobi_run.envelope_sup, "b'")
            assembly = jacobi_run
        else:
            fds = [floquet_solution(operator, e, policy.rtol) for e in eigenvalues]
            couplings = [stage_coupling(fd, policy.decay_exponent) for fd in fds]
            schedule = build_schedule(
                eigenvalues, angles, mode, policy, epochs=epochs, h=h, couplings=couplings
            )
            continuous_run = assemble(schedule, fds, couplings, policy, strict=strict)
            tails = verify_l2(continuous_run, policy.l2_ratio_bound)
            envelope = _envelope_finite(continuous_run.envelope_sup, "V")
            assembly = continuous_run

    records = [*schedule.records(), *assembly.records, envelope, *tails.records]
    report = ExperimentReport(
        experiment_id=experiment_id,
        inputs=inputs,
        records=tuple(records),
        runtime=watch.elapsed,
        tables={
            "quasimomenta": table.to_dict(),
            "schedule": schedule.to_dict(),
            "epochs": [e.to_dict() for e in assembly.epochs],
            "envelopes": assembly.envelopes(),
            "l2_tails": tails.to_dict(),
        },
    )
    level = logging.INFO if report.passed else logging.WARNING
    logger.log(level, f"{experiment_id}: {len(records)} records, pass={report.passed}")
    if strict:
        report.raise_if_failed()
    return EmbeddingRun(report, assembly)


def embedding_demo_finite(
    operator: Operator,
    eigenvalues: Sequence[float],
    angles: Sequence[float],
    policy: ScalingPolicy,
    *,
    epochs: int = 4,
    strict: bool = False,
) -> ExperimentReport:
    """Volledige keten guard → schema → assemblage → L²-staarten met vaste doelset.

    Raises
    ------
    ResonantSetError
        Als de doelset de resonantie-guard niet passeert (geen run).
    ContractViolation
        Alleen als ``strict``; anders staat de schending als record in het rapport.
    """
    run = run_embedding(
        operator, eigenvalues, angles, policy, GrowthMode.FINITE, epochs=epochs, strict=strict
    )
    return run.report


def embedding_demo_infinite(
    operator: Operator,
    eigenvalues: Sequence[float],
    angles: Sequence[float],
    h: Envelope,
    policy: ScalingPolicy,
    *,
    epochs: int = 6,
    strict: bool = False,
) -> ExperimentReport:
    """Eindig prefix van de oneindige modus onder |V(x)|(1+x) <= h(x).

    Raises
    ------
    InfeasibleScheduleError
        "h (bounded envelope)" voor een begrensde h, "h" als de schemavoorwaarde
        niet haalbaar is.
    """
    run = run_embedding(
        operator,
        eigenvalues,
        angles,
        policy,
        GrowthMode.INFINITE,
        epochs=epochs,
        h=h,
        strict=strict,
    )
    return run.report


__all__ = [
    "Operator",
    "QuasimomentumTable",
    "resonance_guard",
    "quasimomentum_function",
    "no_embedding_demo",
    "EmbeddingRun",
    "run_embedding",
    "embedding_demo_finite",
    "embedding_demo_infinite",
]
