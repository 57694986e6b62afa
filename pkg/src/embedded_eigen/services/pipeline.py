"""PipelineService - facade tussen de command-line en de rekenende systems.

De CLI praat niet direct met floquet/prufer/assembly maar vraagt via deze
service een operator, een bandtabel, een synthese of een verify-rapport op.
Alle bestanden gaan via ``ResultStore``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from embedded_eigen.core.config import RunConfig
from embedded_eigen.core.exceptions import PreconditionError
from embedded_eigen.core.protocols import ReportLike, TrajectoryLike
from embedded_eigen.data_access.exceptions import ConfigError
from embedded_eigen.data_access.store import ResultStore
from embedded_eigen.systems.assembly import Assembly
from embedded_eigen.systems.bands import BandStructure
from embedded_eigen.systems.floquet import PeriodicPotential, locate_bands
from embedded_eigen.systems.jacobi import PeriodicJacobi, jacobi_bands
from embedded_eigen.systems.jacobi_construction import JacobiAssembly
from embedded_eigen.systems.prufer import Perturbation, zero_perturbation
from embedded_eigen.systems.reports import ExperimentReport
from embedded_eigen.systems.schedule import Envelope, GrowthMode, envelope_function
from embedded_eigen.systems.verify import (
    Operator,
    embedding_demo_finite,
    embedding_demo_infinite,
    no_embedding_demo,
    quasimomentum_function,
    run_embedding,
)

logger = logging.getLogger(__name__)

DEFAULT_ANGLE = math.pi / 4.0


@dataclass(frozen=True, slots=True)
class CommandResult:
    """Uitkomst van een commando: rapport (indien van toepassing) en geschreven bestanden."""

    passed: bool
    files: tuple[Path, ...]
    report: ReportLike | None = None


@dataclass(frozen=True, slots=True)
class PerturbationSequence:
    """b'_n = amplitude·sin(frequency·n)/(1+n) als vectoriele functie van de sites."""

    amplitude: float
    frequency: float

    def __call__(self, sites: NDArray[np.int64]) -> NDArray[np.float64]:
        n = np.asarray(sites, dtype=float)
        return self.amplitude * np.sin(self.frequency * n) / (1.0 + n)


@dataclass(frozen=True, slots=True)
class SinPerturbation:
    """V(x) = amplitude·sin(frequency·x)/(1+x); |V(x)|(1+x) = |amplitude·sin(frequency·x)|."""

    amplitude: float
    frequency: float

    def __call__(self, x: float) -> float:
        return self.amplitude * math.sin(self.frequency * x) / (1.0 + x)

    def weighted_sup(self, start: float, end: float) -> float:
        if self.frequency == 0.0 or self.amplitude == 0.0:
            return 0.0
        if end - start >= math.pi / abs(self.frequency):
            return abs(self.amplitude)
        xs = np.linspace(start, end, 1001)
        return float(np.max(np.abs(self.amplitude * np.sin(self.frequency * xs))))


class PipelineService:
    """Bouwt operatoren en experimenten uit een RunConfig en schrijft de resultaten."""

    def __init__(self, config: RunConfig) -> None:
        self._config = config
        self._store = ResultStore(Path(config.run.output_dir), config.config_hash())

    @property
    def config(self) -> RunConfig:
        return self._config

    @property
    def store(self) -> ResultStore:
        return self._store

    # -------------------------------------------------------------------------
    # Bouwstenen
    # -------------------------------------------------------------------------

    def build_operator(self) -> Operator:
        """Ongestoorde operator uit [operator]."""
        section = self._config.operator
        if section.kind == "jacobi":
            return PeriodicJacobi.from_lists(section.a, section.b)
        if section.potential == "cosine":
            return PeriodicPotential.cosine(section.amp, section.freq)
        if section.potential == "fourier":
            return PeriodicPotential.fourier(section.cos, section.sin, section.mean)
        return PeriodicPotential.zero()

    def band_structure(self, operator: Operator | None = None) -> BandStructure:
        operator = operator if operator is not None else self.build_operator()
        section, policy = self._config.bands, self._config.policy
        if isinstance(operator, PeriodicJacobi):
            return jacobi_bands(
                operator,
                section.e_min,
                section.e_max,
                policy.root_tol,
                points_per_unit=policy.points_per_unit,
            )
        return locate_bands(
            operator,
            section.e_min,
            section.e_max,
            policy.root_tol,
            points_per_unit=policy.points_per_unit,
            tol=policy.rtol,
        )

    def target_energies(self, operator: Operator | None = None) -> list[float]:
        """Expliciete eigenwaarden, of posities c + f·(d - c) binnen targets.band."""
        targets = self._config.targets
        if targets.eigenvalues:
            return list(targets.eigenvalues)
        if not targets.band_fractions:
            return []
        bands = self.band_structure(operator)
        if targets.band >= len(bands.bands):
            raise ConfigError(
                self._config.source,
                f"targets.band={targets.band} not in scan range ({len(bands.bands)} bands)",
            )
        lo, hi = bands.bands[targets.band]
        return [lo + f * (hi - lo) for f in targets.band_fractions]

    def target_angles(self, count: int) -> list[float]:
        angles = self._config.targets.angles
        return list(angles) if angles else [DEFAULT_ANGLE] * count

    def envelope(self) -> Envelope:
        return envelope_function(self._config.run.envelope, self._config.run.envelope_scale)

    def perturbation(self) -> Perturbation | SinPerturbation | PerturbationSequence:
        """Storing voor no-embedding: amplitude·sin(frequency·x)/(1+x), of nul."""
        section = self._config.perturbation
        if self._config.operator.kind == "jacobi":
            amplitude = section.amplitude if section.kind == "sin" else 0.0
            return PerturbationSequence(amplitude, section.frequency)
        if section.kind == "zero":
            return zero_perturbation
        return SinPerturbation(section.amplitude, section.frequency)

    # -------------------------------------------------------------------------
    # Commando's
    # -------------------------------------------------------------------------

    def bands(self) -> CommandResult:
        """Schrijf bands.csv (band_index,c,d) en quasimomentum.csv (E,k)."""
        operator = self.build_operator()
        structure = self.band_structure(operator)
        k_of = quasimomentum_function(operator, self._config.policy)
        samples: list[tuple[float, float]] = []
        for index in range(len(structure.bands)):
            for energy in structure.interior_points(index, self._config.bands.samples_per_band):
                samples.append((float(energy), k_of(float(energy))))
        files = (
            self._store.write_csv("bands.csv", ("band_index", "c", "d"), structure.rows()),
            self._store.write_csv("quasimomentum.csv", ("E", "k"), samples),
        )
        logger.info(f"Wrote {len(structure.bands)} bands and {len(samples)} k samples")
        return CommandResult(True, files)

    def synthesize(self) -> CommandResult:
        """Bouw de storing en schrijf potentiaal, banen en rapport.

        Raises
        ------
        PreconditionError
            "empty target set" als er geen eigenwaarden zijn.
        """
        operator = self.build_operator()
        energies = self.target_energies(operator)
        if not energies:
            raise PreconditionError("synthesize", "empty target set")
        run = self._config.run
        mode = GrowthMode(run.mode)
        h = self.envelope() if mode is GrowthMode.INFINITE else None
        embedding = run_embedding(
            operator,
            energies,
            self.target_angles(len(energies)),
            self._config.policy,
            mode,
            epochs=run.epochs,
            h=h,
            strict=run.strict,
        )
        files = [*self._write_assembly(embedding.assembly)]
        files.append(self._store.write_json("report.json", embedding.report.to_dict()))
        return CommandResult(embedding.report.passed, tuple(files), embedding.report)

    def verify(self) -> CommandResult:
        """Voer het experiment uit [run].experiment uit en schrijf report.json."""
        report = self.run_experiment()
        path = self._store.write_json("report.json", report.to_dict())
        return CommandResult(report.passed, (path,), report)

    def run_experiment(self) -> ExperimentReport:
        operator = self.build_operator()
        run, policy = self._config.run, self._config.policy
        if run.experiment == "no_embedding":
            energies = self.target_energies(operator)
            if len(energies) != 1:
                raise ConfigError(
                    self._config.source, "no_embedding needs exactly one target energy"
                )
            report = no_embedding_demo(
                operator,
                self.perturbation(),
                energies[0],
                run.horizon,
                start=run.start,
                probes=policy.probes,
                slack=policy.lower_bound_slack,
                rtol=policy.rtol,
            )
            if run.strict:
                report.raise_if_failed()
            return report
        energies = self.target_energies(operator)
        angles = self.target_angles(len(energies))
        if run.experiment == "embedding_infinite":
            return embedding_demo_infinite(
                operator,
                energies,
                angles,
                self.envelope(),
                policy,
                epochs=run.epochs,
                strict=run.strict,
            )
        return embedding_demo_finite(
            operator, energies, angles, policy, epochs=run.epochs, strict=run.strict
        )

    # -------------------------------------------------------------------------
    # Export
    # -------------------------------------------------------------------------

    def _write_trajectory(
        self, name: str, axis: str, traj: TrajectoryLike, grid: ArrayLike
    ) -> Path:
        return self._store.write_columns(
            name,
            {axis: np.asarray(grid), "lnR": traj.ln_r, "theta": traj.theta},
            stride=self._config.run.output_stride,
        )

    def _write_assembly(self, assembly: Assembly | JacobiAssembly) -> list[Path]:
        stride = self._config.run.output_stride
        files: list[Path] = []
        if isinstance(assembly, JacobiAssembly):
            sites = np.arange(assembly.b_prime.size)
            files.append(
                self._store.write_columns(
                    "b_prime.csv", {"n": sites, "b_prime": assembly.b_prime}, stride
                )
            )
            for index, traj in enumerate(assembly.trajectories):
                files.append(
                    self._write_trajectory(f"trajectory_{index}.csv", "n", traj, traj.sites)
                )
            return files
        x, values = assembly.potential.samples()
        files.append(self._store.write_columns("potential.csv", {"x": x, "V": values}, stride))
        for index, prufer in enumerate(assembly.trajectories):
            files.append(
                self._write_trajectory(f"trajectory_{index}.csv", "x", prufer, prufer.grid)
            )
        return files


__all__ = [
    "CommandResult",
    "PipelineService",
    "PerturbationSequence",
    "SinPerturbation",
]
