"""Tests voor de oscillerende integralen langs Prüfer-banen."""

from __future__ import annotations

import math

import numpy as np
import pytest

from embedded_eigen.core.exceptions import PreconditionError, ResonantPairError
from embedded_eigen.systems.floquet import FloquetData, PeriodicPotential, floquet_solution
from embedded_eigen.systems.oscillation import is_resonant_pair, oscillation_diagnostic
from embedded_eigen.systems.prufer import PruferTrajectory, integrate_prufer, zero_perturbation

GRID = np.linspace(0.0, 1000.0, 20001)


@pytest.fixture(scope="module")
def fd_one() -> FloquetData:
    return floquet_solution(PeriodicPotential.zero(), 1.0)


@pytest.fixture(scope="module")
def fd_two() -> FloquetData:
    return floquet_solution(PeriodicPotential.zero(), 2.0)


def _free_run(fd: FloquetData, psi0: float) -> PruferTrajectory:
    return integrate_prufer(fd, zero_perturbation, 0.0, 1000.0, psi0, grid=GRID)


def test_resonant_pair_predicate():
    """Test dat alleen k + k̂ = π (binnen de tolerantie) resonant is."""
    assert is_resonant_pair(1.0, math.pi - 1.0)
    assert not is_resonant_pair(1.0, math.sqrt(2.0))
    assert not is_resonant_pair(1.0, math.pi - 1.0 + 1e-3)


def test_partial_integrals_stay_bounded(fd_one: FloquetData, fd_two: FloquetData):
    """Test dat zelf- en kruisterm begrensd blijven voor E = 1, 2 zonder storing."""
    print("\n=== Test 1: Oscillation sup ===")

    report = oscillation_diagnostic(
        _free_run(fd_one, 0.3), fd_one, 0.0, _free_run(fd_two, 1.1), fd_two
    )

    assert report.energy == 1.0
    assert report.other_energy == 2.0
    assert (report.start, report.end) == (0.0, 1000.0)
    assert report.sup_self < 1.0
    assert report.sup_cross is not None and report.sup_cross < 1.0
    print(f"✓ sup self {report.sup_self:.4f}, cross {report.sup_cross:.4f}")


def test_self_term_only_without_partner(fd_one: FloquetData):
    """Test dat zonder tweede energie alleen de zelfterm wordt gerapporteerd."""
    report = oscillation_diagnostic(_free_run(fd_one, 0.3), fd_one, 0.0)

    assert report.other_energy is None
    assert report.sup_cross is None


def test_resonant_partner_is_rejected(fd_one: FloquetData):
    """Test dat Ê = (π-1)² een ResonantPairError geeft."""
    fd_hat = floquet_solution(PeriodicPotential.zero(), (math.pi - 1.0) ** 2)
    traj = _free_run(fd_one, 0.3)

    with pytest.raises(ResonantPairError) as exc_info:
        oscillation_diagnostic(traj, fd_one, 0.0, _free_run(fd_hat, 0.3), fd_hat)

    assert exc_info.value.energy == 1.0
    assert exc_info.value.pairs[0][2] == "k sum equals pi"


def test_partner_with_same_energy_is_rejected(fd_one: FloquetData):
    """Test dat Ê = E als precondition-fout wordt geweigerd."""
    traj = _free_run(fd_one, 0.3)

    with pytest.raises(PreconditionError, match="differ"):
        oscillation_diagnostic(traj, fd_one, 0.0, traj, fd_one)


def test_partner_within_energy_tolerance_is_rejected(fd_one: FloquetData):
    """Test dat Ê = E + 1e-12 binnen de tolerantie als gelijk geldt en geweigerd wordt."""
    fd_near = floquet_solution(PeriodicPotential.zero(), 1.0 + 1e-12)
    traj = _free_run(fd_one, 0.3)

    with pytest.raises(PreconditionError, match="differ"):
        oscillation_diagnostic(traj, fd_one, 0.0, traj, fd_near)
    report = oscillation_diagnostic(traj, fd_one, 0.0, traj, fd_near, energy_tol=1e-14)
    assert report.other_energy == pytest.approx(1.0)
    assert report.sup_cross is not None
