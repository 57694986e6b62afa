"""Tests voor het plakken van stages, het epoch-contract en de L²-staarten."""

from __future__ import annotations

import math

import numpy as np
import pytest

from embedded_eigen.core.config import ScalingPolicy
from embedded_eigen.core.exceptions import EpochContractError, PreconditionError
from embedded_eigen.systems.assembly import (
    AssembledPotential,
    assemble,
    build_tail_report,
    close_epoch,
    epoch_contract_bound,
    verify_l2,
)
from embedded_eigen.systems.construction import Stage, StagePotential, StageTheta, stage_coupling
from embedded_eigen.systems.floquet import PeriodicPotential, floquet_solution
from embedded_eigen.systems.schedule import Schedule, build_schedule


@pytest.fixture
def schedule() -> Schedule:
    """Twee doelen, drie epochs, standaard beleid: J = (1000, 5000, 37000, 165000)."""
    return build_schedule([1.0, 2.0], [0.0, 0.5], "finite", ScalingPolicy(), epochs=3)


def _piece(x0: float, x1: float) -> StagePotential:
    stage = Stage(1.0, (), x0, x1, 0.0, 0.0, 1.0)
    grid = np.array([x0, x1])
    return StagePotential(stage, StageTheta.from_samples(grid, np.array([0.0, 1.0]), np.ones(2)))


def test_pieces_must_be_ordered_and_abut():
    """Test dat stages oplopend en exact aansluitend moeten zijn."""
    with pytest.raises(PreconditionError, match="ordered"):
        AssembledPotential.from_pieces(10.0, [_piece(20.0, 30.0), _piece(10.0, 20.0)])
    with pytest.raises(PreconditionError, match="abut"):
        AssembledPotential.from_pieces(10.0, [_piece(10.0, 20.0), _piece(21.0, 30.0)])


def test_assembled_potential_dispatches_to_pieces():
    """Test dat V nul is op de aanloop en elders gelijk aan de juiste stage."""
    first, second = _piece(10.0, 20.0), _piece(20.0, 30.0)
    potential = AssembledPotential.from_pieces(10.0, [first, second])
    x = np.array([5.0, 12.0, 15.0, 25.0, 29.0])

    values = potential(x)

    assert values[0] == 0.0
    np.testing.assert_allclose(values[1:3], first(x[1:3]))
    np.testing.assert_allclose(values[3:], second(x[3:]))
    assert potential.end == 30.0
    assert potential.value(15.0) == pytest.approx(float(first(15.0)))


def test_epoch_contract_bound_values(schedule: Schedule):
    """Test ln(2^{N(w)} N(w-1)^p C_w^{-p'}) voor de standaard-exponenten p = p' = 2."""
    policy = ScalingPolicy()

    assert epoch_contract_bound(schedule, 1, policy) == pytest.approx(math.log(2.0 / 16.0))
    assert epoch_contract_bound(schedule, 2, policy) == pytest.approx(math.log(4.0 / 16.0))
    assert epoch_contract_bound(schedule, 3, policy) == pytest.approx(math.log(4.0 * 4.0 / 16.0))


def test_close_epoch_strict_raises(schedule: Schedule):
    """Test dat een geschonden epoch-contract in strikte modus een EpochContractError geeft."""
    policy = ScalingPolicy()

    with pytest.raises(EpochContractError) as exc_info:
        close_epoch(schedule, 1, policy, (0.0, 0.0), (0.0, 0.0), 10.0, None, strict=True)

    assert exc_info.value.epoch == 1
    assert exc_info.value.energy == 1.0


def test_close_epoch_reports_when_not_strict(schedule: Schedule):
    """Test dat de niet-strikte modus het falende record alleen rapporteert."""
    policy = ScalingPolicy()

    epoch = close_epoch(schedule, 1, policy, (0.0, 0.0), (-3.0, 0.0), 10.0, 0.5, strict=False)

    assert epoch.passed
    assert epoch.active == (1.0,)
    assert {r.anchor for r in epoch.records} == {
        "assembly.envelope",
        "assembly.h_envelope",
        "epoch.contract",
    }
    assert epoch.envelope_constant == pytest.approx(10.0 / (1 * 4**2))
    failing = close_epoch(schedule, 1, policy, (0.0, 0.0), (0.0, 0.0), 10.0, None, strict=False)
    assert not failing.passed


def test_tail_report_ratios(schedule: Schedule):
    """Test de verhoudingen c_w/c_{w-1} vanaf de epoch na de activatie."""
    contributions = [[100.0, 50.0, 10.0, 2.0], [100.0, 80.0, 60.0, 20.0]]

    report = build_tail_report(schedule, contributions, 0.5)

    assert report.rows[0].activation == 1
    assert report.rows[0].ratios == pytest.approx((0.2, 0.2))
    assert report.rows[1].activation == 2
    assert report.rows[1].ratios == pytest.approx((1.0 / 3.0,))
    assert report.control == (1000.0, 4000.0, 32000.0, 128000.0)
    assert report.passed
    assert not build_tail_report(schedule, contributions, 0.25).passed


def test_assemble_single_eigenvalue():
    """Test de continue assemblage voor E = 1 over twee korte epochs."""
    print("\n=== Test 1: Continuous assembly ===")

    policy = ScalingPolicy(t0=100, k_min=100.0)
    schedule = build_schedule([1.0], [0.3], "finite", policy, epochs=2)
    fd = floquet_solution(PeriodicPotential.zero(), 1.0)

    assembly = assemble(schedule, [fd], [stage_coupling(fd, policy.decay_exponent)], policy)

    assert schedule.J == (100, 500, 2100)
    assert assembly.passed, [r.name for r in assembly.records if not r.holds]
    assert assembly.potential.end == 2100.0
    assert assembly.potential.value(50.0) == 0.0
    grid, values = assembly.potential.samples()
    assert np.all(np.diff(grid) > 0.0)
    assert values.shape == grid.shape
    joints = assembly.ln_r_at_joints(0)
    assert joints[0] == pytest.approx(0.0, abs=1e-12)
    assert joints[2] < joints[1] < joints[0]
    tails = verify_l2(assembly)
    assert tails.passed
    print(f"✓ lnR at joints: {[round(v, 3) for v in joints]}")


def test_assemble_requires_matching_frames(schedule: Schedule):
    """Test dat Floquet-data voor een andere energie wordt geweigerd."""
    fd = floquet_solution(PeriodicPotential.zero(), 1.0)
    wrong = floquet_solution(PeriodicPotential.zero(), 3.0)

    with pytest.raises(PreconditionError):
        assemble(schedule, [fd, wrong], [8.0, 8.0], ScalingPolicy())


def test_assemble_records_strict_protected_ratio():
    """Test dat elke beschermde energie ook de grens 1.5 krijgt zodra x0 - b >= K_min."""
    policy = ScalingPolicy(t0=100, k_min=100.0)
    schedule = build_schedule([1.0, 2.0], [0.3, 0.7], "finite", policy, epochs=2)
    fds = [floquet_solution(PeriodicPotential.zero(), e) for e in (1.0, 2.0)]
    couplings = [stage_coupling(fd, policy.decay_exponent) for fd in fds]

    assembly = assemble(schedule, fds, couplings, policy, strict=False)

    loose = [r for r in assembly.stage_records if r.anchor == "stage.protected.ratio"]
    tight = [r for r in assembly.stage_records if r.anchor == "stage.protected.ratio_strict"]
    assert len(loose) == 2
    assert len(tight) == len(loose)
    for wide, narrow in zip(loose, tight):
        assert wide.rhs == 2.0
        assert narrow.rhs == 1.5
        assert narrow.lhs == wide.lhs
        assert narrow.location == wide.location
