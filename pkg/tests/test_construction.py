"""Tests voor de continue stageconstructie en de stagecontrole."""

from __future__ import annotations

import math

import numpy as np
import pytest

from embedded_eigen.core.exceptions import (
    ContractViolation,
    PreconditionError,
    ResonantSetError,
)
from embedded_eigen.systems.construction import (
    Stage,
    calibrate_k_min,
    check_stage_contract,
    probe_angles,
    run_stage,
    solve_stage_theta,
    stage_coupling,
)
from embedded_eigen.systems.floquet import FloquetData, PeriodicPotential, floquet_solution
from embedded_eigen.systems.prufer import integrate_prufer


@pytest.fixture(scope="module")
def fd_target() -> FloquetData:
    """Vrije Floquet-data bij E = 1 (k = 1, G = 1)."""
    return floquet_solution(PeriodicPotential.zero(), 1.0)


@pytest.fixture(scope="module")
def fd_protected() -> FloquetData:
    """Vrije Floquet-data bij E = 2, niet resonant met E = 1."""
    return floquet_solution(PeriodicPotential.zero(), 2.0)


def _stage(fd: FloquetData, x0: float, x1: float, protected: tuple[float, ...] = ()) -> Stage:
    return Stage(
        E_target=fd.energy,
        protected=protected,
        x0=x0,
        x1=x1,
        b=0.0,
        theta0=0.3,
        C=stage_coupling(fd, 2.0),
    )


def test_stage_coupling_is_four_d_g(fd_target: FloquetData):
    """Test dat C(D) = 4·D·G."""
    assert stage_coupling(fd_target, 2.0) == pytest.approx(8.0, rel=1e-6)


def test_boundary_angles_are_equidistant():
    """Test dat de randhoeken [0, π) gelijkmatig verdelen."""
    angles = probe_angles(4)

    assert angles == pytest.approx((0.0, math.pi / 4.0, math.pi / 2.0, 3.0 * math.pi / 4.0))


def test_stage_requires_ordered_interval():
    """Test dat b < x0 < x1 en C >= 0 worden afgedwongen."""
    with pytest.raises(PreconditionError):
        Stage(1.0, (), 10.0, 5.0, 0.0, 0.0, 1.0)
    with pytest.raises(PreconditionError):
        Stage(1.0, (), 10.0, 20.0, 10.0, 0.0, 1.0)
    with pytest.raises(PreconditionError):
        Stage(1.0, (), 10.0, 20.0, 0.0, 0.0, -1.0)


def test_cutoff_vanishes_at_the_ends(fd_target: FloquetData):
    """Test dat de afsnijfunctie 0 is in x0 en x1 en 1 in het midden."""
    stage = _stage(fd_target, 100.0, 300.0)

    assert stage.cutoff_at(100.0) == pytest.approx(0.0, abs=1e-12)
    assert stage.cutoff_at(300.0) == pytest.approx(0.0, abs=1e-12)
    assert stage.cutoff_at(200.0) == pytest.approx(1.0)


def test_validate_rejects_resonant_protected_energy(fd_target: FloquetData):
    """Test dat k + k̂ = π een ResonantSetError geeft."""
    resonant = (math.pi - 1.0) ** 2
    fd_hat = floquet_solution(PeriodicPotential.zero(), resonant)
    stage = _stage(fd_target, 1000.0, 2000.0, (resonant,))

    with pytest.raises(ResonantSetError) as exc_info:
        stage.validate(fd_target.k, [fd_hat.k], k_min=0.0)

    assert exc_info.value.pairs[0][2] == "k sum equals pi"


def test_validate_rejects_target_at_half_pi():
    """Test dat k(doel) = π/2 wordt geweigerd."""
    energy = (math.pi / 2.0) ** 2
    stage = Stage(energy, (), 1000.0, 2000.0, 0.0, 0.0, 1.0)

    with pytest.raises(ResonantSetError):
        stage.validate(math.pi / 2.0, [], k_min=0.0)


def test_validate_rejects_short_offset(fd_target: FloquetData):
    """Test dat x0 - b < K_min een PreconditionError geeft."""
    stage = _stage(fd_target, 200.0, 400.0)

    with pytest.raises(PreconditionError, match="K_min"):
        stage.validate(fd_target.k, [], k_min=1000.0)


def test_target_trajectory_matches_built_potential(fd_target: FloquetData):
    """Test dat de doelbaan de Prüfer-baan is onder de gebouwde potentiaal."""
    print("\n=== Test 1: Stage self-consistency ===")

    stage = _stage(fd_target, 50.0, 80.0)
    fine = np.linspace(stage.x0, stage.x1, 1201)
    run = run_stage(stage, fd_target, grid=fine)

    psi0 = stage.start_angle(fd_target)
    independent = integrate_prufer(fd_target, run.potential, stage.x0, stage.x1, psi0, grid=fine)

    np.testing.assert_allclose(independent.ln_r, run.target.ln_r, atol=1e-5)
    assert run.target.ln_r[-1] < -0.5
    print(f"✓ lnR(x1) = {run.target.ln_r[-1]:.4f}")


def test_stage_theta_matches_joint_integration(fd_target: FloquetData):
    """Test dat solve_stage_theta dezelfde hoek geeft als run_stage."""
    stage = _stage(fd_target, 50.0, 80.0)

    run = run_stage(stage, fd_target)
    theta = solve_stage_theta(stage, fd_target, grid=run.target.grid)

    np.testing.assert_allclose(theta.theta, run.target.theta, atol=1e-7)


def test_solve_stage_theta_requires_target_frame(
    fd_target: FloquetData, fd_protected: FloquetData
):
    """Test dat Floquet-data van een andere energie wordt geweigerd."""
    stage = _stage(fd_target, 50.0, 80.0)

    with pytest.raises(PreconditionError):
        solve_stage_theta(stage, fd_protected)


def test_stage_potential_vanishes_outside_interval(fd_target: FloquetData):
    """Test dat V nul is buiten (x0, x1) en begrensd door C/(x - b) erbinnen."""
    stage = _stage(fd_target, 50.0, 80.0)
    run = run_stage(stage, fd_target)

    outside = run.potential(np.array([10.0, 50.0, 80.0, 120.0]))
    inside_x = np.linspace(51.0, 79.0, 57)
    inside = run.potential(inside_x)

    np.testing.assert_allclose(outside, 0.0, atol=1e-12)
    assert np.all(np.abs(inside) * inside_x <= stage.C)


def test_stage_contract_holds_for_free_pair(fd_target: FloquetData, fd_protected: FloquetData):
    """Test dat een stage voor E = 1 met beschermde E = 2 het contract haalt."""
    print("\n=== Test 2: Stage contract ===")

    stage = _stage(fd_target, 200.0, 1000.0, (fd_protected.energy,))

    report = check_stage_contract(stage, fd_target, [fd_protected], 2.0)

    assert report.passed, [r.name for r in report.records if not r.holds]
    assert report.slope <= -1.8
    assert report.protected_ratios[0][1] <= 1.5
    anchors = {r.anchor for r in report.records}
    assert {
        "stage.target.slope",
        "stage.target.monotone",
        "stage.envelope",
        "stage.protected.ratio",
        "stage.protected.ratio_strict",
    } <= anchors
    assert len(report.diagnostics) == 2
    assert report.to_dict()["pass"] is True
    print(f"✓ slope={report.slope:.4f}, ratio={report.protected_ratios[0][1]:.4f}")


def test_calibrate_k_min_picks_first_passing_offset(
    fd_target: FloquetData, fd_protected: FloquetData
):
    """Test dat de K_min-kalibratie de kleinste kandidaat kiest waarvoor de verhouding <= 1.5 is."""
    assert calibrate_k_min(fd_target, [fd_protected], 2.0, candidates=(300.0,)) == 300.0
    assert calibrate_k_min(fd_target, [fd_protected], 2.0, candidates=(300.0,), bound=0.5) is None


def test_uncoupled_stage_fails_contract_in_strict_mode(
    fd_target: FloquetData, fd_protected: FloquetData
):
    """Test dat een stage met C = 0 niet vervalt en met strict een ContractViolation geeft."""
    stage = Stage(
        E_target=fd_target.energy,
        protected=(fd_protected.energy,),
        x0=50.0,
        x1=80.0,
        b=0.0,
        theta0=0.3,
        C=0.0,
    )

    report = check_stage_contract(stage, fd_target, [fd_protected], 2.0, diagnostics=False)
    assert not report.passed
    assert report.slope == pytest.approx(0.0, abs=1e-6)

    with pytest.raises(ContractViolation) as exc_info:
        check_stage_contract(
            stage, fd_target, [fd_protected], 2.0, k_min=10.0, diagnostics=False, strict=True
        )

    assert exc_info.value.anchor == "stage.target.slope"
    assert exc_info.value.rhs == pytest.approx(-1.8)
