"""Tests voor het verify-harnas: resonantie-guard, no-embedding en de inbeddingsketen."""

from __future__ import annotations

import math

import numpy as np
import pytest

from embedded_eigen.core.config import ScalingPolicy
from embedded_eigen.core.exceptions import (
    ContractViolation,
    InfeasibleScheduleError,
    NotInBandError,
    PreconditionError,
    ResonantSetError,
)
from embedded_eigen.systems.floquet import PeriodicPotential
from embedded_eigen.systems.jacobi import PeriodicJacobi
from embedded_eigen.systems.jacobi_construction import JacobiAssembly
from embedded_eigen.systems.prufer import zero_perturbation
from embedded_eigen.systems.schedule import envelope_function
from embedded_eigen.systems.verify import (
    embedding_demo_finite,
    embedding_demo_infinite,
    no_embedding_demo,
    quasimomentum_function,
    resonance_guard,
    run_embedding,
)


@pytest.fixture
def policy() -> ScalingPolicy:
    return ScalingPolicy()


@pytest.fixture
def free_k(policy: ScalingPolicy):
    """k(E) van de vrije continue operator."""
    return quasimomentum_function(PeriodicPotential.zero(), policy)


@pytest.fixture
def jacobi_k(policy: ScalingPolicy):
    """k(E) van de vrije Jacobi-operator."""
    return quasimomentum_function(PeriodicJacobi.free(), policy)


# =============================================================================
# Resonantie-guard
# =============================================================================


def test_guard_accepts_non_resonant_set(free_k):
    """Test dat E = 1, 2 geaccepteerd worden en in de onderste halve band liggen."""
    table = resonance_guard([1.0, 2.0], free_k)

    assert table.k == pytest.approx((1.0, math.sqrt(2.0)), abs=1e-8)
    assert table.half_band
    assert table.band_indices == (None, None)


def test_guard_rejects_continuous_resonant_pair(free_k):
    """Test dat E = 1 en (π-1)² (k + k̂ = π) worden geweigerd."""
    print("\n=== Test 1: Resonance guard ===")

    with pytest.raises(ResonantSetError) as exc_info:
        resonance_guard([1.0, (math.pi - 1.0) ** 2], free_k)

    assert exc_info.value.pairs == [(1.0, (math.pi - 1.0) ** 2, "k sum equals pi")]
    print(f"✓ {exc_info.value.message}")


def test_guard_rejects_half_pi_for_stage_targets(free_k):
    """Test dat k = π/2 alleen voor stagedoelen wordt geweigerd."""
    energy = (math.pi / 2.0) ** 2

    with pytest.raises(ResonantSetError, match="pi/2"):
        resonance_guard([energy], free_k)
    table = resonance_guard([energy], free_k, stage_targets=False)
    assert table.k[0] == pytest.approx(math.pi / 2.0, abs=1e-8)


def test_guard_rejects_jacobi_mirror_pair(jacobi_k):
    """Test dat E en -E voor de vrije Jacobi-operator resonant zijn."""
    with pytest.raises(ResonantSetError):
        resonance_guard([0.5, -0.5], jacobi_k)


def test_guard_rejects_equal_quasimomenta(jacobi_k):
    """Test dat een dubbele energie als gelijke quasimomenta wordt geweigerd."""
    with pytest.raises(ResonantSetError, match="equal quasimomenta"):
        resonance_guard([0.5, 0.5], jacobi_k)


def test_guard_propagates_not_in_band(jacobi_k):
    """Test dat een energie buiten de band NotInBandError geeft."""
    with pytest.raises(NotInBandError):
        resonance_guard([2.5], jacobi_k)


# =============================================================================
# Geen inbedding
# =============================================================================


def test_no_embedding_for_zero_perturbation():
    """Test dat zonder storing alle randhoeken de ondergrens halen."""
    report = no_embedding_demo(PeriodicPotential.zero(), zero_perturbation, 2.0, 1e3)

    assert report.passed
    assert report.experiment_id == "no_embedding"
    np.testing.assert_allclose(report.tables["decay"]["fitted_slopes"], 0.0, atol=1e-8)


def test_no_embedding_for_small_perturbation():
    """Test de ondergrens bij V = 0.1 sin(2x)/(1+x) en E = 2."""
    print("\n=== Test 2: No embedding ===")

    report = no_embedding_demo(
        PeriodicPotential.zero(), lambda x: 0.1 * math.sin(2.0 * x) / (1.0 + x), 2.0, 1e3
    )

    assert report.passed, [r.name for r in report.failures()]
    assert len(report.records) == 1 + 8
    assert min(report.tables["decay"]["fitted_slopes"]) > -1.0 / 3.0
    print(f"✓ min slope {min(report.tables['decay']['fitted_slopes']):.4f}")


def test_no_embedding_gate_rejects_large_perturbation():
    """Test dat V = 8 sin(2x)/(1+x) de poort niet haalt."""
    with pytest.raises(PreconditionError, match="1/3"):
        no_embedding_demo(
            PeriodicPotential.zero(), lambda x: 8.0 * math.sin(2.0 * x) / (1.0 + x), 1.0, 1e3
        )


def test_no_embedding_gate_sees_narrow_peak_on_long_range():
    """Test dat de poort een smalle piek ver voorbij 20000 lengte-eenheden niet mist."""

    def narrow_peak(x: float) -> float:
        return 1.0 / (1.0 + x) if abs(x - 20000.1) < 0.03 else 0.0

    with pytest.raises(PreconditionError, match="envelope gate"):
        no_embedding_demo(PeriodicPotential.zero(), narrow_peak, 1.0, 30010.0, start=10.0)


def test_no_embedding_dispatches_to_jacobi():
    """Test dat een Jacobi-operator via de discrete route loopt."""
    report = no_embedding_demo(
        PeriodicJacobi.free(), lambda n: 0.1 * np.sin(2.0 * n) / (1.0 + n), 0.5, 2000
    )

    assert report.experiment_id == "no_embedding_jacobi"
    assert report.passed
    assert report.runtime >= 0.0


# =============================================================================
# Inbedding
# =============================================================================


def test_embedding_rejects_resonant_set(policy: ScalingPolicy):
    """Test dat een resonante doelset geweigerd wordt voordat er gerekend wordt."""
    with pytest.raises(ResonantSetError):
        embedding_demo_finite(
            PeriodicPotential.zero(), [1.0, (math.pi - 1.0) ** 2], [0.0, 0.0], policy
        )


def test_infinite_mode_rejects_constant_envelope(policy: ScalingPolicy):
    """Test dat een constante h InfeasibleScheduleError geeft."""
    with pytest.raises(InfeasibleScheduleError):
        embedding_demo_infinite(
            PeriodicPotential.zero(), [1.0], [0.0], envelope_function("constant", 5.0), policy
        )


def test_jacobi_embedding_run(policy: ScalingPolicy):
    """Test de volledige discrete keten voor E = 1 over twee epochs."""
    print("\n=== Test 3: Jacobi embedding ===")

    run = run_embedding(PeriodicJacobi.free(), [1.0], [0.3], policy, "finite", epochs=2)

    report = run.report
    assert isinstance(run.assembly, JacobiAssembly)
    assert report.experiment_id == "embedding_finite"
    assert report.passed, [r.name for r in report.failures()]
    assert report.inputs["operator"] == "jacobi"
    assert {"quasimomenta", "schedule", "epochs", "envelopes", "l2_tails"} <= set(report.tables)
    data = report.to_dict()
    assert data["pass"] is True
    assert "runtime" not in data
    print(f"✓ {len(report.records)} records")


def test_strict_embedding_raises_first_failed_record():
    """Test dat run_embedding met strict de eerste geschonden L2-verhouding opgooit."""
    policy = ScalingPolicy(l2_ratio_bound=0.0)

    loose = run_embedding(PeriodicJacobi.free(), [1.0], [0.3], policy, "finite", epochs=2)
    assert not loose.report.passed

    with pytest.raises(ContractViolation) as exc_info:
        run_embedding(PeriodicJacobi.free(), [1.0], [0.3], policy, "finite", epochs=2, strict=True)

    assert exc_info.value.anchor == "l2.epoch_ratio"
    assert exc_info.value.rhs == 0.0
