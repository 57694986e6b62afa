"""Floquet-theorie voor de 1-periodieke operator H0 = -d²/dx² + V0.

Monodromie, discriminant, bandranden, quasimomentum en de Floquet-oplossing
φ(x) = p(x) e^{iκx} met zijn continue fase γ.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import solve_ivp

from embedded_eigen.core.exceptions import (
    DegenerateFloquetError,
    IntegrationError,
    NotInBandError,
)
from embedded_eigen.systems.bands import BandStructure, locate_edges
from embedded_eigen.utils.math_helpers import TrigInterpolant

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_GRID = 1024
EDGE_EXCLUSION = 1e-6


# =============================================================================
# Periodic potential
# =============================================================================


@dataclass(frozen=True, slots=True)
class PeriodicPotential:
    """Reele 1-periodieke potentiaal; de evaluator krijgt altijd x mod 1.

    Attributes
    ----------
    evaluator:
        Gevectoriseerde functie op [0, 1).
    smoothness_class:
        Beschrijvend label ("continuous" of "piecewise-continuous").
    name:
        Naam voor logs en rapporten.
    is_zero:
        True voor de vrije operator; slaat evaluaties over.
    """

    evaluator: Callable[[NDArray[np.float64]], NDArray[np.float64]] = field(repr=False)
    smoothness_class: str = "continuous"
    name: str = "custom"
    is_zero: bool = False

    def __call__(self, x: ArrayLike) -> NDArray[np.float64]:
        arr = np.asarray(x, dtype=float)
        if self.is_zero:
            return np.zeros_like(arr)
        return np.asarray(self.evaluator(np.mod(arr, 1.0)), dtype=float)

    def value(self, x: float) -> float:
        if self.is_zero:
            return 0.0
        return float(self.evaluator(np.array([x % 1.0]))[0])

    @classmethod
    def zero(cls) -> PeriodicPotential:
        return cls(evaluator=np.zeros_like, name="zero", is_zero=True)

    @classmethod
    def cosine(cls, amp: float, freq: int = 1) -> PeriodicPotential:
        """V0(x) = amp * cos(2π freq x)."""
        if amp == 0.0:
            return cls.zero()

        def evaluate(x: NDArray[np.float64]) -> NDArray[np.float64]:
            return amp * np.cos(2.0 * np.pi * freq * x)

        return cls(evaluator=evaluate, name=f"cosine amp={amp:g} freq={freq}")

    @classmethod
    def fourier(
        cls, cos: Sequence[float], sin: Sequence[float] = (), mean: float = 0.0
    ) -> PeriodicPotential:
        """V0(x) = mean + Σ_m cos[m-1] cos(2π m x) + sin[m-1] sin(2π m x)."""
        a = np.asarray(cos, dtype=float)
        b = np.asarray(sin, dtype=float)
        if mean == 0.0 and not np.any(a) and not np.any(b):
            return cls.zero()
        ma = np.arange(1, a.size + 1, dtype=float)
        mb = np.arange(1, b.size + 1, dtype=float)

        def evaluate(x: NDArray[np.float64]) -> NDArray[np.float64]:
            arr = np.asarray(x, dtype=float)
            out = np.full(arr.shape, mean)
            if a.size:
                out = out + np.cos(2.0 * np.pi * np.multiply.outer(arr, ma)) @ a
            if b.size:
                out = out + np.sin(2.0 * np.pi * np.multiply.outer(arr, mb)) @ b
            return out

        return cls(evaluator=evaluate, name=f"fourier modes={max(a.size, b.size)}")


# =============================================================================
# Fundamental system
# =============================================================================


def _fundamental_system(
    V0: PeriodicPotential,
    energies: NDArray[np.float64],
    t_eval: NDArray[np.float64] | None,
    tol: float,
    with_energy_derivative: bool,
) -> NDArray[np.float64]:
    """Integreer (u1, u1', u2, u2') [en hun E-afgeleiden] voor alle energieën tegelijk.

    Returns
    -------
    ndarray
        Vorm (componenten, energieën, tijden); zonder t_eval alleen x = 1.
    """
    m = energies.size
    comps = 8 if with_energy_derivative else 4
    y0 = np.zeros((comps, m))
    y0[0] = 1.0
    y0[3] = 1.0

    def rhs(x: float, y: NDArray[np.float64]) -> NDArray[np.float64]:
        s = y.reshape(comps, m)
        q = V0.value(x) - energies
        out = np.empty_like(s)
        out[0] = s[1]
        out[1] = q * s[0]
        out[2] = s[3]
        out[3] = q * s[2]
        if with_energy_derivative:
            out[4] = s[5]
            out[5] = q * s[4] - s[0]
            out[6] = s[7]
            out[7] = q * s[6] - s[2]
        return out.ravel()

    sol = solve_ivp(
        rhs,
        (0.0, 1.0),
        y0.ravel(),
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-2,
        t_eval=t_eval if t_eval is not None else np.array([1.0]),
    )
    if not sol.success or not np.all(np.isfinite(sol.y)):
        raise IntegrationError("monodromy", f"{sol.message} (non-finite V0 samples?)")
    return sol.y.reshape(comps, m, -1)


def monodromy(V0: PeriodicPotential, E: float, tol: float = DEFAULT_TOL) -> NDArray[np.float64]:
    """Transfermatrix over een periode: (u(0), u'(0)) -> (u(1), u'(1)).

    Raises
    ------
    IntegrationError
        Als de integrator faalt of niet-eindige waarden oplevert.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    y = _fundamental_system(V0, np.array([float(E)]), None, tol, False)[:, 0, -1]
    matrix = np.array([[y[0], y[2]], [y[1], y[3]]])
    drift = abs(np.linalg.det(matrix) - 1.0)
    if drift > 10.0 * tol:
        logger.warning(f"Monodromy determinant drift {drift:.3e} at E={E:.12g}")
    return matrix


def discriminant(V0: PeriodicPotential, E: float, tol: float = DEFAULT_TOL) -> float:
    """Δ(E) = trace van de monodromie."""
    return float(np.trace(monodromy(V0, E, tol)))


def discriminant_batch(
    V0: PeriodicPotential, energies: ArrayLike, tol: float = DEFAULT_TOL
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Δ(E) en dΔ/dE voor een hele rij energieën in een integratie."""
    grid = np.atleast_1d(np.asarray(energies, dtype=float))
    y = _fundamental_system(V0, grid, None, tol, True)[:, :, -1]
    delta = y[0] + y[3]
    slope = y[4] + y[7]
    return delta, slope


def locate_bands(
    V0: PeriodicPotential,
    E_min: float,
    E_max: float,
    root_tol: float = 1e-10,
    *,
    points_per_unit: int = 400,
    tol: float = DEFAULT_TOL,
) -> BandStructure:
    """Banden van H0 in [E_min, E_max]; zie ``locate_edges``."""
    return locate_edges(
        lambda grid: discriminant_batch(V0, grid, tol),
        E_min,
        E_max,
        root_tol=root_tol,
        points_per_unit=points_per_unit,
    )


def quasimomentum(
    V0: PeriodicPotential, E: float, root_tol: float = 1e-10, tol: float = DEFAULT_TOL
) -> float:
    """k(E) = arccos(Δ(E)/2) in (0, π).

    De arccos-tak is al monotoon over elke band: stijgend waar Δ daalt en
    dalend waar Δ stijgt, in overeenstemming met de richtingsvlag.

    Raises
    ------
    NotInBandError
        Als |Δ(E)| >= 2 - root_tol.
    """
    delta = discriminant(V0, E, tol)
    if abs(delta) >= 2.0 - root_tol:
        raise NotInBandError(E, delta)
    return math.acos(delta / 2.0)


# =============================================================================
# Floquet solution
# =============================================================================


@dataclass(frozen=True, slots=True)
class FloquetData:
    """Floquet-oplossing φ(x) = |φ(x)| e^{iγ(x)} bij een energie binnen een band.

    Attributes
    ----------
    energy:
        E, strikt binnen een band.
    k:
        Quasimomentum in (0, π).
    phi0, dphi0:
        φ(0), φ'(0), genormaliseerd tot |φ(0)|² + |φ'(0)|² = 1.
    p_samples:
        φ(x) e^{-iκx} op ``grid`` (1-periodiek).
    grid:
        Equidistante punten j/N, j = 0..N-1.
    omega_c:
        Im(conj(φ) φ') > 0, constant in x.
    G:
        max(sup γ', 1/inf γ').
    norm_constant:
        K met (u² + u'²)/R² in [1/K, K] langs elke Prüfer-baan.
    phase_advance:
        κ = γ(x+1) - γ(x), congruent met ±k modulo 2π.
    multiplier_sign:
        +1 als φ(x+1) = e^{ik} φ(x), -1 als de geconjugeerde tak gekozen is.
    """

    energy: float
    k: float
    phi0: complex
    dphi0: complex
    p_samples: NDArray[np.complex128] = field(repr=False)
    grid: NDArray[np.float64] = field(repr=False)
    omega_c: float
    G: float
    norm_constant: float
    phase_advance: float
    multiplier_sign: int
    _p: TrigInterpolant = field(repr=False)
    _q: TrigInterpolant = field(repr=False)
    _abs_sq: TrigInterpolant = field(repr=False)
    _eta: TrigInterpolant = field(repr=False)

    @property
    def identifier(self) -> str:
        return f"floquet:E={self.energy:.12g}"

    def phi(self, x: ArrayLike) -> NDArray[np.complex128]:
        arr = np.asarray(x, dtype=float)
        return self._p(arr) * np.exp(1j * self.phase_advance * arr)

    def dphi(self, x: ArrayLike) -> NDArray[np.complex128]:
        arr = np.asarray(x, dtype=float)
        return self._q(arr) * np.exp(1j * self.phase_advance * arr)

    def abs_phi_sq(self, x: ArrayLike) -> NDArray[np.float64]:
        return self._abs_sq(x)

    def gamma(self, x: ArrayLike) -> NDArray[np.float64]:
        arr = np.asarray(x, dtype=float)
        return self.phase_advance * arr + self._eta(arr)

    def gamma_prime(self, x: ArrayLike) -> NDArray[np.float64]:
        return self.omega_c / self._abs_sq(x)

    def gamma_at(self, x: float) -> float:
        return float(self.gamma(np.array([x]))[0])

    def gamma_prime_at(self, x: float) -> float:
        if self._abs_sq.is_constant:
            return self.omega_c / self._abs_sq.mean.real
        return float(self.omega_c / self._abs_sq(np.array([x]))[0])


def floquet_solution(
    V0: PeriodicPotential,
    E: float,
    tol: float = DEFAULT_TOL,
    *,
    grid_points: int = DEFAULT_GRID,
    edge_exclusion: float = EDGE_EXCLUSION,
) -> FloquetData:
    """Bereken de Floquet-oplossing met Im(conj(φ(0)) φ'(0)) > 0.

    Raises
    ------
    NotInBandError
        Als |Δ(E)| >= 2.
    DegenerateFloquetError
        Als |Δ(E)| > 2 - edge_exclusion, of als het grid te grof is om γ te ontwinden.
    """
    x = np.linspace(0.0, 1.0, grid_points + 1)
    y = _fundamental_system(V0, np.array([float(E)]), x, tol, False)[:, 0, :]
    u1, du1, u2, du2 = y
    matrix = np.array([[u1[-1], u2[-1]], [du1[-1], du2[-1]]])
    delta = float(np.trace(matrix))
    if abs(delta) >= 2.0:
        raise NotInBandError(E, delta)
    if abs(delta) > 2.0 - edge_exclusion:
        raise DegenerateFloquetError(E, f"|discriminant| = {abs(delta):.12g} too close to 2")

    k = math.acos(delta / 2.0)
    eigvals, eigvecs = np.linalg.eig(matrix.astype(complex))
    target = np.exp(1j * k)
    idx = int(np.argmin(np.abs(eigvals - target)))
    vec = eigvecs[:, idx] / np.linalg.norm(eigvecs[:, idx])
    sign = 1
    if (np.conj(vec[0]) * vec[1]).imag < 0.0:
        vec = np.conj(vec)
        sign = -1
    phi0, dphi0 = complex(vec[0]), complex(vec[1])

    phi = phi0 * u1 + dphi0 * u2
    dphi = phi0 * du1 + dphi0 * du2
    omega = float((np.conj(phi0) * dphi0).imag)
    wronskian = (np.conj(phi) * dphi).imag
    drift = float(np.max(np.abs(wronskian - omega)) / omega)
    if drift > 1e-3:
        raise IntegrationError("floquet_solution", f"Wronskian drift {drift:.3e} at E={E:.12g}")
    if drift > 1e-6:
        logger.warning(f"Wronskian drift {drift:.3e} at E={E:.12g}")

    gamma = np.unwrap(np.angle(phi))
    steps = np.abs(np.diff(gamma))
    if float(np.max(steps)) > math.pi / 2.0:
        raise DegenerateFloquetError(E, "phase grid too coarse to unwrap gamma")
    kappa = float(gamma[-1] - gamma[0])

    body = slice(0, grid_points)
    carrier = np.exp(-1j * kappa * x[body])
    p_samples = phi[body] * carrier
    abs_sq = np.abs(phi[body]) ** 2
    gamma_prime = omega / abs_sq
    G = float(max(np.max(gamma_prime), 1.0 / np.min(gamma_prime)))
    # modes below integrator accuracy are noise
    cutoff = max(tol, 1e-13)

    frames = np.stack(
        [np.stack([phi.real, phi.imag], axis=-1), np.stack([dphi.real, dphi.imag], axis=-1)],
        axis=-2,
    )
    sigma = np.linalg.svd(frames, compute_uv=False)
    norm_constant = float(max(np.max(sigma[:, 0] ** 2), np.max(1.0 / sigma[:, 1] ** 2)))

    logger.debug(
        f"Floquet data at E={E:.12g}: k={k:.12g} kappa={kappa:.12g} omega={omega:.6g} G={G:.6g}"
    )
    return FloquetData(
        energy=float(E),
        k=k,
        phi0=phi0,
        dphi0=dphi0,
        p_samples=p_samples,
        grid=x[body],
        omega_c=omega,
        G=G,
        norm_constant=norm_constant,
        phase_advance=kappa,
        multiplier_sign=sign,
        _p=TrigInterpolant.from_samples(p_samples, cutoff),
        _q=TrigInterpolant.from_samples(dphi[body] * carrier, cutoff),
        _abs_sq=TrigInterpolant.from_samples(abs_sq, cutoff),
        _eta=TrigInterpolant.from_samples(gamma[body] - kappa * x[body], cutoff),
    )


__all__ = [
    "PeriodicPotential",
    "FloquetData",
    "monodromy",
    "discriminant",
    "discriminant_batch",
    "locate_bands",
    "quasimomentum",
    "floquet_solution",
]
