"""Periodieke Jacobi-operatoren: banden, Floquet-data en discrete Prüfer-variabelen.

Conventie:

    a_{n+1} u(n+1) + a_n u(n-1) + (b_{n+1} + b'_{n+1}) u(n) = E u(n),   n >= 0,

met a_n, b_n geindexeerd vanaf n = 1 en q-periodiek. De Prüfer-variabele Z(n)
is vastgelegd door (a_n u(n), u(n-1)) = Im[Z(n) (a_n φ(n), φ(n-1))].
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from embedded_eigen.core.exceptions import (
    ContractViolation,
    DegenerateFloquetError,
    NotInBandError,
    PreconditionError,
)
from embedded_eigen.systems.bands import BandStructure, locate_edges

logger = logging.getLogger(__name__)

STEP_TOL = 1e-12
WRONSKIAN_TOL = 1e-10


# =============================================================================
# Operator en banden
# =============================================================================


@dataclass(frozen=True, slots=True)
class PeriodicJacobi:
    """q-periodieke coëfficiënten; a[j] is a_{j+1}, b[j] is b_{j+1}."""

    a: tuple[float, ...]
    b: tuple[float, ...]
    name: str = "jacobi"

    def __post_init__(self) -> None:
        if not self.a or len(self.a) != len(self.b):
            raise PreconditionError("PeriodicJacobi", "a and b need the same positive length")
        if any(v <= 0.0 for v in self.a):
            raise PreconditionError("PeriodicJacobi", "off-diagonal a_n must be positive")

    @classmethod
    def free(cls) -> PeriodicJacobi:
        return cls((1.0,), (0.0,), name="free")

    @classmethod
    def from_lists(cls, a: Sequence[float], b: Sequence[float]) -> PeriodicJacobi:
        return cls(tuple(float(v) for v in a), tuple(float(v) for v in b))

    @property
    def q(self) -> int:
        return len(self.a)

    def a_at(self, n: int) -> float:
        """a_n voor elk geheel n (periodiek voortgezet)."""
        return self.a[(n - 1) % self.q]

    def b_at(self, n: int) -> float:
        return self.b[(n - 1) % self.q]


def transfer(J0: PeriodicJacobi, E: float, n: int) -> NDArray[np.float64]:
    """T_n: (u(n), u(n-1)) -> (u(n+1), u(n))."""
    a_next = J0.a_at(n + 1)
    return np.array([[(E - J0.b_at(n + 1)) / a_next, -J0.a_at(n) / a_next], [1.0, 0.0]])


def jacobi_monodromy(J0: PeriodicJacobi, E: float) -> NDArray[np.float64]:
    """Product T_q ··· T_1: (u(1), u(0)) -> (u(q+1), u(q))."""
    matrix = np.eye(2)
    for n in range(1, J0.q + 1):
        matrix = transfer(J0, E, n) @ matrix
    return matrix


def jacobi_discriminant_batch(
    J0: PeriodicJacobi, energies: ArrayLike
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Δ(E) en dΔ/dE via de productregel, gevectoriseerd over energieën."""
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    m = np.broadcast_to(np.eye(2), (E.size, 2, 2)).copy()
    dm = np.zeros_like(m)
    for n in range(1, J0.q + 1):
        a_next = J0.a_at(n + 1)
        t = np.zeros_like(m)
        t[:, 0, 0] = (E - J0.b_at(n + 1)) / a_next
        t[:, 0, 1] = -J0.a_at(n) / a_next
        t[:, 1, 0] = 1.0
        dt = np.zeros_like(m)
        dt[:, 0, 0] = 1.0 / a_next
        dm = dt @ m + t @ dm
        m = t @ m
    return m[:, 0, 0] + m[:, 1, 1], dm[:, 0, 0] + dm[:, 1, 1]


def jacobi_discriminant(J0: PeriodicJacobi, E: float) -> float:
    return float(np.trace(jacobi_monodromy(J0, E)))


def jacobi_bands(
    J0: PeriodicJacobi,
    E_min: float,
    E_max: float,
    root_tol: float = 1e-10,
    *,
    points_per_unit: int = 400,
) -> BandStructure:
    """Banden van J0 in [E_min, E_max]; zie ``locate_edges``."""
    return locate_edges(
        lambda grid: jacobi_discriminant_batch(J0, grid),
        E_min,
        E_max,
        root_tol=root_tol,
        points_per_unit=points_per_unit,
    )


def jacobi_quasimomentum(J0: PeriodicJacobi, E: float, root_tol: float = 1e-10) -> float:
    """k(E) = arccos(Δ(E)/2) in (0, π).

    Raises
    ------
    NotInBandError
        Als |Δ(E)| >= 2 - root_tol.
    """
    delta = jacobi_discriminant(J0, E)
    if abs(delta) >= 2.0 - root_tol:
        raise NotInBandError(E, delta)
    return math.acos(delta / 2.0)


# =============================================================================
# Floquet-data
# =============================================================================


@dataclass(frozen=True, slots=True)
class JacobiFloquet:
    """φ(n) = p(n) e^{ikn/q} met |φ(0)|² + |φ(1)|² = 1 en ω > 0.

    ``phi_period`` bevat φ(0..q); ``gamma_period`` het ontwonden argument op
    0..q met sprongen in [0, 2π). ``phase_advance`` = γ(q) - γ(0).
    """

    operator: PeriodicJacobi
    energy: float
    k: float
    omega: float
    phi_period: NDArray[np.complex128] = field(repr=False)
    gamma_period: NDArray[np.float64] = field(repr=False)
    phase_advance: float
    multiplier_sign: int
    _abs_sq: NDArray[np.float64] = field(repr=False)

    @property
    def q(self) -> int:
        return self.operator.q

    @property
    def identifier(self) -> str:
        return f"jacobi-floquet:E={self.energy:.12g}"

    @property
    def multiplier(self) -> complex:
        return cmath.exp(1j * self.multiplier_sign * self.k)

    @property
    def min_abs_sq(self) -> float:
        return float(np.min(self._abs_sq))

    @property
    def max_abs_sq(self) -> float:
        return float(np.max(self._abs_sq))

    def phi(self, n: int) -> complex:
        block, r = divmod(n, self.q)
        return complex(self.phi_period[r] * self.multiplier**block)

    def abs_phi_sq(self, n: int) -> float:
        return float(self._abs_sq[n % self.q])

    def gamma(self, n: int) -> float:
        block, r = divmod(n, self.q)
        return float(self.gamma_period[r] + self.phase_advance * block)

    def gamma_mod(self, n: int) -> float:
        """γ(n) modulo 2π, zonder verlies van precisie bij grote n."""
        block, r = divmod(n, self.q)
        return float(self.gamma_period[r] + math.fmod(self.phase_advance * block, 2.0 * math.pi))

    def abs_sq_array(self, n: NDArray[np.int64]) -> NDArray[np.float64]:
        return self._abs_sq[np.mod(n, self.q)]

    def gamma_array(self, n: NDArray[np.int64]) -> NDArray[np.float64]:
        block, r = np.divmod(n, self.q)
        return self.gamma_period[r] + np.mod(self.phase_advance * block, 2.0 * math.pi)

    def wronskian_residual(self, sites: int | None = None) -> float:
        """max_n |2|φ(n)||φ(n+1)| a_{n+1} sin(γ(n+1)-γ(n)) - ω|."""
        count = sites if sites is not None else 2 * self.q
        worst = 0.0
        for n in range(count):
            lhs = (
                2.0
                * math.sqrt(self.abs_phi_sq(n) * self.abs_phi_sq(n + 1))
                * self.operator.a_at(n + 1)
                * math.sin(self.gamma(n + 1) - self.gamma(n))
            )
            worst = max(worst, abs(lhs - self.omega))
        return worst


def jacobi_floquet(
    J0: PeriodicJacobi, E: float, root_tol: float = 1e-10, *, edge_exclusion: float = 1e-6
) -> JacobiFloquet:
    """Floquet-oplossing uit de eigenvector van de monodromie.

    Raises
    ------
    NotInBandError
        Als |Δ(E)| >= 2.
    DegenerateFloquetError
        Te dicht bij een bandrand of bij een geschonden Wronskiaan-identiteit.
    """
    monodromy = jacobi_monodromy(J0, E)
    delta = float(np.trace(monodromy))
    if abs(delta) >= 2.0 - root_tol:
        raise NotInBandError(E, delta)
    if abs(delta) > 2.0 - edge_exclusion:
        raise DegenerateFloquetError(E, "eigenvector degenerate near band edge")
    k = math.acos(delta / 2.0)
    multiplier = cmath.exp(1j * k)

    # (M - e^{ik}) v = 0 met v = (φ(1), φ(0))
    m = monodromy
    first = np.array([m[0, 1], multiplier - m[0, 0]], dtype=complex)
    second = np.array([multiplier - m[1, 1], m[1, 0]], dtype=complex)
    v = first if np.linalg.norm(first) >= np.linalg.norm(second) else second
    if np.linalg.norm(v) < 1e-14:
        raise DegenerateFloquetError(E, "eigenvector degenerate")
    v = v / np.linalg.norm(v)

    q = J0.q
    phi = np.empty(q + 1, dtype=complex)
    phi[0], phi[1] = v[1], v[0]
    for n in range(1, q):
        phi[n + 1] = ((E - J0.b_at(n + 1)) * phi[n] - J0.a_at(n) * phi[n - 1]) / J0.a_at(n + 1)

    omega = 2.0 * J0.a_at(1) * float((np.conj(phi[0]) * phi[1]).imag)
    sign = 1
    if omega < 0.0:
        phi = np.conj(phi)
        omega = -omega
        sign = -1
    if omega < 1e-14:
        raise DegenerateFloquetError(E, "Wronskian vanishes")

    angles = np.angle(phi)
    gamma = np.empty(q + 1)
    gamma[0] = angles[0] % (2.0 * math.pi)
    for n in range(1, q + 1):
        gamma[n] = gamma[n - 1] + (angles[n] - angles[n - 1]) % (2.0 * math.pi)
    abs_sq = np.abs(phi[:q]) ** 2

    jf = JacobiFloquet(
        operator=J0,
        energy=float(E),
        k=k,
        omega=omega,
        phi_period=phi,
        gamma_period=gamma,
        phase_advance=float(gamma[q] - gamma[0]),
        multiplier_sign=sign,
        _abs_sq=abs_sq,
    )
    residual = jf.wronskian_residual()
    if residual > WRONSKIAN_TOL:
        logger.warning(f"Jacobi Wronskian residual {residual:.3e} at E={E:.12g}")
        if residual > 1e-6:
            raise DegenerateFloquetError(E, f"Wronskian identity residual {residual:.3e}")
    return jf


# =============================================================================
# Prüfer-variabelen
# =============================================================================


@dataclass(frozen=True, slots=True)
class JacobiPruferState:
    """Z(n) = R(n) e^{iη(n)} op site n."""

    n: int
    Z: complex

    def __post_init__(self) -> None:
        if not abs(self.Z) > 0.0:
            raise PreconditionError("JacobiPruferState", "Z must be non-zero")

    @property
    def R(self) -> float:
        return abs(self.Z)

    @property
    def eta(self) -> float:
        return cmath.phase(self.Z)

    def theta(self, jf: JacobiFloquet) -> float:
        """θ(n) = η(n) + γ(n), modulo 2π."""
        return self.eta + jf.gamma_mod(self.n)


def z_from_solution(
    u_prev: float, u_n: float, n: int, jf: JacobiFloquet, a_prime_n: float = 0.0
) -> complex:
    """Z(n) = (2/ω) W_{0,a'}(φ̄, u)(n-1) uit u(n-1), u(n)."""
    a_n = jf.operator.a_at(n)
    return (2.0 / jf.omega) * (
        (a_n + a_prime_n) * jf.phi(n - 1).conjugate() * u_n - a_n * jf.phi(n).conjugate() * u_prev
    )


def u_from_z(Z: complex, n: int, jf: JacobiFloquet, a_prime_n: float = 0.0) -> tuple[float, float]:
    """(u(n-1), u(n)) uit Z(n) via (a_n+a'_n) u(n) = Im(Z a_n φ(n)), u(n-1) = Im(Z φ(n-1))."""
    a_n = jf.operator.a_at(n)
    u_n = a_n * (Z * jf.phi(n)).imag / (a_n + a_prime_n)
    return float((Z * jf.phi(n - 1)).imag), float(u_n)


def amplitude_ratio_sq(b_prime_next: float, theta: float, abs_sq: float, omega: float) -> float:
    """R(n+1)²/R(n)² = 1 - (2/ω) b' sin 2θ |φ|² + 4 b'² |φ|⁴ sin²θ / ω²."""
    s = b_prime_next * abs_sq / omega
    return 1.0 - 2.0 * s * math.sin(2.0 * theta) + 4.0 * s * s * math.sin(theta) ** 2


def step_factor(b_prime_next: float, theta: float, abs_sq: float, omega: float) -> complex:
    """Z(n+1)/Z(n) = 1 - (i/ω) b' |φ(n)|² (e^{-2iθ(n)} - 1)."""
    return 1.0 - 1j * b_prime_next * abs_sq / omega * (cmath.exp(-2j * theta) - 1.0)


def prufer_step(
    state: JacobiPruferState, b_prime_next: float, jf: JacobiFloquet, *, check: bool = True
) -> JacobiPruferState:
    """Een stap van de vereenvoudigde recursie (a' ≡ 0).

    Met ``check`` worden de modulusformule en de cot-recursie in projectieve
    vorm (zonder deling door sin) tot STEP_TOL gecontroleerd.

    Raises
    ------
    ContractViolation
        Als een van de controles faalt.
    """
    n = state.n
    theta = state.theta(jf)
    abs_sq = jf.abs_phi_sq(n)
    factor = step_factor(b_prime_next, theta, abs_sq, jf.omega)
    nxt = JacobiPruferState(n + 1, state.Z * factor)
    if check:
        closed = amplitude_ratio_sq(b_prime_next, theta, abs_sq, jf.omega)
        direct = abs(factor) ** 2
        if abs(direct - closed) > STEP_TOL * max(1.0, closed):
            raise ContractViolation(
                "R(n+1)^2/R(n)^2 equals the closed form", "jacobi.step.modulus", direct, closed, n
            )
        s = b_prime_next * abs_sq / jf.omega
        psi = nxt.eta + jf.gamma_mod(n)
        x, y = math.cos(theta) - 2.0 * s * math.sin(theta), math.sin(theta)
        residual = abs(math.sin(psi) * x - math.cos(psi) * y) / math.hypot(x, y)
        if residual > STEP_TOL:
            raise ContractViolation(
                "cot(eta(n+1)+gamma(n)) = cot(theta(n)) - 2 s", "jacobi.step.cot", residual, 0.0, n
            )
    return nxt


def prufer_step_general(
    state: JacobiPruferState, a_prime_n: float, b_prime_next: float, jf: JacobiFloquet
) -> JacobiPruferState:
    """Recursie met a' ≠ 0 via het Wronskiaan-verschil.

    Z(n+1) = Z(n) - (2/ω)[b'_{n+1} φ̄(n) u(n) + a'_n (φ̄(n) u(n-1) + φ̄(n-1) u(n))].
    Alleen voor identiteitscontroles; stages gebruiken a' ≡ 0.
    """
    n = state.n
    u_prev, u_n = u_from_z(state.Z, n, jf, a_prime_n)
    phi_n = jf.phi(n).conjugate()
    phi_prev = jf.phi(n - 1).conjugate()
    change = b_prime_next * phi_n * u_n + a_prime_n * (phi_n * u_prev + phi_prev * u_n)
    return JacobiPruferState(n + 1, state.Z - (2.0 / jf.omega) * change)


def direct_recursion(
    J0: PeriodicJacobi,
    E: float,
    u0: float,
    u1: float,
    n_end: int,
    b_prime: ArrayLike | None = None,
    a_prime: ArrayLike | None = None,
) -> NDArray[np.float64]:
    """u(0..n_end) uit de drieterm-recursie met storingen b'[n], a'[n] (index = site)."""
    bp = np.zeros(n_end + 2) if b_prime is None else np.asarray(b_prime, dtype=float)
    ap = np.zeros(n_end + 2) if a_prime is None else np.asarray(a_prime, dtype=float)
    if bp.size < n_end + 1 or ap.size < n_end + 1:
        raise PreconditionError("direct_recursion", "perturbation arrays too short")
    u = np.empty(n_end + 1)
    u[0], u[1] = u0, u1
    for n in range(1, n_end):
        a_next = J0.a_at(n + 1) + ap[n + 1]
        diagonal = E - J0.b_at(n + 1) - bp[n + 1]
        u[n + 1] = (diagonal * u[n] - (J0.a_at(n) + ap[n]) * u[n - 1]) / a_next
    return u


@dataclass(frozen=True, slots=True)
class JacobiTrajectory:
    """(ln R, θ) op de sites n_start..n_end; θ modulo 2π."""

    sites: NDArray[np.int64]
    ln_r: NDArray[np.float64]
    theta: NDArray[np.float64]
    energy: float

    @property
    def final(self) -> tuple[int, float, float]:
        return int(self.sites[-1]), float(self.ln_r[-1]), float(self.theta[-1])

    def window(self, n0: int, n1: int) -> JacobiTrajectory:
        mask = (self.sites >= n0) & (self.sites <= n1)
        return JacobiTrajectory(self.sites[mask], self.ln_r[mask], self.theta[mask], self.energy)

    @classmethod
    def concatenate(cls, parts: Sequence[JacobiTrajectory]) -> JacobiTrajectory:
        if not parts:
            raise ValueError("Nothing to concatenate")
        sites, ln_r, theta = [parts[0].sites], [parts[0].ln_r], [parts[0].theta]
        for prev, part in zip(parts[:-1], parts[1:]):
            skip = 1 if part.sites[0] <= prev.sites[-1] else 0
            sites.append(part.sites[skip:])
            ln_r.append(part.ln_r[skip:])
            theta.append(part.theta[skip:])
        return cls(
            np.concatenate(sites), np.concatenate(ln_r), np.concatenate(theta), parts[0].energy
        )


def evolve(
    frames: Sequence[JacobiFloquet],
    b_prime: NDArray[np.float64],
    n_start: int,
    n_end: int,
    eta0: Sequence[float],
    ln_r0: Sequence[float] | None = None,
) -> list[JacobiTrajectory]:
    """Volg (ln R, η) voor meerdere energieën bij een gegeven b'-rij.

    b_prime is geindexeerd per site (b_prime[n] = b'_n, lengte > n_end).
    Per stap: ln R += ½ ln|F|², η += arg F met
    F = 1 - s sin 2θ + 2is sin²θ, s = b'_{n+1}|φ(n)|²/ω.
    """
    m = len(frames)
    if m == 0:
        return []
    sites = np.arange(n_start, n_end + 1)
    ln_r = np.zeros((m, sites.size))
    theta = np.zeros((m, sites.size))
    eta = np.asarray(eta0, dtype=float).copy()
    current = np.zeros(m) if ln_r0 is None else np.asarray(ln_r0, dtype=float).copy()
    omega = np.array([jf.omega for jf in frames])
    gammas = np.stack([jf.gamma_array(sites) for jf in frames])
    abs_sq = np.stack([jf.abs_sq_array(sites) for jf in frames])
    ln_r[:, 0] = current
    for idx in range(sites.size - 1):
        n = n_start + idx
        th = eta + gammas[:, idx]
        theta[:, idx] = th
        bp = b_prime[n + 1]
        if bp != 0.0:
            s = bp * abs_sq[:, idx] / omega
            sin_t = np.sin(th)
            real = 1.0 - s * np.sin(2.0 * th)
            imag = 2.0 * s * sin_t * sin_t
            current = current + 0.5 * np.log(real * real + imag * imag)
            eta = eta + np.arctan2(imag, real)
        ln_r[:, idx + 1] = current
    theta[:, -1] = eta + gammas[:, -1]
    return [JacobiTrajectory(sites, ln_r[j], theta[j], jf.energy) for j, jf in enumerate(frames)]


def log_amplitude_remainder(
    jf: JacobiFloquet, b_primes: Sequence[float], angles: Sequence[float], n: int = 0
) -> float:
    """Gemeten constante c in |Δ ln R + (b'/ω) sin 2θ |φ|²| <= c b'²."""
    worst = 0.0
    abs_sq = jf.abs_phi_sq(n)
    for bp in b_primes:
        if bp == 0.0:
            continue
        for theta in angles:
            exact = 0.5 * math.log(amplitude_ratio_sq(bp, theta, abs_sq, jf.omega))
            first = -(bp / jf.omega) * math.sin(2.0 * theta) * abs_sq
            worst = max(worst, abs(exact - first) / (bp * bp))
    return worst


__all__ = [
    "PeriodicJacobi",
    "transfer",
    "jacobi_monodromy",
    "jacobi_discriminant",
    "jacobi_discriminant_batch",
    "jacobi_bands",
    "jacobi_quasimomentum",
    "JacobiFloquet",
    "jacobi_floquet",
    "JacobiPruferState",
    "z_from_solution",
    "u_from_z",
    "amplitude_ratio_sq",
    "step_factor",
    "prufer_step",
    "prufer_step_general",
    "direct_recursion",
    "JacobiTrajectory",
    "evolve",
    "log_amplitude_remainder",
]
