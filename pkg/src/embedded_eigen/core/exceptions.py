"""Domeinexcepties voor de spectrale pijplijn.

Alle numerieke en contractfouten erven van ``SpectralError`` zodat de CLI ze
in een keer kan afvangen en naar een exitcode kan vertalen.
"""

from __future__ import annotations


class SpectralError(Exception):
    """Base exception voor alle fouten in de spectrale berekeningen."""

    pass


class NotInBandError(SpectralError):
    """Exception wanneer een energie niet in het inwendige van een band ligt."""

    def __init__(self, energy: float, discriminant: float) -> None:
        self.energy = energy
        self.discriminant = discriminant
        self.message = (
            f"Energy {energy:.12g} not in band interior (discriminant {discriminant:.12g})"
        )
        super().__init__(self.message)


class DegenerateFloquetError(SpectralError):
    """Exception wanneer de Floquet-eigenvector niet betrouwbaar te bepalen is."""

    def __init__(self, energy: float, reason: str) -> None:
        self.energy = energy
        self.reason = reason
        self.message = f"Floquet eigenvector degenerate at E={energy:.12g}: {reason}"
        super().__init__(self.message)


class UnresolvedEdgeError(SpectralError):
    """Exception wanneer twee bandranden in dezelfde scancel vallen."""

    def __init__(self, cell: tuple[float, float], detail: str = "") -> None:
        self.cell = cell
        self.detail = detail
        extra = f" ({detail})" if detail else ""
        self.message = (
            f"Unresolved edge in scan cell [{cell[0]:.12g}, {cell[1]:.12g}]{extra}; "
            f"refine grid (increase points_per_unit)"
        )
        super().__init__(self.message)


class IntegrationError(SpectralError):
    """Exception wanneer de ODE-integrator faalt (step underflow, niet-eindige waarden)."""

    def __init__(self, where: str, detail: str) -> None:
        self.where = where
        self.detail = detail
        self.message = f"Integration failed in {where}: {detail}"
        super().__init__(self.message)


class PreconditionError(SpectralError):
    """Exception wanneer de invoer van een operatie niet aan de voorwaarden voldoet."""

    def __init__(self, what: str, detail: str) -> None:
        self.what = what
        self.detail = detail
        self.message = f"Precondition violated for {what}: {detail}"
        super().__init__(self.message)


class ResonantSetError(SpectralError):
    """Exception wanneer een set doel-energieën de niet-resonantievoorwaarde schendt."""

    def __init__(self, pairs: list[tuple[float, float, str]]) -> None:
        self.pairs = pairs
        listed = "; ".join(f"({a:.12g}, {b:.12g}): {why}" for a, b, why in pairs[:5])
        if len(pairs) > 5:
            listed += f" (and {len(pairs) - 5} more)"
        self.message = f"Resonant set: {listed}"
        super().__init__(self.message)


class ResonantPairError(ResonantSetError):
    """Exception voor een enkel resonant paar E, Ê met k(E) + k(Ê) = π."""

    def __init__(self, energy: float, other: float) -> None:
        super().__init__([(energy, other, "k sum equals pi")])
        self.energy = energy
        self.other = other
        self.message = f"Resonant pair: E={energy:.12g}, E_hat={other:.12g} (k + k_hat = pi)"
        self.args = (self.message,)


class ContractViolation(SpectralError):
    """Exception wanneer een gecontroleerde ongelijkheid niet geldt."""

    def __init__(
        self,
        inequality: str,
        anchor: str,
        lhs: float,
        rhs: float,
        location: float | None = None,
    ) -> None:
        self.inequality = inequality
        self.anchor = anchor
        self.lhs = lhs
        self.rhs = rhs
        self.location = location
        where = f" at {location:.12g}" if location is not None else ""
        self.message = (
            f"Contract violated [{anchor}]: {inequality}: lhs={lhs:.6g} > rhs={rhs:.6g}{where}"
        )
        super().__init__(self.message)


class EpochContractError(ContractViolation):
    """Exception wanneer het epoch-contract voor een eigenwaarde faalt."""

    def __init__(self, energy: float, epoch: int, lhs: float, rhs: float) -> None:
        super().__init__(
            inequality=f"epoch contract failed for E={energy:.12g} in epoch {epoch}",
            anchor="epoch.contract",
            lhs=lhs,
            rhs=rhs,
        )
        self.energy = energy
        self.epoch = epoch


class InfeasibleScheduleError(SpectralError):
    """Exception wanneer het schaalbeleid geen geldig schema kan opleveren."""

    def __init__(self, reason: str, epoch: int | None = None) -> None:
        self.reason = reason
        self.epoch = epoch
        at = f" (epoch {epoch})" if epoch is not None else ""
        self.message = f"Infeasible {reason}{at}"
        super().__init__(self.message)


__all__ = [
    "SpectralError",
    "NotInBandError",
    "DegenerateFloquetError",
    "UnresolvedEdgeError",
    "IntegrationError",
    "PreconditionError",
    "ResonantSetError",
    "ResonantPairError",
    "ContractViolation",
    "EpochContractError",
    "InfeasibleScheduleError",
]
