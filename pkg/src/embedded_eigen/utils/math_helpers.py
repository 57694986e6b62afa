"""Mathematische hulpfuncties: afsnijfuncties, trigonometrische interpolatie en fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import stats

_EVAL_CHUNK = 65536


# =============================================================================
# Smooth cutoff
# =============================================================================


def _flat(t: NDArray[np.float64]) -> NDArray[np.float64]:
    """exp(-1/t) voor t > 0, anders 0; alle afgeleiden verdwijnen in t = 0."""
    safe = np.where(t > 0.0, t, 1.0)
    return np.where(t > 0.0, np.exp(-1.0 / safe), 0.0)


def smooth_step(t: ArrayLike) -> NDArray[np.float64]:
    """Gladde overgang van 0 (t <= 0) naar 1 (t >= 1)."""
    arr = np.asarray(t, dtype=float)
    left = _flat(arr)
    right = _flat(1.0 - arr)
    return left / (left + right)


def smooth_step_scalar(t: float) -> float:
    """Scalaire variant van ``smooth_step`` voor gebruik in ODE-rechterleden."""
    if t <= 0.0:
        return 0.0
    if t >= 1.0:
        return 1.0
    left = math.exp(-1.0 / t)
    right = math.exp(-1.0 / (1.0 - t))
    return left / (left + right)


def bump_cutoff(x: ArrayLike, x0: float, x1: float, width: float) -> NDArray[np.float64]:
    """Afsnijfunctie die 1 is op [x0+width, x1-width] en buiten (x0, x1) verdwijnt.

    Parameters
    ----------
    x:
        Evaluatiepunten.
    x0, x1:
        Uiteinden van de drager.
    width:
        Breedte van de overgangszone aan beide kanten.
    """
    arr = np.asarray(x, dtype=float)
    return smooth_step((arr - x0) / width) * smooth_step((x1 - arr) / width)


# =============================================================================
# Trigonometric interpolation
# =============================================================================


@dataclass(frozen=True, slots=True)
class TrigInterpolant:
    """1-periodieke functie opgeslagen als afgeknotte Fourierreeks.

    Attributes
    ----------
    modes:
        Integer frequenties m van de bewaarde termen.
    coefficients:
        Complexe coefficienten c_m zodat f(x) = sum c_m exp(2 pi i m x).
    real:
        True als de gesamplede data reeel was; evaluatie geeft dan reele waarden.
    """

    modes: NDArray[np.float64]
    coefficients: NDArray[np.complex128]
    real: bool

    @classmethod
    def from_samples(cls, samples: ArrayLike, rel_cutoff: float = 1e-15) -> TrigInterpolant:
        """Bouw een interpolant uit equidistante samples op [0, 1) (eindpunt 1 exclusief)."""
        values = np.asarray(samples)
        n = values.shape[0]
        coeffs = np.fft.fft(values) / n
        freqs = np.fft.fftfreq(n, d=1.0 / n)
        keep = np.abs(coeffs) > rel_cutoff * max(float(np.max(np.abs(coeffs))), 1e-300)
        if n % 2 == 0:
            keep[n // 2] = False
        keep[0] = True
        return cls(
            modes=freqs[keep].astype(float),
            coefficients=coeffs[keep].astype(complex),
            real=not np.iscomplexobj(values),
        )

    @property
    def is_constant(self) -> bool:
        return self.modes.shape[0] == 1

    @property
    def mean(self) -> complex:
        return complex(self.coefficients[self.modes == 0.0][0])

    def _sum(self, x: ArrayLike, weights: NDArray[np.complex128]) -> NDArray[np.generic]:
        shape = np.shape(x)
        reduced = np.mod(np.asarray(x, dtype=float), 1.0).ravel()
        out = np.empty(reduced.shape[0], dtype=complex)
        for start in range(0, reduced.shape[0], _EVAL_CHUNK):
            chunk = reduced[start : start + _EVAL_CHUNK]
            phase = np.exp(2j * np.pi * np.multiply.outer(chunk, self.modes))
            out[start : start + _EVAL_CHUNK] = phase @ weights
        out = out.reshape(shape)
        return out.real if self.real else out

    def __call__(self, x: ArrayLike) -> NDArray[np.generic]:
        if self.is_constant:
            value = self.mean.real if self.real else self.mean
            return np.full(np.shape(x), value)
        return self._sum(x, self.coefficients)

    def derivative(self, x: ArrayLike) -> NDArray[np.generic]:
        """Spectrale afgeleide f'(x)."""
        if self.is_constant:
            return np.zeros(np.shape(x), dtype=float if self.real else complex)
        return self._sum(x, 2j * np.pi * self.modes * self.coefficients)


# =============================================================================
# Fits en classificatie
# =============================================================================


def fit_slope(x: ArrayLike, y: ArrayLike) -> float:
    """Kleinste-kwadraten helling van y tegen x."""
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape[0] < 2 or np.ptp(xs) == 0.0:
        return 0.0
    return float(stats.linregress(xs, ys).slope)


def rational_approximation(
    value: float, max_denominator: int = 10**6, tol: float = 1e-13
) -> Fraction | None:
    """Beste rationale benadering via kettingbreuken, of None als de fout groter is dan tol."""
    frac = Fraction(value).limit_denominator(max_denominator)
    if abs(float(frac) - value) <= tol:
        return frac
    return None


def running_sup(values: ArrayLike) -> NDArray[np.float64]:
    """Lopend supremum van |values|."""
    return np.maximum.accumulate(np.abs(np.asarray(values, dtype=float)))


__all__ = [
    "smooth_step",
    "smooth_step_scalar",
    "bump_cutoff",
    "TrigInterpolant",
    "fit_slope",
    "rational_approximation",
    "running_sup",
]
