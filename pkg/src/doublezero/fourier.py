"""Real trigonometric polynomials on the circle.

Forcing profiles and Melnikov profiles are 2*pi-periodic functions carried
around as finite Fourier series.  This module provides the small immutable
container used for them, plus helpers to build one from samples and to locate
its extrema (dense sampling followed by golden-section refinement).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError

__all__ = ["TrigPolynomial", "cosine", "sine", "golden_section_max"]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _clean(coeffs: Mapping[int, float], what: str) -> tuple[tuple[int, float], ...]:
    out: dict[int, float] = {}
    for j, v in coeffs.items():
        j = int(j)
        v = float(v)
        if j < 0:
            raise DomainError(f"{what} harmonic index must be >= 0, got {j}")
        if v != 0.0:
            out[j] = out.get(j, 0.0) + v
    return tuple(sorted(out.items()))


@dataclass(frozen=True, init=False)
class TrigPolynomial:
    """Finite real Fourier series  a0 + sum_j (a_j cos(j*phi) + b_j sin(j*phi)).

    Parameters
    ----------
    cos_terms, sin_terms
        Mappings ``harmonic -> coefficient``.  Harmonic 0 is only meaningful
        for ``cos_terms`` (the mean); a ``sin`` term at harmonic 0 is ignored
        because sin(0) = 0.
    """

    cos_terms: tuple[tuple[int, float], ...] = ()
    sin_terms: tuple[tuple[int, float], ...] = ()

    def __init__(
        self,
        cos_terms: Mapping[int, float] | Iterable[tuple[int, float]] = (),
        sin_terms: Mapping[int, float] | Iterable[tuple[int, float]] = (),
    ) -> None:
        cos_map = dict(cos_terms)
        sin_map = dict(sin_terms)
        sin_map.pop(0, None)
        object.__setattr__(self, "cos_terms", _clean(cos_map, "cos"))
        object.__setattr__(self, "sin_terms", _clean(sin_map, "sin"))

    # -- basic queries ----------------------------------------------------
    @property
    def mean(self) -> float:
        """Average over one period (the constant Fourier term)."""
        return dict(self.cos_terms).get(0, 0.0)

    @property
    def max_harmonic(self) -> int:
        idx = [j for j, _ in self.cos_terms] + [j for j, _ in self.sin_terms]
        return max(idx) if idx else 0

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for _, v in self.cos_terms) and all(
            abs(v) <= tol for _, v in self.sin_terms
        )

    def coefficient_norm(self) -> float:
        """Sum of absolute coefficient values (an upper bound for |f|)."""
        return sum(abs(v) for _, v in self.cos_terms) + sum(
            abs(v) for _, v in self.sin_terms
        )

    # -- evaluation -------------------------------------------------------
    def __call__(self, phi):
        """Evaluate at ``phi`` (scalar or ndarray)."""
        arr = np.asarray(phi, dtype=float)
        out = np.zeros_like(arr)
        for j, v in self.cos_terms:
            out = out + v * np.cos(j * arr)
        for j, v in self.sin_terms:
            out = out + v * np.sin(j * arr)
        if np.isscalar(phi) or arr.ndim == 0:
            return float(out)
        return out

    def derivative(self) -> "TrigPolynomial":
        cos = {j: j * v for j, v in self.sin_terms}
        sin = {j: -j * v for j, v in self.cos_terms if j > 0}
        return TrigPolynomial(cos, sin)

    # -- algebra ----------------------------------------------------------
    def scaled(self, factor: float) -> "TrigPolynomial":
        return TrigPolynomial(
            {j: factor * v for j, v in self.cos_terms},
            {j: factor * v for j, v in self.sin_terms},
        )

    def __neg__(self) -> "TrigPolynomial":
        return self.scaled(-1.0)

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        cos = dict(self.cos_terms)
        for j, v in other.cos_terms:
            cos[j] = cos.get(j, 0.0) + v
        sin = dict(self.sin_terms)
        for j, v in other.sin_terms:
            sin[j] = sin.get(j, 0.0) + v
        return TrigPolynomial(cos, sin)

    # -- extrema ----------------------------------------------------------
    def extrema(self, samples: int = 4096) -> tuple[float, float]:
        """Global (max, min) over one period.

        Dense uniform sampling brackets each candidate, then golden-section
        search refines it; adequate because the function is a smooth
        trigonometric polynomial.
        """
        if self.is_zero():
            return (0.0, 0.0)
        grid = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
        vals = self(grid)
        step = 2.0 * math.pi / samples
        i_max = int(np.argmax(vals))
        i_min = int(np.argmin(vals))
        hi = golden_section_max(self, grid[i_max] - step, grid[i_max] + step)
        lo = -golden_section_max(
            lambda p: -self(p), grid[i_min] - step, grid[i_min] + step
        )
        return (max(hi, float(vals[i_max])), min(lo, float(vals[i_min])))

    # -- construction helpers ----------------------------------------------
    @staticmethod
    def from_samples(values: np.ndarray, n_harmonics: int = 64) -> "TrigPolynomial":
        """Least-squares Fourier fit of uniform samples over one period.

        ``values[i]`` is the function at ``phi = 2*pi*i/len(values)``.  The
        series is truncated to ``n_harmonics`` harmonics.
        """
        values = np.asarray(values, dtype=float)
        n = values.size
        if n < 2:
            raise DomainError("need at least two samples per period")
        spec = np.fft.rfft(values) / n
        n_keep = min(n_harmonics, spec.size - 1)
        cos = {0: float(spec[0].real)}
        sin: dict[int, float] = {}
        for j in range(1, n_keep + 1):
            cos[j] = 2.0 * float(spec[j].real)
            sin[j] = -2.0 * float(spec[j].imag)
        return TrigPolynomial(cos, sin)


def cosine(amplitude: float, harmonic: int = 1) -> TrigPolynomial:
    """The profile ``amplitude * cos(harmonic * phi)``."""
    return TrigPolynomial({harmonic: amplitude}, {})


def sine(amplitude: float, harmonic: int = 1) -> TrigPolynomial:
    """The profile ``amplitude * sin(harmonic * phi)``."""
    return TrigPolynomial({}, {harmonic: amplitude})


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-13) -> float:
    """Maximum value of a unimodal scalar function on [lo, hi]."""
    a, b = float(lo), float(hi)
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = float(f(x1)), float(f(x2))
    while (b - a) > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = float(f(x2))
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = float(f(x1))
    xm = 0.5 * (a + b)
    return float(f(xm))
