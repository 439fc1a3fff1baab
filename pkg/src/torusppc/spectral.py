"""Fourier coefficients of step laws and convergence of n-fold sums mod 1.

The n-fold law is computed on a circular grid of ``grid_size`` cells: the
step law is binned into cell masses, and the masses of the cell sums are the
n-th power of its discrete Fourier transform. Treating every intermediate
law as piecewise constant within cells, the CDF at grid points is the
running sum of the cell masses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .generators import (ConstantStep, StepDistribution, TabulatedStep,
                         TwoPointStep, UniformStep)

DEFAULT_GRID = 1 << 14
DEGENERATE_FLOOR = 1e-12


@dataclass(frozen=True)
class FourierCoefficient:
    r: int
    value: complex

    @property
    def modulus(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class ConvergenceProfile:
    n_values: tuple
    sup_devs: tuple
    fitted_omega: float
    fitted_C: float
    degenerate: bool = False


def _e(t):
    return np.exp(2j * np.pi * t)


def _coeff(step: StepDistribution, r: int) -> complex:
    if isinstance(step, UniformStep):
        a, b = step.a, step.b
        return complex((_e(r * b) - _e(r * a)) / (2j * np.pi * r * (b - a)))
    if isinstance(step, TwoPointStep):
        return complex(step.p * _e(r * step.atom1) + (1 - step.p) * _e(r * step.atom2))
    if isinstance(step, ConstantStep):
        return complex(_e(r * math.fmod(step.c, 1.0)))
    if isinstance(step, TabulatedStep):
        # exact integral of the piecewise-constant density, cell by cell
        g = np.asarray(step.grid)
        k = g.size
        edges = _e(r * np.arange(k + 1) / k)
        return complex(np.sum(g * np.diff(edges)) / (2j * np.pi * r))
    raise TypeError(f"no Fourier coefficients for {type(step).__name__}")


def fourier_coeff(step: StepDistribution, r: int) -> FourierCoefficient:
    """``E[exp(2 pi i r Y)]`` for ``r != 0``."""
    if int(r) != r or r == 0:
        raise ValueError("Fourier index r must be a non-zero integer")
    r = int(r)
    return FourierCoefficient(r, _coeff(step, r))


def sup_fourier(step: StepDistribution, r_max: int = 64) -> float:
    """Largest ``|c_r|`` over ``1 <= |r| <= r_max``.

    This truncates a supremum over all r. Built-in laws have coefficients
    that do not grow with |r|, but a coarse tabulated density may need a
    larger ``r_max``.
    """
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    return max(abs(_coeff(step, r)) for rr in range(1, r_max + 1) for r in (rr, -rr))


def _require_density(step: StepDistribution):
    if not step.has_density:
        raise ValueError(
            f"{type(step).__name__} has no Lebesgue density; the n-fold CDF "
            "convergence bound only applies to laws with a density")


def grid_masses(step: StepDistribution, grid_size: int = DEFAULT_GRID) -> np.ndarray:
    """Probability of each grid cell ``[k/G, (k+1)/G)`` under ``step``."""
    _require_density(step)
    if grid_size < 1 or grid_size & (grid_size - 1):
        raise ValueError("grid_size must be a power of two")
    edges = np.linspace(0.0, 1.0, grid_size + 1)
    masses = np.diff(step.cdf(edges))
    return masses / masses.sum()


def nfold_masses(step: StepDistribution, n: int, grid_size: int = DEFAULT_GRID) -> np.ndarray:
    """Cell masses of ``{Y_1 + ... + Y_n}`` on the circular grid."""
    if n < 1:
        raise ValueError("fold count n must be >= 1")
    base = grid_masses(step, grid_size)
    if n == 1:
        return base
    return np.fft.irfft(np.fft.rfft(base) ** n, n=grid_size)


def _cdf_deviation(masses: np.ndarray) -> float:
    g = masses.size
    cdf = np.cumsum(masses)
    grid = np.arange(1, g + 1) / g
    return float(np.max(np.abs(cdf - grid)))


def nfold_cdf_deviation(step: StepDistribution, n: int, grid_size: int = DEFAULT_GRID) -> float:
    """``max_k |G_n(k/G) - k/G|`` for the n-fold sum on a grid of G cells."""
    if grid_size < 256:
        raise ValueError("grid_size must be at least 256")
    return _cdf_deviation(nfold_masses(step, n, grid_size))


def cdf_deviation_profile(step: StepDistribution, n_values, grid_size: int = DEFAULT_GRID) -> list:
    """Deviations for several fold counts sharing one transform."""
    if grid_size < 256:
        raise ValueError("grid_size must be at least 256")
    spectrum = np.fft.rfft(grid_masses(step, grid_size))
    return [_cdf_deviation(np.fft.irfft(spectrum ** n, n=grid_size)) for n in n_values]


def schatte_rate_fit(step: StepDistribution, n_values, grid_size: int = DEFAULT_GRID) -> ConvergenceProfile:
    """Least-squares fit of ``log sup_dev = log C + n log omega``.

    Deviations below the floating-point floor make the fit meaningless;
    such profiles come back with ``degenerate=True`` and NaN estimates.
    """
    n_values = tuple(int(n) for n in n_values)
    if len(n_values) < 3 or any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("need at least 3 increasing fold counts")
    devs = tuple(cdf_deviation_profile(step, n_values, grid_size))
    if min(devs) < DEGENERATE_FLOOR:
        return ConvergenceProfile(n_values, devs, math.nan, math.nan, degenerate=True)
    slope, intercept = np.polyfit(np.array(n_values, dtype=float), np.log(devs), 1)
    return ConvergenceProfile(n_values, devs, float(math.exp(slope)), float(math.exp(intercept)))
