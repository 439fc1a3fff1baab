"""Arithmetic on the unit torus [0, 1) and the point-set container.

Points are plain doubles. ``PointSet`` wraps a read-only float64 array in
generation order so that prefixes of a set are prefixes of the sequence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np


def frac(x: float) -> float:
    """Fractional part ``x - floor(x)``, always in [0, 1)."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"frac needs a finite number, got {x!r}")
    y = x - math.floor(x)
    # -1e-20 - floor(-1e-20) rounds to exactly 1.0
    return 0.0 if y >= 1.0 else y


def frac_array(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("frac needs finite values")
    y = x - np.floor(x)
    y[y >= 1.0] = 0.0
    return y


def wrapped_gap(d):
    """Torus distance for a raw difference ``d = |x - y|`` with d in [0, 1).

    Shared by the scalar distance and both pair counters so that every code
    path evaluates the identical floating-point predicate.
    """
    return np.minimum(d, 1.0 - d)


def torus_dist(x: float, y: float) -> float:
    """Distance between two torus points: ``min(|x-y|, 1-|x-y|)``."""
    d = abs(float(x) - float(y))
    d -= math.floor(d)
    return float(min(d, 1.0 - d))


def box_count(x: float, n: int, d: float) -> int:
    """Number of dyadic grid points ``j / 2**n`` inside the open arc (x-d, x+d).

    The arc is read modulo 1. Grid points at distance exactly ``d`` are not
    counted. Evaluated in exact rational arithmetic.
    """
    if d <= 0:
        raise ValueError("radius d must be positive")
    if n < 0:
        raise ValueError("dyadic level n must be >= 0")
    size = 1 << n
    if 2 * d >= 1:
        return size
    x, d = Fraction(float(x)), Fraction(float(d))
    lo, hi = (x - d) * size, (x + d) * size
    # integers strictly inside (lo, hi); the arc is shorter than one turn
    return math.ceil(hi) - math.floor(lo) - 1


@dataclass(frozen=True, eq=False)
class PointSet:
    """An ordered finite sample of torus points."""

    points: np.ndarray

    def __post_init__(self):
        arr = np.array(self.points, dtype=np.float64, copy=True).reshape(-1)
        if arr.size and (np.any(arr < 0.0) or np.any(arr >= 1.0) or not np.all(np.isfinite(arr))):
            raise ValueError("PointSet values must lie in [0, 1)")
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    @classmethod
    def wrap(cls, values: Iterable[float]) -> "PointSet":
        """Build a set from arbitrary reals by reducing them mod 1."""
        return cls(frac_array(np.fromiter(values, dtype=np.float64)))

    def __len__(self) -> int:
        return int(self.points.size)

    def __iter__(self) -> Iterator[float]:
        return iter(self.points.tolist())

    def __getitem__(self, item):
        if isinstance(item, slice):
            return PointSet(self.points[item])
        return float(self.points[item])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return np.array_equal(self.points, other.points)

    def __array__(self, dtype=None, copy=None):
        return self.points if dtype is None else self.points.astype(dtype)

    def prefix(self, m: int) -> "PointSet":
        return PointSet(self.points[:m])

    def __repr__(self) -> str:
        return f"PointSet(n={len(self)})"
