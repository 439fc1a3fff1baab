"""Extreme discrepancy of a finite point set in [0, 1).

``extreme_discrepancy`` uses the sorted-sample identity

    D_N = 1/N + max_i (i/N - x_(i)) - min_i (i/N - x_(i)),

and ``discrepancy_bruteforce`` searches all half-open intervals whose
endpoints sit at sample points, which is where the supremum lives.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .torus import PointSet

BRUTEFORCE_LIMIT = 4096


@dataclass(frozen=True)
class DiscrepancyResult:
    value: float
    n: int


def _sorted(points) -> np.ndarray:
    x = np.asarray(points.points if isinstance(points, PointSet) else points, dtype=np.float64)
    if x.size == 0:
        raise ValueError("discrepancy of an empty point set is undefined")
    return np.sort(x)


def extreme_discrepancy(points) -> DiscrepancyResult:
    x = _sorted(points)
    n = x.size
    t = np.arange(1, n + 1) / n - x
    return DiscrepancyResult(float(1.0 / n + t.max() - t.min()), n)


def discrepancy_bruteforce(points) -> DiscrepancyResult:
    """Direct search over the finite family of extremal intervals.

    Over-counting is maximised by the shortest interval holding a block of
    consecutive sample points, ``[x_i, x_j]``; under-counting by the longest
    interval avoiding one, ``(x_i, x_j)`` with 0 and 1 as extra endpoints.
    """
    x = _sorted(points)
    n = x.size
    if n > BRUTEFORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTEFORCE_LIMIT} points, got {n}")
    first = np.searchsorted(x, x, side="left")
    last = np.searchsorted(x, x, side="right")

    # [x_i, x_j] for x_i <= x_j
    length = x[None, :] - x[:, None]
    inside = last[None, :] - first[:, None]
    over = np.where(length >= 0, inside / n - length, -np.inf).max()

    # (a, b) with a in {0} u {x_i} (open) and b in {x_j} u {1} (open)
    a = np.concatenate(([0.0], x))
    a_count = np.concatenate(([0], last))       # points <= a are excluded
    b = np.concatenate((x, [1.0]))
    b_count = np.concatenate((first, [n]))      # points < b are candidates
    length = b[None, :] - a[:, None]
    # the a = 0 row is the closed interval [0, b), so points at 0 are inside
    inside = b_count[None, :] - a_count[:, None]
    under = np.where(length > 0, length - inside / n, -np.inf).max()
    return DiscrepancyResult(float(max(over, under)), n)
