"""Pair-correlation statistics on the torus.

Pairs are ordered: (i, j) and (j, i) both count, and the comparison with the
radius is closed. ``pair_count_fast`` sorts once and evaluates, for each
point, the contiguous window of later points that are close directly or
across the wrap. Window boundaries are located by binary search and then
corrected against the exact floating-point predicate used by
``pair_count_naive``, so the two counters agree to the integer.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .torus import PointSet, wrapped_gap


@dataclass(frozen=True)
class PairCorrParams:
    s: float
    alpha: float = 1.0

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError(f"s must be positive, got {self.s}")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")

    def radius(self, n: int) -> float:
        return self.s / n ** self.alpha


@dataclass(frozen=True)
class PairCorrResult:
    pair_count: int
    value: float
    n: int
    params: PairCorrParams


def _as_array(points) -> np.ndarray:
    return np.asarray(points.points if isinstance(points, PointSet) else points, dtype=np.float64)


def _check_radius(radius: float):
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")


def pair_count_naive(points, radius: float) -> int:
    """Literal O(N^2) count of ordered pairs i != j at torus distance <= radius."""
    _check_radius(radius)
    x = _as_array(points)
    n = x.size
    if radius >= 0.5:
        return n * (n - 1)
    total = 0
    for start in range(0, n, 1024):
        block = x[start:start + 1024]
        close = wrapped_gap(np.abs(block[:, None] - x[None, :])) <= radius
        total += int(close.sum())
    # the diagonal has distance 0
    return total - n


def _windows(xs: np.ndarray, radius: float):
    """For sorted ``xs`` return (p, q): for each i, later points ``i+1..p[i]``
    are within ``radius`` directly and ``q[i]..N-1`` across the wrap."""
    n = xs.size
    idx = np.arange(n)

    def direct(i, j):
        return (xs[j] - xs[i]) <= radius

    def wrapped(i, j):
        return (1.0 - (xs[j] - xs[i])) <= radius

    p = np.searchsorted(xs, xs + radius, side="right") - 1
    p = np.clip(p, idx, n - 1)
    while True:
        back = (p > idx) & ~direct(idx, p)
        if not back.any():
            break
        p[back] -= 1
    while True:
        nxt = np.minimum(p + 1, n - 1)
        fwd = (p + 1 < n) & direct(idx, nxt)
        if not fwd.any():
            break
        p[fwd] += 1

    q = np.searchsorted(xs, xs + (1.0 - radius), side="left")
    q = np.clip(q, p + 1, n)
    while True:
        prev = np.maximum(q - 1, 0)
        back = (q - 1 > p) & wrapped(idx, prev)
        if not back.any():
            break
        q[back] -= 1
    while True:
        cur = np.minimum(q, n - 1)
        fwd = (q < n) & ~wrapped(idx, cur)
        if not fwd.any():
            break
        q[fwd] += 1
    return p, q


def pair_count_fast(points, radius: float) -> int:
    """Same count as ``pair_count_naive`` in O(N log N)."""
    _check_radius(radius)
    xs = np.sort(_as_array(points))
    return _count_sorted(xs, radius)


def _count_sorted(xs: np.ndarray, radius: float) -> int:
    n = xs.size
    if radius >= 0.5:
        return n * (n - 1)
    if n < 2:
        return 0
    p, q = _windows(xs, radius)
    idx = np.arange(n)
    unordered = int((p - idx).sum() + (n - q).sum())
    return 2 * unordered


def pair_counts(points, radii: Sequence[float]) -> list[int]:
    """Fast counts for several radii with a single sort."""
    for r in radii:
        _check_radius(r)
    xs = np.sort(_as_array(points))
    return [_count_sorted(xs, r) for r in radii]


def r_statistic(points, params: PairCorrParams) -> PairCorrResult:
    """``pair_count(s / N**alpha) / N**(2 - alpha)``."""
    x = _as_array(points)
    n = x.size
    if n < 2:
        raise ValueError("the pair statistic needs at least 2 points")
    count = pair_count_fast(x, params.radius(n))
    return PairCorrResult(count, count / n ** (2 - params.alpha), n, params)


def neighbor_counts(points, params: PairCorrParams) -> np.ndarray:
    """Neighbour count of every point, in the original order of ``points``."""
    x = _as_array(points)
    n = x.size
    radius = params.radius(n)
    if radius >= 0.5:
        return np.full(n, n - 1, dtype=np.int64)
    order = np.argsort(x, kind="stable")
    xs = x[order]
    p, q = _windows(xs, radius)
    idx = np.arange(n)
    later = (p - idx) + (n - q)
    # point k is in the window of every earlier j with j < k <= p[j] or q[j] <= k
    diff = np.zeros(n + 1, dtype=np.int64)
    np.add.at(diff, idx + 1, 1)
    np.add.at(diff, p + 1, -1)
    np.add.at(diff, q, 1)
    earlier = np.cumsum(diff)[:n]
    out = np.empty(n, dtype=np.int64)
    out[order] = later + earlier
    return out


def neighbor_count(points, i: int, params: PairCorrParams) -> int:
    """Number of other points within ``s / N**alpha`` of point ``i`` (0-based)."""
    x = _as_array(points)
    n = x.size
    if not 0 <= i < n:
        raise IndexError(f"index {i} out of range for {n} points")
    radius = params.radius(n)
    close = wrapped_gap(np.abs(x - x[i])) <= radius
    return int(close.sum()) - 1


@dataclass(frozen=True)
class GapHistogram:
    counts: np.ndarray
    edges: np.ndarray
    gaps: np.ndarray  # unscaled, in sorted order, wrap gap last

    @property
    def density(self) -> np.ndarray:
        return self.counts / self.counts.sum()


def gap_histogram(points, bins: int, max_scaled_gap: float | None = None) -> GapHistogram:
    """Histogram of nearest-neighbour gaps scaled by N.

    Bins are equal-width on ``[0, max_scaled_gap]``; larger gaps are put in
    the last bin. Without ``max_scaled_gap`` the largest observed scaled gap
    sets the range.
    """
    x = np.sort(_as_array(points))
    n = x.size
    if n < 2:
        raise ValueError("gap histogram needs at least 2 points")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    gaps = np.diff(np.concatenate((x, [x[0] + 1.0])))
    scaled = gaps * n
    top = float(scaled.max()) if max_scaled_gap is None else float(max_scaled_gap)
    if top <= 0:
        top = 1.0
    edges = np.linspace(0.0, top, bins + 1)
    counts, _ = np.histogram(np.minimum(scaled, top), bins=edges)
    return GapHistogram(counts, edges, gaps)
