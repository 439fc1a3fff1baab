"""Seeded construction of dependent and deterministic torus sequences.

Randomness comes from numpy's Philox, a counter-based generator. The Philox
key is ``(master_seed, stream_index)`` and the third counter word selects a
sub-stream, so every draw is a pure function of
``(master_seed, stream_index, substream, draw_index)``. Nothing depends on
global state or on how many threads are running.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .torus import PointSet, frac, frac_array

_U64 = 1 << 64

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int = 0
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= int(v) < _U64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    def generator(self, substream: int = 0) -> np.random.Generator:
        """Independent numpy Generator for one sub-stream of this seed."""
        key = np.array([self.master_seed, self.stream_index], dtype=np.uint64)
        counter = np.array([0, 0, substream, 0], dtype=np.uint64)
        bitgen = np.random.Philox(key=key, counter=counter)
        return np.random.Generator(bitgen)


# -- step distributions -------------------------------------------------------

class StepDistribution:
    """Law of the i.i.d. increments of a random walk on the torus."""

    has_density = False

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def to_string(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class UniformStep(StepDistribution):
    a: float = 0.0
    b: float = 1.0
    has_density = True

    def __post_init__(self):
        if not 0.0 <= self.a < self.b <= 1.0:
            raise ValueError(f"uniform step needs 0 <= a < b <= 1, got ({self.a}, {self.b})")

    def sample(self, rng, size):
        return self.a + (self.b - self.a) * rng.random(size)

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)

    def to_string(self):
        return f"uniform:{self.a!r}:{self.b!r}"


@dataclass(frozen=True)
class TwoPointStep(StepDistribution):
    """Takes ``atom1`` with probability ``p`` and ``atom2`` otherwise."""

    atom1: float = 0.0
    atom2: float = 0.5
    p: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"probability p must be in [0, 1], got {self.p}")
        for atom in (self.atom1, self.atom2):
            if not 0.0 <= atom < 1.0:
                raise ValueError(f"atoms must lie in [0, 1), got {atom}")

    def sample(self, rng, size):
        return np.where(rng.random(size) < self.p, self.atom1, self.atom2)

    def to_string(self):
        return f"two_point:{self.atom1!r}:{self.atom2!r}:{self.p!r}"


@dataclass(frozen=True)
class ConstantStep(StepDistribution):
    c: float = GOLDEN

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise ValueError("constant step must be finite")

    def sample(self, rng, size):
        return np.full(size, float(self.c))

    def to_string(self):
        return f"constant:{self.c!r}"


@dataclass(frozen=True)
class TabulatedStep(StepDistribution):
    """Piecewise-constant density with value ``grid[j]`` on ``[j/K, (j+1)/K)``."""

    grid: tuple = field(default=(1.0,))
    has_density = True

    def __post_init__(self):
        g = tuple(float(v) for v in self.grid)
        if not g:
            raise ValueError("tabulated density needs at least one cell")
        if min(g) < 0.0:
            raise ValueError("tabulated density must be non-negative")
        if abs(math.fsum(g) / len(g) - 1.0) > 1e-9:
            raise ValueError("tabulated density must average to 1 over its cells")
        object.__setattr__(self, "grid", g)

    @property
    def cells(self) -> int:
        return len(self.grid)

    def _cum(self) -> np.ndarray:
        g = np.asarray(self.grid)
        cum = np.concatenate(([0.0], np.cumsum(g) / g.size))
        cum[-1] = 1.0
        return cum

    def sample(self, rng, size):
        g = np.asarray(self.grid)
        k = g.size
        cum = self._cum()
        u = rng.random(size)
        j = np.searchsorted(cum, u, side="right") - 1
        j = np.clip(j, 0, k - 1)
        # zero-density cells have zero width in u and are never selected
        within = (u - cum[j]) * k / g[j]
        return (j + np.clip(within, 0.0, 1.0)) / k

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
        g = np.asarray(self.grid)
        k = g.size
        j = np.minimum((x * k).astype(np.int64), k - 1)
        return self._cum()[j] + g[j] * (x - j / k)

    def to_string(self):
        return "tabulated:" + ",".join(repr(v) for v in self.grid)


def triangle_density(cells: int = 64) -> TabulatedStep:
    """Cell averages of the symmetric triangle density ``4 min(x, 1-x)``."""

    def antiderivative(x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(x <= 0.5, 2 * x * x, 1.0 - 2 * (1.0 - x) ** 2)

    edges = np.linspace(0.0, 1.0, cells + 1)
    grid = np.diff(antiderivative(edges)) * cells
    grid = grid / grid.mean()
    return TabulatedStep(tuple(grid.tolist()))


def parse_step(text: str) -> StepDistribution:
    """Parse ``uniform:a:b``, ``two_point:a1:a2:p``, ``constant:c``,
    ``tabulated:g1,g2,...`` or ``triangle[:cells]``."""
    kind, _, rest = text.strip().partition(":")
    args = rest.split(":") if rest else []
    try:
        if kind == "uniform":
            a, b = (float(v) for v in args) if args else (0.0, 1.0)
            return UniformStep(a, b)
        if kind == "two_point":
            if len(args) == 2:
                args.append("0.5")
            a1, a2, p = (float(v) for v in args)
            return TwoPointStep(a1, a2, p)
        if kind == "constant":
            (c,) = (float(v) for v in args)
            return ConstantStep(c)
        if kind == "tabulated":
            return TabulatedStep(tuple(float(v) for v in rest.split(",")))
        if kind == "triangle":
            return triangle_density(int(args[0]) if args else 64)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad step spec {text!r}: {exc}") from None
    raise ValueError(f"unknown step kind {kind!r} in {text!r}")


def sample_step(step: StepDistribution, rng: np.random.Generator) -> float:
    """One draw from ``step``, reduced to the torus."""
    return frac(float(step.sample(rng, 1)[0]))


# -- constructions ------------------------------------------------------------

def cell_index(x: np.ndarray, m: int) -> np.ndarray:
    """Index of the cell ``[k/m, (k+1)/m)`` holding each point."""
    return np.floor(np.asarray(x) * m).astype(np.int64)


def _place_in_cells(cells: np.ndarray, u: np.ndarray, m: int) -> np.ndarray:
    """``(cells + u) / m`` with rounding corrected so each point stays in its cell."""
    x = (cells + u) / m
    for _ in range(8):
        k = np.floor(x * m)
        hi, lo = k > cells, k < cells
        if not (hi.any() or lo.any()):
            break
        x[hi] = np.nextafter(x[hi], 0.0)
        x[lo] = np.nextafter(x[lo], 1.0)
    return x


def _shuffle_rows(u: np.ndarray) -> np.ndarray:
    """Fisher-Yates permutation of ``0..m-1`` per row, driven by uniforms ``u``.

    Uses a fixed number of draws per row so that batch ``b`` always reads the
    same slice of the counter stream.
    """
    rows, m = u.shape
    perm = np.tile(np.arange(m), (rows, 1))
    r = np.arange(rows)
    for i in range(m - 1, 0, -1):
        j = np.minimum((u[:, i] * (i + 1)).astype(np.int64), i)
        tmp = perm[r, i].copy()
        perm[r, i] = perm[r, j]
        perm[r, j] = tmp
    return perm


def _jittered_batches(rng: np.random.Generator, batches: int, m: int) -> np.ndarray:
    u = rng.random((batches, 2, m))
    cells = _shuffle_rows(u[:, 0, :])
    return _place_in_cells(cells, u[:, 1, :], m)


def _check_count(name, value, minimum=1):
    if int(value) != value or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def gen_iid_uniform(n: int, seed: SeedSpec) -> PointSet:
    n = _check_count("n", n)
    return PointSet(seed.generator().random(n))


def gen_jittered_single(M: int, seed: SeedSpec) -> PointSet:
    """One jittered sample: a uniform point in each of M cells, in random cell order."""
    M = _check_count("M", M)
    return PointSet(_jittered_batches(seed.generator(), 1, M)[0])


def gen_batch_jittered(M: int, n: int, seed: SeedSpec) -> PointSet:
    """Independent jittered samples of size M concatenated, truncated to n points.

    Batch b consumes the fixed slice ``[2Mb, 2M(b+1))`` of the seed's stream,
    which makes it a stream of its own in the counter-based sense.
    """
    M = _check_count("M", M)
    n = _check_count("n", n)
    batches = -(-n // M)
    return PointSet(_jittered_batches(seed.generator(), batches, M).reshape(-1)[:n])


def gen_sequential_jittered(n: int, seed: SeedSpec) -> PointSet:
    """Doubling construction: each new generation fills the void dyadic half-cells.

    Level 0 is a jittered sample of size 2; level k (k >= 1) turns 2**k points
    into 2**(k+1) and draws from sub-stream k, so shorter outputs are
    prefixes of longer ones.
    """
    n = _check_count("n", n, minimum=2)
    parts = [_jittered_batches(seed.generator(0), 1, 2)[0]]
    size, level = 2, 1
    while size < n:
        pts = np.concatenate(parts)
        width = 2 * size
        void = np.sort(cell_index(pts, width) ^ 1)
        rng = seed.generator(level)
        perm = rng.permutation(size)
        z = rng.random(size)
        parts.append(_place_in_cells(void[perm], z, width))
        size, level = width, level + 1
    return PointSet(np.concatenate(parts)[:n])


_WALK_BLOCK = 256


def gen_random_walk(n: int, x1: float, step: StepDistribution, seed: SeedSpec) -> PointSet:
    """``X_1 = x1`` and ``X_{k+1} = frac(X_k + Y_k)``.

    Partial sums are reduced mod 1 every 256 steps to keep rounding error
    near machine precision.
    """
    n = _check_count("n", n)
    if not 0.0 <= x1 < 1.0:
        raise ValueError("start point x1 must lie in [0, 1)")
    steps = np.asarray(step.sample(seed.generator(), n - 1), dtype=np.float64)
    out = np.empty(n)
    out[0] = x1
    if n == 1:
        return PointSet(out)
    pad = (-steps.size) % _WALK_BLOCK
    blocks = np.concatenate((steps, np.zeros(pad))).reshape(-1, _WALK_BLOCK)
    partial = np.cumsum(blocks, axis=1)
    carry = np.empty(blocks.shape[0])
    c = float(x1)
    for b in range(blocks.shape[0]):
        carry[b] = c
        c = frac(c + partial[b, -1])
    out[1:] = frac_array(carry[:, None] + partial).reshape(-1)[: n - 1]
    return PointSet(out)


def gen_kronecker(n: int, x1: float, c: float) -> PointSet:
    """Deterministic sequence ``frac(x1 + k c)``, k = 0..n-1."""
    n = _check_count("n", n)
    k = np.arange(n, dtype=np.float64)
    return PointSet(frac_array(x1 + k * c))


# -- recipes ------------------------------------------------------------------

KINDS = ("iid", "jittered", "batch", "sequential", "walk", "kronecker")


@dataclass(frozen=True)
class GeneratorSpec:
    """Self-describing recipe for one sequence family.

    ``M`` is the sample size for ``jittered`` (defaults to the requested n)
    and the batch size for ``batch``. ``step`` and ``x1`` drive ``walk``;
    ``c`` and ``x1`` drive ``kronecker``.
    """

    kind: str
    M: Optional[int] = None
    x1: float = 0.0
    step: Optional[StepDistribution] = None
    c: Optional[float] = None
    seed: SeedSpec = field(default_factory=SeedSpec)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "batch" and self.M is None:
            raise ValueError("batch generator needs M")
        if self.M is not None:
            _check_count("M", self.M)
        if self.kind == "walk" and self.step is None:
            raise ValueError("walk generator needs a step distribution")
        if self.kind == "kronecker" and self.c is None:
            raise ValueError("kronecker generator needs c")
        if not 0.0 <= self.x1 < 1.0:
            raise ValueError("x1 must lie in [0, 1)")

    @property
    def min_n(self) -> int:
        return 2 if self.kind == "sequential" else 1

    def with_seed(self, seed: SeedSpec) -> "GeneratorSpec":
        return replace(self, seed=seed)

    def generate(self, n: int) -> PointSet:
        kind = self.kind
        if kind == "iid":
            return gen_iid_uniform(n, self.seed)
        if kind == "jittered":
            M = n if self.M is None else self.M
            if n > M:
                raise ValueError(f"a jittered sample of size {M} has no {n} points")
            return gen_jittered_single(M, self.seed).prefix(n)
        if kind == "batch":
            return gen_batch_jittered(self.M, n, self.seed)
        if kind == "sequential":
            return gen_sequential_jittered(n, self.seed)
        if kind == "walk":
            return gen_random_walk(n, self.x1, self.step, self.seed)
        return gen_kronecker(n, self.x1, self.c)

    def to_dict(self) -> dict:
        d = {"generator": self.kind, "master_seed": self.seed.master_seed,
             "stream_index": self.seed.stream_index}
        if self.M is not None:
            d["M"] = self.M
        if self.kind in ("walk", "kronecker"):
            d["x1"] = self.x1
        if self.step is not None:
            d["step"] = self.step.to_string()
        if self.c is not None:
            d["c"] = self.c
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        known = {"generator", "master_seed", "stream_index", "M", "x1", "step", "c"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown generator keys: {sorted(extra)}")
        step = d.get("step")
        return cls(
            kind=d["generator"],
            M=None if d.get("M") is None else int(d["M"]),
            x1=float(d.get("x1", 0.0)),
            step=parse_step(step) if isinstance(step, str) else step,
            c=None if d.get("c") is None else float(d["c"]),
            seed=SeedSpec(int(d.get("master_seed", 0)), int(d.get("stream_index", 0))),
        )
