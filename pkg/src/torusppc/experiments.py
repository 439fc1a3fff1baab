"""Seeded Monte Carlo estimation of pair-correlation moments.

Replicate ``i`` of every experiment uses ``SeedSpec(master_seed, i)``. A
replicate generates the longest sequence once and evaluates every
``(n, s, alpha)`` cell on its prefixes. Replicates may run on a thread pool
(``PPC_THREADS``); aggregation always happens in replicate order, so results
do not depend on the worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .generators import (GOLDEN, GeneratorSpec, SeedSpec,
                         TwoPointStep, UniformStep, cell_index,
                         gen_sequential_jittered, triangle_density)
from .paircorr import pair_counts
from .torus import wrapped_gap

SCHEMA_VERSION = "1"

_CONFIG_KEYS = {"schema_version", "s_values", "alpha_values", "n_values",
                "replicates", "master_seed", "first_replicate", "label"}


def thread_count(default: int = 1) -> int:
    raw = os.environ.get("PPC_THREADS")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"PPC_THREADS must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    generator: GeneratorSpec
    s_values: tuple
    alpha_values: tuple = (1.0,)
    n_values: tuple = (1024,)
    replicates: int = 100
    master_seed: int = 0
    first_replicate: int = 0
    label: str = ""

    def __post_init__(self):
        for name in ("s_values", "alpha_values", "n_values"):
            vals = tuple(getattr(self, name))
            if not vals:
                raise ValueError(f"{name} must not be empty")
            object.__setattr__(self, name, vals)
        object.__setattr__(self, "s_values", tuple(float(s) for s in self.s_values))
        object.__setattr__(self, "alpha_values", tuple(float(a) for a in self.alpha_values))
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if any(s <= 0 for s in self.s_values):
            raise ValueError("s values must be positive")
        if any(not 0 < a <= 1 for a in self.alpha_values):
            raise ValueError("alpha values must lie in (0, 1]")
        if any(n < 2 for n in self.n_values):
            raise ValueError("every n must be at least 2")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        SeedSpec(self.master_seed, self.first_replicate)  # range check
        # replicates reseed the generator, so its own seed is normalised away
        object.__setattr__(self, "generator", self.generator.with_seed(SeedSpec(self.master_seed, 0)))

    def to_dict(self) -> dict:
        d = {k: v for k, v in self.generator.to_dict().items()
             if k not in ("master_seed", "stream_index")}
        d.update(schema_version=SCHEMA_VERSION, s_values=list(self.s_values),
                 alpha_values=list(self.alpha_values), n_values=list(self.n_values),
                 replicates=self.replicates, master_seed=self.master_seed,
                 first_replicate=self.first_replicate, label=self.label)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        version = str(d.get("schema_version", SCHEMA_VERSION))
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {version!r}")
        missing = {"generator", "s_values"} - set(d)
        if missing:
            raise ValueError(f"config is missing {sorted(missing)}")
        gen = {k: v for k, v in d.items() if k not in _CONFIG_KEYS}
        master = int(d.get("master_seed", 0))
        gen["master_seed"] = master
        return cls(
            generator=GeneratorSpec.from_dict(gen),
            s_values=tuple(d["s_values"]),
            alpha_values=tuple(d.get("alpha_values", (1.0,))),
            n_values=tuple(d.get("n_values", (1024,))),
            replicates=int(d.get("replicates", 100)),
            master_seed=master,
            first_replicate=int(d.get("first_replicate", 0)),
            label=str(d.get("label", "")),
        )


@dataclass(frozen=True)
class CellRecord:
    generator: str
    s: float
    alpha: float
    n: int
    replicates: int
    mean_R: float
    var_R: float
    stderr: float
    min_R: float
    max_R: float
    master_seed: int
    values: tuple = field(repr=False, default=())

    @classmethod
    def from_values(cls, generator, s, alpha, n, master_seed, values) -> "CellRecord":
        v = np.asarray(values, dtype=np.float64)
        var = float(v.var(ddof=1)) if v.size > 1 else 0.0
        return cls(generator, s, alpha, n, int(v.size), float(v.mean()), var,
                   math.sqrt(var / v.size), float(v.min()), float(v.max()),
                   master_seed, tuple(v.tolist()))

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["values"] = list(self.values)
        return d


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    records: tuple

    def cell(self, s: float, alpha: float = 1.0, n: Optional[int] = None) -> CellRecord:
        for rec in self.records:
            if rec.s == s and rec.alpha == alpha and (n is None or rec.n == n):
                return rec
        raise KeyError((s, alpha, n))

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "config": self.config.to_dict(),
                "records": [r.to_dict() for r in self.records]}


def _cells(cfg: ExperimentConfig):
    return [(n, s, a) for n in cfg.n_values for s in cfg.s_values for a in cfg.alpha_values]


def _replicate(cfg: ExperimentConfig, index: int) -> list:
    gen = cfg.generator.with_seed(SeedSpec(cfg.master_seed, index))
    pts = np.asarray(gen.generate(max(cfg.n_values)))
    out = []
    for n in cfg.n_values:
        combos = [(s, a) for s in cfg.s_values for a in cfg.alpha_values]
        counts = pair_counts(pts[:n], [s / n ** a for s, a in combos])
        out.extend(c / n ** (2 - a) for c, (s, a) in zip(counts, combos))
    return out


def estimate_moments(cfg: ExperimentConfig, workers: Optional[int] = None) -> ExperimentResult:
    """Mean, variance and spread of R over replicates for every (n, s, alpha) cell."""
    workers = thread_count() if workers is None else workers
    indices = range(cfg.first_replicate, cfg.first_replicate + cfg.replicates)
    task = lambda i: _replicate(cfg, i)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(task, indices))
    else:
        rows = [task(i) for i in indices]
    table = np.array(rows, dtype=np.float64).reshape(cfg.replicates, -1)
    name = cfg.label or cfg.generator.kind
    records = tuple(
        CellRecord.from_values(name, s, a, n, cfg.master_seed, table[:, k])
        for k, (n, s, a) in enumerate(_cells(cfg)))
    return ExperimentResult(cfg, records)


def pool_results(parts) -> ExperimentResult:
    """Concatenate replicate blocks of one experiment, in the given order."""
    parts = list(parts)
    first = parts[0]
    records = []
    for k, rec in enumerate(first.records):
        values = [v for part in parts for v in part.records[k].values]
        records.append(CellRecord.from_values(rec.generator, rec.s, rec.alpha, rec.n,
                                              rec.master_seed, values))
    cfg = replace(first.config, replicates=sum(p.config.replicates for p in parts))
    return ExperimentResult(cfg, tuple(records))


@dataclass(frozen=True)
class VarianceDecay:
    n_values: tuple
    variances: tuple
    slope: float
    intercept: float

    @property
    def points(self) -> list:
        return list(zip(self.n_values, self.variances))


def fit_loglog(n_values, variances) -> tuple[float, float]:
    slope, intercept = np.polyfit(np.log(n_values), np.log(variances), 1)
    return float(slope), float(intercept)


def variance_decay_scan(cfg: ExperimentConfig, s: Optional[float] = None,
                        alpha: Optional[float] = None, workers: Optional[int] = None) -> VarianceDecay:
    """Var(R) against n with its fitted log-log slope (one (s, alpha) cell)."""
    ns = cfg.n_values
    if len(ns) < 3 or any(b < 2 * a for a, b in zip(ns, ns[1:])):
        raise ValueError("need at least 3 n values, each at least twice the previous")
    s = cfg.s_values[0] if s is None else s
    alpha = cfg.alpha_values[0] if alpha is None else alpha
    result = estimate_moments(cfg, workers)
    variances = tuple(result.cell(s, alpha, n).var_R for n in ns)
    slope, intercept = fit_loglog(ns, variances)
    return VarianceDecay(ns, variances, slope, intercept)


def adjacent_pair_probability(n: int, replicates: int, master_seed: int = 0,
                              radius: Optional[float] = None) -> float:
    """Frequency of cyclically adjacent dyadic cells whose points are within ``1/(2n)``.

    Uses sequential jittered samples of size ``n = 2**k``; every cell of
    width ``1/n`` then holds exactly one point.
    """
    if n < 4 or n & (n - 1):
        raise ValueError("n must be a power of two >= 4")
    radius = 1.0 / (2 * n) if radius is None else radius
    hits = 0
    for i in range(replicates):
        pts = np.asarray(gen_sequential_jittered(n, SeedSpec(master_seed, i)))
        by_cell = np.empty(n)
        by_cell[cell_index(pts, n)] = pts
        gaps = wrapped_gap(np.abs(np.roll(by_cell, -1) - by_cell))
        hits += int(np.count_nonzero(gaps <= radius))
    return hits / (n * replicates)


# -- presets ------------------------------------------------------------------

@dataclass(frozen=True)
class BandCheck:
    label: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class Preset:
    id: str
    configs: tuple
    check: Callable = field(repr=False, compare=False)
    description: str = ""


def _band_2s(rel: float, use_se: bool = True):
    def check(results):
        out = []
        for res in results:
            for rec in res.records:
                if rec.n != max(res.config.n_values):
                    continue
                target = 2 * rec.s
                tol = max(3 * rec.stderr if use_se else 0.0, rel * target)
                err = abs(rec.mean_R - target)
                out.append(BandCheck(
                    f"{rec.generator} s={rec.s:g} alpha={rec.alpha:g} n={rec.n}",
                    err <= tol,
                    f"mean_R={rec.mean_R:.5f} target={target:g} |err|={err:.5f} tol={tol:.5f}"))
        return out
    return check


def _check_seq_not_ppc(results):
    out = []
    for rec in results[0].records:
        in_band = 0.22 <= rec.mean_R <= 0.28
        separated = abs(rec.mean_R - 2 * rec.s) >= 10 * rec.stderr
        out.append(BandCheck(
            f"sequential s={rec.s:g} n={rec.n}", in_band and separated,
            f"mean_R={rec.mean_R:.5f} band=[0.22,0.28] "
            f"|mean-2s|/stderr={abs(rec.mean_R - 2 * rec.s) / max(rec.stderr, 1e-300):.1f}"))
    return out


def _check_two_point(results):
    rec = results[0].records[0]
    return [BandCheck(f"two-point walk n={rec.n}", rec.min_R > 100,
                      f"min_R={rec.min_R:.1f} over {rec.replicates} seeds (need > 100)")]


def _check_kronecker(results):
    res = results[0]
    nmax = max(res.config.n_values)
    weak = res.cell(1.0, 0.5, nmax)
    scan = [res.cell(1.0, 1.0, n).mean_R for n in res.config.n_values]
    outside = [r for r in scan if not 1.8 <= r <= 2.2]
    return [
        BandCheck(f"kronecker alpha=0.5 n={nmax}", abs(weak.mean_R - 2) <= 0.1,
                  f"R={weak.mean_R:.5f} (need |R-2| <= 0.1)"),
        BandCheck("kronecker alpha=1 scan", bool(outside),
                  f"{len(outside)} of {len(scan)} values outside [1.8, 2.2]"),
    ]


def _batch_configs():
    return tuple(
        ExperimentConfig(GeneratorSpec("batch", M=m), s_values=(0.5, 1.0, 2.0),
                         n_values=(1 << 14,), replicates=100, master_seed=101,
                         label=f"batch M={m}")
        for m in (2, 8, 32))


def _walk_configs():
    steps = [("uniform(0,1)", UniformStep(0.0, 1.0)), ("uniform(0,0.5)", UniformStep(0.0, 0.5)),
             ("triangle", triangle_density(64))]
    return tuple(
        ExperimentConfig(GeneratorSpec("walk", x1=0.0, step=st), s_values=(1.0,),
                         n_values=(1 << 15,), replicates=50, master_seed=404,
                         label=f"walk {name}")
        for name, st in steps)


PRESET_IDS = ("thm1_batch_ppc", "thm2i_seq_not_ppc", "thm2ii_seq_weak_ppc",
              "thm3_walk_ppc", "ex_two_point", "ex_kronecker")


def theorem_preset(preset_id: str) -> Preset:
    """Canned experiment(s) with the acceptance band that goes with them."""
    if preset_id == "thm1_batch_ppc":
        return Preset(preset_id, _batch_configs(), _band_2s(0.03),
                      "M-batch jittered sequences have PPC")
    if preset_id == "thm2i_seq_not_ppc":
        cfg = ExperimentConfig(GeneratorSpec("sequential"), s_values=(0.5,),
                               n_values=(1 << 12,), replicates=200, master_seed=202)
        return Preset(preset_id, (cfg,), _check_seq_not_ppc,
                      "sequential jittered: E R(1/2, 2^k) = 1/4, not 1")
    if preset_id == "thm2ii_seq_weak_ppc":
        cfg = ExperimentConfig(GeneratorSpec("sequential"), s_values=(0.5, 1.0),
                               alpha_values=(0.25, 0.5, 0.75), n_values=(1 << 16,),
                               replicates=50, master_seed=303)
        return Preset(preset_id, (cfg,), _band_2s(0.05),
                      "sequential jittered has alpha-PPC for alpha < 1")
    if preset_id == "thm3_walk_ppc":
        # the 0.06 absolute tolerance is 3% of the limit 2s = 2
        return Preset(preset_id, _walk_configs(), _band_2s(0.03),
                      "random walks with a step density have PPC")
    if preset_id == "ex_two_point":
        cfg = ExperimentConfig(GeneratorSpec("walk", x1=0.0, step=TwoPointStep(0.0, 0.5, 0.5)),
                               s_values=(1.0,), n_values=(1 << 12,), replicates=10,
                               master_seed=505)
        return Preset(preset_id, (cfg,), _check_two_point,
                      "two-point steps trap the walk on {0, 1/2}")
    if preset_id == "ex_kronecker":
        cfg = ExperimentConfig(GeneratorSpec("kronecker", x1=0.0, c=GOLDEN), s_values=(1.0,),
                               alpha_values=(0.5, 1.0),
                               n_values=tuple(1 << k for k in range(8, 17)),
                               replicates=1, master_seed=0)
        return Preset(preset_id, (cfg,), _check_kronecker,
                      "golden-ratio Kronecker: alpha-PPC for alpha < 1, not for alpha = 1")
    raise ValueError(f"unknown preset {preset_id!r}; expected one of {PRESET_IDS}")


def run_preset(preset_id: str, workers: Optional[int] = None):
    preset = theorem_preset(preset_id)
    results = [estimate_moments(cfg, workers) for cfg in preset.configs]
    return preset, results, preset.check(results)

