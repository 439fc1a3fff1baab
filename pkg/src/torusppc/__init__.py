"""Pair correlations of dependent random sequences on the unit torus."""
from .discrepancy import DiscrepancyResult, discrepancy_bruteforce, extreme_discrepancy
from .experiments import (ExperimentConfig, ExperimentResult, adjacent_pair_probability,
                          estimate_moments, theorem_preset, variance_decay_scan)
from .generators import (GOLDEN, ConstantStep, GeneratorSpec, SeedSpec, TabulatedStep,
                         TwoPointStep, UniformStep, gen_batch_jittered, gen_iid_uniform,
                         gen_jittered_single, gen_kronecker, gen_random_walk,
                         gen_sequential_jittered, parse_step, sample_step, triangle_density)
from .paircorr import (PairCorrParams, PairCorrResult, gap_histogram, neighbor_count,
                       neighbor_counts, pair_count_fast, pair_count_naive, r_statistic)
from .spectral import (fourier_coeff, nfold_cdf_deviation, schatte_rate_fit, sup_fourier)
from .torus import PointSet, box_count, frac, torus_dist

__version__ = "0.1.0"
