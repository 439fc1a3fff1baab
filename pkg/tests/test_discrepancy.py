from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from torusppc.discrepancy import discrepancy_bruteforce, extreme_discrepancy
from torusppc.generators import GOLDEN, SeedSpec, gen_iid_uniform, gen_kronecker


def rational_sup(points, q):
    """Exact sup over [a, b) for points on the lattice (1/q)Z, a and b swept
    over the finer lattice (1/2q)Z plus one-sided limits at lattice points."""
    pts = [Fraction(p).limit_denominator(q) for p in points]
    n = len(pts)
    cands = [Fraction(k, 2 * q) for k in range(2 * q + 1)]
    best = Fraction(0)
    for a in cands:
        for b in cands:
            if b < a:
                continue
            count = sum(1 for p in pts if a <= p < b)
            # b slightly above a lattice point: counts points equal to b
            on_b = sum(1 for p in pts if p == b)
            best = max(best, Fraction(count + on_b, n) - (b - a))
            if b == a:
                continue
            best = max(best, abs(Fraction(count, n) - (b - a)))
            # a slightly above a lattice point: drops points equal to a
            on_a = sum(1 for p in pts if p == a)
            best = max(best, (b - a) - Fraction(count - on_a, n))
    return float(best)


@pytest.mark.parametrize("points, expected", [
    (np.arange(10) / 10, 0.1),
    ([0.0], 1.0),
    ([0.5], 1.0),
    ([0.0, 0.5], 0.5),
    ((2 * np.arange(1, 11) - 1) / 20, 0.1),
])
def test_known_values(points, expected):
    assert extreme_discrepancy(points).value == pytest.approx(expected, abs=1e-12)
    assert discrepancy_bruteforce(points).value == pytest.approx(expected, abs=1e-12)


def test_empty_rejected():
    with pytest.raises(ValueError):
        extreme_discrepancy([])


def test_bruteforce_size_guard():
    with pytest.raises(ValueError):
        discrepancy_bruteforce(np.linspace(0, 0.99, 5000))


@given(st.lists(st.integers(0, 15), min_size=1, max_size=8))
def test_bruteforce_matches_rational_sweep(ks):
    pts = [k / 16 for k in ks]
    assert discrepancy_bruteforce(pts).value == pytest.approx(rational_sup(pts, 16), abs=1e-12)


@given(hnp.arrays(np.float64, st.integers(1, 256), elements=st.floats(0.0, 1.0, exclude_max=True)))
def test_formula_matches_bruteforce(points):
    assert abs(extreme_discrepancy(points).value - discrepancy_bruteforce(points).value) <= 1e-12


@given(hnp.arrays(np.float64, st.integers(1, 100), elements=st.floats(0.0, 1.0, exclude_max=True)))
def test_bounds(points):
    d = extreme_discrepancy(points)
    assert 1 / d.n - 1e-12 <= d.value <= 1.0 + 1e-12


def test_kronecker_low_discrepancy():
    for k in range(8, 17):
        n = 2 ** k
        d = extreme_discrepancy(gen_kronecker(n, 0.0, GOLDEN)).value
        assert n * d / np.log(n) < 3


def test_iid_loose_bound():
    assert extreme_discrepancy(gen_iid_uniform(100_000, SeedSpec(0, 0))).value < 0.02
