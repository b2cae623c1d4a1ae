import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from signorth.combinatorics import rank1_obstruction
from signorth.pattern_core import SignPattern
from signorth.random_sim import (MuP, cover_lower_bound, cover_probability,
                                 pm1_certificate_rate, rank1_bound_sum, required_columns,
                                 sample_array, sample_pattern, threshold_bounds, trial_rng,
                                 wilson_interval)

HALF = Fraction(1, 2)


def test_mup_validation():
    assert sum(MuP(Fraction(1, 3)).probabilities) == 1
    for bad in (0, Fraction(3, 5), -1):
        with pytest.raises(ValueError):
            MuP(bad)


def test_half_gives_nowhere_zero():
    S = sample_pattern(20, 50, MuP(HALF), seed=3)
    assert S.is_nowhere_zero


def test_sampler_deterministic():
    a = sample_pattern(4, 9, MuP(Fraction(1, 4)), seed=11, trial=5)
    b = sample_pattern(4, 9, MuP(Fraction(1, 4)), seed=11, trial=5)
    c = sample_pattern(4, 9, MuP(Fraction(1, 4)), seed=11, trial=6)
    assert a.to_json() == b.to_json() and a != c


def test_entry_frequencies():
    p = 0.3
    A = sample_array(1000, 100, MuP(Fraction(3, 10)), trial_rng(1))
    N = A.size
    for val, prob in ((1, p), (-1, p), (0, 1 - 2 * p)):
        freq = np.mean(A == val)
        assert abs(freq - prob) <= 3 * math.sqrt(prob * (1 - prob) / N)


def test_wilson_interval():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and abs((lo + hi) / 2 - 0.5) < 1e-12
    assert wilson_interval(0, 10)[0] == 0 and wilson_interval(10, 10)[1] == 1
    with pytest.raises(ValueError):
        wilson_interval(0, 0)


def test_lower_bound_formula():
    m, p, r = 40, HALF, 40
    expected = 1 - m * math.exp(-m / 8) - (m / 0.5) * 0.5**r
    assert abs(float(cover_lower_bound(m, p, r)) - expected) < 1e-12
    assert cover_lower_bound(m, p, r) <= Fraction(expected) + Fraction(1, 10**15)
    assert cover_lower_bound(3, HALF, 0) == 0


@given(st.integers(2, 60), st.integers(0, 59), st.sampled_from([HALF, Fraction(1, 4), Fraction(1, 10)]))
def test_lower_bound_monotone_in_r(m, r, p):
    assert cover_lower_bound(m, p, r) <= cover_lower_bound(m, p, r + 1)
    assert 0 <= cover_lower_bound(m, p, r) <= 1


def test_cover_probability_two_rows():
    # W_1 holds 2 + r columns, so success needs both product signs among them
    rep = cover_probability(2, 200, HALF, 2, trials=400, seed=0)
    assert rep.bound_applicable and rep.wilson_lo <= 1 - 2 * 0.5**4 <= rep.wilson_hi
    rep = cover_probability(2, 200, HALF, 198, trials=200, seed=0, relax=True)
    assert rep.empirical == 1.0


def test_cover_probability_oversized_r():
    m = 6
    r = math.ceil(math.log2(m)) + 8
    n = m * m + m * r + 4 * m
    rep = cover_probability(m, n, HALF, r, trials=500, seed=2)
    assert not rep.bound_applicable
    assert rep.empirical >= float(rep.lower_bound) - 2 * rep.half_width


def test_cover_probability_requires_hypothesis():
    with pytest.raises(ValueError):
        cover_probability(4, 10, HALF, 4, trials=10, seed=0)
    rep = cover_probability(4, 10, HALF, 0, trials=10, seed=0, relax=True)
    assert not rep.bound_applicable


def test_reports_are_reproducible_and_mergeable():
    n = required_columns(3, HALF, 3)
    full = cover_probability(3, n, HALF, 3, trials=60, seed=9)
    again = cover_probability(3, n, HALF, 3, trials=60, seed=9)
    assert full.to_json() == again.to_json()
    a = cover_probability(3, n, HALF, 3, trials=25, seed=9)
    b = cover_probability(3, n, HALF, 3, trials=35, seed=9, first_trial=25)
    assert b.merge(a).to_json() == full.to_json()


def test_exact_oracle_dominates_greedy():
    rep = cover_probability(3, 12, HALF, 0, trials=100, seed=4, exact_oracle=True, relax=True)
    assert rep.successes_exact >= rep.successes


def test_thresholds():
    t = threshold_bounds(10, HALF)
    assert t.n_thm46 == 174 and t.n_thm42 == 3915
    assert threshold_bounds(10, Fraction(1, 4)).n_thm42 is None
    for m in range(4, 60):
        t = threshold_bounds(m, HALF)
        assert t.n_thm46 < t.n_thm42


def test_rank1_bound_sum_values():
    assert rank1_bound_sum(2) == (Fraction(1, 2), 0.5)
    vals = [rank1_bound_sum(m)[0] for m in range(8, 33)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        rank1_bound_sum(1)


def test_rank1_bound_dominates_monte_carlo():
    for m in range(5, 9):
        hits = sum(rank1_obstruction(sample_pattern(m, m, MuP(HALF), seed=17, trial=t)) is not None
                   for t in range(300))
        assert hits / 300 <= min(1.0, rank1_bound_sum(m)[1])


@pytest.mark.slow
def test_pm1_screening_rate():
    for m in (4, 5, 6):
        n = threshold_bounds(m, HALF).n_thm42
        assert pm1_certificate_rate(m, n, trials=20, seed=m) >= 1 - 2 * m ** (-1 / 8)
