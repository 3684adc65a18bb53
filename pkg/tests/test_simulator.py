import math
from collections import Counter
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from shelfmix.errors import BoundExceeded
from shelfmix.permstat import count_valleys
from shelfmix.shelfmeasure import q_table, shuffle_valley_pmf, q_value
from shelfmix.permstat import valley_table
from shelfmix.simulator import (
    batch_valleys,
    composition_check,
    convolve,
    cut_sizes,
    empirical_tv,
    enumerate_exact,
    inverse_shuffle_sample,
    sample_batch,
    simulate,
)


def test_single_card():
    rng = np.random.default_rng(0)
    assert all(inverse_shuffle_sample(1, 4, rng) == (1,) for _ in range(20))
    assert (sample_batch(1, 4, 10, rng) == 1).all()


def test_two_cards_balanced():
    rng = np.random.default_rng(7)
    draws = sample_batch(2, 5, 100_000, rng)
    ones = int((draws[:, 0] == 1).sum())
    sigma = math.sqrt(100_000 * 0.25)
    assert abs(ones - 50_000) <= 3 * sigma


def test_literal_sampler_two_cards():
    rng = np.random.default_rng(11)
    c = Counter(inverse_shuffle_sample(2, 3, rng) for _ in range(20_000))
    assert abs(c[(1, 2)] - 10_000) <= 3 * math.sqrt(5_000)


@pytest.mark.parametrize("sampler", ["literal", "batch"])
def test_sampler_matches_q_per_permutation(sampler):
    n, m, N = 4, 2, 40_000
    rng = np.random.default_rng(2024)
    if sampler == "literal":
        c = Counter(inverse_shuffle_sample(n, m, rng) for _ in range(N))
    else:
        c = Counter(map(tuple, sample_batch(n, m, N, rng).tolist()))
    for p in permutations(range(1, n + 1)):
        prob = float(q_value(n, m, count_valleys(p)))
        sigma = math.sqrt(N * prob * (1 - prob))
        assert abs(c[p] - N * prob) <= 4 * sigma, p


def test_batch_valley_histogram_five_cards():
    run = simulate(5, 2, 10**6, seed=3)
    pmf = shuffle_valley_pmf(q_table(5, 2), valley_table(5))
    assert sum(run.valley_histogram) == 10**6
    for count, p in zip(run.valley_histogram, pmf):
        p = float(p)
        assert abs(count - 10**6 * p) <= 4 * math.sqrt(10**6 * p * (1 - p))


def test_batch_valleys_helper():
    perms = np.array([[3, 1, 4, 2, 5], [1, 2, 3, 4, 5]])
    assert batch_valleys(perms).tolist() == [2, 0]
    assert batch_valleys(np.array([[2, 1]])).tolist() == [0]


def test_cut_sizes_mean():
    n, m, N = 52, 3, 100_000
    sizes = cut_sizes(n, m, np.random.default_rng(5), size=N)
    assert sizes.shape == (N, 2 * m)
    assert (sizes.sum(axis=1) == n).all()
    p = 1 / (2 * m)
    sigma_mean = math.sqrt(n * p * (1 - p) / N)
    assert np.all(np.abs(sizes.mean(axis=0) - n * p) <= 4 * sigma_mean)


def test_determinism():
    a = simulate(20, 7, 150_000, seed=99)
    b = simulate(20, 7, 150_000, seed=99)
    c = simulate(20, 7, 150_000, seed=100)
    assert a == b
    assert a.valley_histogram != c.valley_histogram
    r1, r2 = np.random.default_rng(4), np.random.default_rng(4)
    assert [inverse_shuffle_sample(9, 2, r1) for _ in range(50)] == [
        inverse_shuffle_sample(9, 2, r2) for _ in range(50)
    ]


def test_empirical_tv():
    assert empirical_tv(2, 5, 10_000, seed=1) <= 0.02
    assert empirical_tv(30, 40, 5_000, seed=8) == empirical_tv(30, 40, 5_000, seed=8)
    with pytest.raises(ValueError):
        empirical_tv(5, 2, 999, seed=0)


def test_enumerate_two_cards():
    d = enumerate_exact(2, 1)
    assert d.probs == {(1, 2): Fraction(1, 2), (2, 1): Fraction(1, 2)}


@pytest.mark.parametrize("n, m", [(n, m) for n in range(1, 7) for m in range(1, 4)])
def test_enumeration_constant_on_classes(n, m):
    d = enumerate_exact(n, m)
    assert sum(d.probs.values()) == 1
    assert all(len(v) == 1 for v in d.class_values().values())


def test_enumeration_budget(monkeypatch):
    with pytest.raises(BoundExceeded):
        enumerate_exact(6, 3, budget=1000)
    monkeypatch.setenv("SHELFMIX_ENUM_BUDGET", "100")
    with pytest.raises(BoundExceeded):
        enumerate_exact(4, 2)


@pytest.mark.parametrize("n, m1, m2", [(4, 1, 1), (5, 1, 2), (2, 3, 2)])
def test_composition(n, m1, m2):
    rep = composition_check(n, m1, m2)
    assert rep.holds and rep.mismatches == 0


def test_convolution_not_trivially_equal():
    # sanity: the two-pass law differs from a single pass of either factor
    two = convolve(enumerate_exact(4, 1), enumerate_exact(4, 1))
    assert two.probs != enumerate_exact(4, 1).probs
