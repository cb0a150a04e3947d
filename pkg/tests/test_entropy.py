"""Sample entropy against a direct O(N^2) template-counting oracle."""

import math

import numpy as np

from chargecast.entropy import coarse_grain, msse_curve, sample_entropy


def naive_sample_entropy(x, m, r):
    """Textbook definition, written without the incremental distance trick.

    Counts template matches of length m and m+1 over the same n = N - m
    starting positions, excluding self-matches, with the Chebyshev metric
    and the "distance <= r" convention.
    """
    x = np.asarray(x, dtype=float)
    big_n = x.size
    n = big_n - m

    def count(length):
        hits = 0
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                d = max(abs(x[i + t] - x[j + t]) for t in range(length))
                if d <= r:
                    hits += 1
        return hits

    b = count(m)
    a = count(m + 1)
    if a == 0 or b == 0:
        return math.inf
    return -math.log(a / b)


def test_matches_naive_oracle_on_random_series():
    rng = np.random.default_rng(99)
    for _ in range(25):
        n = int(rng.integers(10, 50))
        x = rng.normal(size=n)
        r = 0.2 * float(np.std(x))
        got = sample_entropy(x, m=2, r=r)
        want = naive_sample_entropy(x, 2, r)
        if math.isinf(want):
            assert math.isinf(got)
        else:
            assert got == want  # same counts, same log; bitwise identical


def test_m_three_agrees_with_oracle():
    rng = np.random.default_rng(3)
    x = rng.normal(size=40)
    r = 0.3 * float(np.std(x))
    assert sample_entropy(x, m=3, r=r) == naive_sample_entropy(x, 3, r)


def test_no_matches_is_infinite():
    x = np.array([0.0, 100.0, -100.0, 200.0, -200.0, 300.0, -300.0, 400.0])
    assert math.isinf(sample_entropy(x, m=2, r=1e-9))


def test_regular_signal_scores_lower_than_noise():
    t = np.arange(200)
    regular = np.sin(2 * np.pi * t / 20)
    noisy = np.random.default_rng(0).normal(size=200)
    r_reg = 0.15 * float(np.std(regular))
    r_noi = 0.15 * float(np.std(noisy))
    assert sample_entropy(regular, r=r_reg) < sample_entropy(noisy, r=r_noi)


def test_coarse_grain_averages_blocks():
    x = np.arange(10, dtype=float)
    np.testing.assert_array_equal(coarse_grain(x, 3), [1.0, 4.0, 7.0])
    np.testing.assert_array_equal(coarse_grain(x, 1), x)


def test_msse_first_scale_is_plain_sample_entropy():
    rng = np.random.default_rng(17)
    x = rng.normal(size=120)
    curve = msse_curve(x, m=2, r_frac=0.15, tau_max=4)
    r = 0.15 * float(np.std(x))
    assert curve.shape == (4,)
    assert curve[0] == sample_entropy(x, m=2, r=r)


def test_msse_tolerance_fixed_from_original_series():
    # the tolerance must come from the unscaled series, not per-scale std
    rng = np.random.default_rng(5)
    x = rng.normal(size=90)
    r = 0.15 * float(np.std(x))
    curve = msse_curve(x, m=2, r_frac=0.15, tau_max=3)
    for tau in (2, 3):
        assert curve[tau - 1] == sample_entropy(coarse_grain(x, tau), m=2, r=r)
