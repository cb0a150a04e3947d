"""Complexity-band recombination and the full extraction pipeline.

The clustering oracle enumerates every contiguous 3-way partition of the
sorted scores and picks the one with minimal within-cluster squared
error, which is the global optimum for 1-D k-means.
"""

import itertools

import numpy as np
import pytest

from chargecast.bands import BandSet, DecomposeConfig, band_recombine, multi_frequency_pipeline
from chargecast.vmd import VmdConfig


def best_contiguous_partition(scores):
    """Globally optimal 3-cluster assignment for 1-D points."""
    order = np.argsort(scores, kind="stable")
    s = np.asarray(scores, dtype=float)[order]
    n = s.size
    best = None
    for i, j in itertools.combinations(range(1, n), 2):
        groups = [s[:i], s[i:j], s[j:]]
        sse = sum(float(((g - g.mean()) ** 2).sum()) for g in groups)
        if best is None or sse < best[0] - 1e-12:
            best = (sse, i, j)
    _, i, j = best
    labels = np.empty(n, dtype=int)
    labels[order[:i]] = 0
    labels[order[i:j]] = 1
    labels[order[j:]] = 2
    return labels


def recombine_oracle(components, scores):
    labels = best_contiguous_partition(scores)
    out = [np.zeros_like(components[0]) for _ in range(3)]
    for comp, lab in zip(components, labels):
        out[lab] = out[lab] + comp
    return out  # low, mid, high


def test_three_well_separated_groups_match_oracle():
    rng = np.random.default_rng(0)
    comps = [rng.normal(size=50) for _ in range(9)]
    scores = np.array([0.1, 0.12, 0.11, 1.0, 1.05, 0.98, 3.0, 3.1, 2.9])
    got = band_recombine(comps, scores)
    low, mid, high = recombine_oracle(comps, scores)
    np.testing.assert_allclose(got.low, low, atol=1e-12)
    np.testing.assert_allclose(got.mid, mid, atol=1e-12)
    np.testing.assert_allclose(got.high, high, atol=1e-12)


def test_random_scores_match_oracle_when_clusters_are_separated():
    rng = np.random.default_rng(7)
    for trial in range(20):
        k = int(rng.integers(4, 10))
        centers = np.sort(rng.uniform(0, 10, size=3))
        if np.min(np.diff(centers)) < 2.0:
            continue  # k-means from min/median/max seeds needs separation
        scores = np.concatenate(
            [centers[i] + 0.1 * rng.normal(size=k) for i in range(3)]
        )
        comps = [rng.normal(size=30) for _ in scores]
        got = band_recombine(comps, scores)
        low, mid, high = recombine_oracle(comps, scores)
        np.testing.assert_allclose(got.low, low, atol=1e-12)
        np.testing.assert_allclose(got.mid, mid, atol=1e-12)
        np.testing.assert_allclose(got.high, high, atol=1e-12)


def test_bands_sum_to_component_total():
    rng = np.random.default_rng(3)
    comps = [rng.normal(size=40) for _ in range(6)]
    scores = rng.uniform(0, 5, size=6)
    got = band_recombine(comps, scores)
    total = np.zeros(40)
    for c in comps:
        total += c
    np.testing.assert_allclose(got.total(), total, rtol=1e-13, atol=1e-13)


def test_membership_labels_cover_components():
    rng = np.random.default_rng(1)
    comps = [rng.normal(size=20) for _ in range(5)]
    got = band_recombine(comps, [0.0, 0.1, 2.0, 2.1, 5.0])
    assert len(got.membership) == 5
    assert set(got.membership) <= {"low", "mid", "high"}
    assert got.membership[0] == "low" and got.membership[-1] == "high"


def test_validation_errors():
    with pytest.raises(ValueError, match="at least 3"):
        band_recombine([np.zeros(4), np.zeros(4)], [0.0, 1.0])
    with pytest.raises(ValueError, match="equal length"):
        band_recombine([np.zeros(4), np.zeros(5), np.zeros(4)], [0.0, 1.0, 2.0])
    with pytest.raises(ValueError, match="finite"):
        band_recombine([np.zeros(4)] * 3, [0.0, np.nan, 2.0])


LIGHT = DecomposeConfig(vmd=VmdConfig(K=4, alpha=200.0), ensemble_n=6, noise_amp=0.1)


def make_signal(n=512):
    rng = np.random.default_rng(11)
    t = np.arange(n)
    return (
        3.0
        + np.sin(2 * np.pi * t / 24)
        + 0.5 * np.sin(2 * np.pi * t / 168)
        + 0.2 * rng.normal(size=n)
    )


def test_pipeline_detail_components_sum_to_denoised():
    x = make_signal()
    den, bands, comps = multi_frequency_pipeline(
        x, LIGHT, seed=np.random.SeedSequence(0), detail=True
    )
    col_sum = np.zeros_like(den)
    for _, series in comps:
        col_sum += series
    rel = np.max(np.abs(col_sum - den)) / np.max(np.abs(den))
    assert rel < 1e-12


def test_pipeline_bands_sum_to_denoised():
    x = make_signal()
    den, bands = multi_frequency_pipeline(x, LIGHT, seed=np.random.SeedSequence(0))
    rel = np.max(np.abs(bands.total() - den)) / np.max(np.abs(den))
    assert rel < 1e-12


def test_pipeline_denoised_drops_power():
    x = make_signal()
    den, _ = multi_frequency_pipeline(x, LIGHT, seed=np.random.SeedSequence(0))
    assert float(np.var(den)) < float(np.var(x))
    # and stays close to the clean structure underneath
    assert np.corrcoef(den, x)[0, 1] > 0.95


def test_pipeline_deterministic_per_seed():
    x = make_signal(300)
    a = multi_frequency_pipeline(x, LIGHT, seed=np.random.SeedSequence(4))
    b = multi_frequency_pipeline(x, LIGHT, seed=np.random.SeedSequence(4))
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1].high, b[1].high)


def test_pipeline_needs_two_modes():
    with pytest.raises(ValueError):
        multi_frequency_pipeline(
            make_signal(128),
            DecomposeConfig(vmd=VmdConfig(K=1), ensemble_n=2, noise_amp=0.1),
            seed=np.random.SeedSequence(0),
        )


def test_component_ids_are_stable_and_descriptive():
    x = make_signal(256)
    _, _, comps = multi_frequency_pipeline(x, LIGHT, seed=np.random.SeedSequence(2), detail=True)
    ids = [cid for cid, _ in comps]
    assert len(ids) == len(set(ids))
    assert any("sub" in cid for cid in ids)  # the most complex mode was expanded
    assert all(cid.startswith("mode") for cid in ids)
