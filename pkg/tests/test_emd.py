"""Empirical decomposition and its noise-assisted ensemble variant."""

import numpy as np

from chargecast.emd import SiftConfig, emd, iceemdan, imf_sum


def test_residual_is_signal_minus_imf_sum():
    rng = np.random.default_rng(0)
    x = np.cumsum(rng.normal(size=400)) + np.sin(np.arange(400) / 7.0)
    result = emd(x)
    np.testing.assert_array_equal(result.residual, x - imf_sum(result.imfs, x.size))
    recon = imf_sum(result.imfs, x.size) + result.residual
    rel = np.max(np.abs(recon - x)) / np.max(np.abs(x))
    assert rel < 1e-12  # re-adding rounds once, so only float-exact


def test_monotonic_signal_has_no_imfs():
    x = np.linspace(0.0, 5.0, 100)
    result = emd(x)
    assert len(result.imfs) == 0
    np.testing.assert_array_equal(result.residual, x)


def test_pure_tone_yields_one_dominant_imf():
    t = np.arange(512)
    x = np.sin(2 * np.pi * t / 32)
    result = emd(x)
    assert len(result.imfs) >= 1
    power = [float(np.sum(imf**2)) for imf in result.imfs]
    assert power[0] > 0.9 * float(np.sum(x**2))


def test_imf_oscillates_about_zero():
    rng = np.random.default_rng(4)
    x = rng.normal(size=300).cumsum()
    result = emd(x)
    for imf in result.imfs:
        # every IMF from sifting should have near-zero local mean
        assert abs(float(np.mean(imf))) < 0.5 * float(np.std(x))


def test_plateau_extrema_are_handled():
    # flat tops would break naive sign-change detection
    x = np.array([0, 1, 1, 1, 0, -1, -1, 0, 1, 0, -1, 0, 1, 1, 0, -1, -1, -1, 0, 1], dtype=float)
    result = emd(x)
    recon = imf_sum(result.imfs, x.size) + result.residual
    np.testing.assert_array_equal(recon, x)


def test_zero_noise_ensemble_equals_plain_emd():
    rng = np.random.default_rng(9)
    x = np.sin(np.arange(200) / 5.0) + 0.1 * rng.normal(size=200)
    plain = emd(x)
    ens = iceemdan(x, ensemble_n=10, noise_amp=0.0, seed=np.random.SeedSequence(1))
    assert len(plain.imfs) == len(ens.imfs)
    for a, b in zip(plain.imfs, ens.imfs):
        np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(plain.residual, ens.residual)


def test_ensemble_deterministic_per_seed():
    x = np.sin(np.arange(150) / 4.0)
    a = iceemdan(x, ensemble_n=8, noise_amp=0.2, seed=np.random.SeedSequence(5))
    b = iceemdan(x, ensemble_n=8, noise_amp=0.2, seed=np.random.SeedSequence(5))
    assert len(a.imfs) == len(b.imfs)
    for ia, ib in zip(a.imfs, b.imfs):
        np.testing.assert_array_equal(ia, ib)


def test_ensemble_seed_changes_output():
    x = np.sin(np.arange(150) / 4.0)
    a = iceemdan(x, ensemble_n=8, noise_amp=0.2, seed=np.random.SeedSequence(5))
    b = iceemdan(x, ensemble_n=8, noise_amp=0.2, seed=np.random.SeedSequence(6))
    same = len(a.imfs) == len(b.imfs) and all(
        np.array_equal(ia, ib) for ia, ib in zip(a.imfs, b.imfs)
    )
    assert not same


def test_sift_config_limits_iterations():
    x = np.random.default_rng(2).normal(size=256)
    res_tight = emd(x, SiftConfig(max_siftings=1))
    res_loose = emd(x, SiftConfig(max_siftings=10))
    assert len(res_tight.imfs) >= 1
    assert len(res_loose.imfs) >= 1
