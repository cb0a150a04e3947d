"""Objectives and metrics, checked against naive spectral math."""

import math

import numpy as np
import pytest

from chargecast.autodiff import Tensor
from chargecast.errors import DataError
from chargecast.losses import LossConfig, combined_loss, frequency_loss, mae_loss, metrics


def naive_frequency_loss(pred, truth):
    """Mean |DFT(pred - truth)| along the horizon axis, via complex exponentials."""
    d = np.asarray(pred) - np.asarray(truth)
    if d.ndim == 3:
        d = d[None]
    b, s, n, _ = d.shape
    total = 0.0
    count = 0
    for bi in range(b):
        for ni in range(n):
            seq = d[bi, :, ni, 0]
            for k in range(s):
                acc = 0.0 + 0.0j
                for t in range(s):
                    acc += seq[t] * np.exp(-2j * math.pi * k * t / s)
                total += abs(acc)
                count += 1
    return total / count


def test_mae_matches_mean_abs():
    rng = np.random.default_rng(0)
    p = rng.normal(size=(4, 3, 2, 1))
    t = rng.normal(size=(4, 3, 2, 1))
    got = mae_loss(Tensor(p), Tensor(t))
    assert float(got.data) == pytest.approx(float(np.mean(np.abs(p - t))), abs=1e-15)


def test_frequency_loss_matches_naive_dft():
    rng = np.random.default_rng(1)
    p = rng.normal(size=(3, 5, 4, 1))
    t = rng.normal(size=(3, 5, 4, 1))
    got = float(frequency_loss(Tensor(p), Tensor(t)).data)
    want = naive_frequency_loss(p, t)
    assert abs(got - want) < 1e-9


def test_frequency_loss_single_window():
    rng = np.random.default_rng(2)
    p = rng.normal(size=(6, 2, 1))
    t = rng.normal(size=(6, 2, 1))
    got = float(frequency_loss(Tensor(p), Tensor(t)).data)
    assert abs(got - naive_frequency_loss(p, t)) < 1e-9


def test_combined_with_zero_weight_is_exactly_mae():
    rng = np.random.default_rng(3)
    p = Tensor(rng.normal(size=(2, 4, 3, 1)), requires_grad=True)
    t = rng.normal(size=(2, 4, 3, 1))
    combined = combined_loss(p, t, LossConfig(lambda_freq=0.0))
    plain = mae_loss(Tensor(p.data), t)
    assert float(combined.data) == float(plain.data)


def test_combined_adds_weighted_frequency_term():
    rng = np.random.default_rng(4)
    p = rng.normal(size=(2, 4, 3, 1))
    t = rng.normal(size=(2, 4, 3, 1))
    lam = 0.37
    got = float(combined_loss(Tensor(p), t, LossConfig(lambda_freq=lam)).data)
    want = float(mae_loss(Tensor(p), t).data) + lam * float(
        frequency_loss(Tensor(p), t).data
    )
    assert got == pytest.approx(want, abs=1e-14)


def test_combined_default_weight_is_one_tenth():
    assert LossConfig().lambda_freq == 0.1


def test_combined_loss_is_differentiable():
    rng = np.random.default_rng(5)
    p = Tensor(rng.normal(size=(2, 3, 2, 1)), requires_grad=True)
    t = rng.normal(size=(2, 3, 2, 1)) + 2.0
    loss = combined_loss(p, t, LossConfig(lambda_freq=0.1))
    loss.backward()
    assert p.grad is not None
    assert np.isfinite(p.grad).all()


def test_metrics_hand_values():
    pred = np.array([1.0, 2.0, 3.0, 4.0])
    truth = np.array([2.0, 4.0, 6.0, 8.0])
    m = metrics(pred, truth)
    assert m["mae"] == pytest.approx(2.5)
    assert m["rmse"] == pytest.approx(math.sqrt(7.5))  # (1+4+9+16)/4
    # |1-2|/2, |2-4|/4, |3-6|/6, |4-8|/8 -> all 0.5
    assert m["mape"] == pytest.approx(0.5)
    assert m["mape_excluded"] == 0


def test_metrics_rmse_example():
    pred = np.array([0.0, 0.0])
    truth = np.array([3.0, 4.0])
    assert metrics(pred, truth)["rmse"] == pytest.approx(math.sqrt(12.5))


def test_mape_excludes_near_zero_truth():
    pred = np.array([1.0, 2.0, 3.0])
    truth = np.array([0.0, 1e-12, 2.0])
    m = metrics(pred, truth)
    assert m["mape_excluded"] == 2
    assert m["mape"] == pytest.approx(0.5)  # only |3-2|/2 survives


def test_mape_absent_when_all_excluded():
    m = metrics(np.ones(3), np.zeros(3))
    assert m["mape"] is None
    assert m["mape_excluded"] == 3


def test_mape_is_a_fraction_example():
    pred = np.array([11.0])
    truth = np.array([10.0])
    assert metrics(pred, truth)["mape"] == pytest.approx(0.10)


def test_shape_mismatch_raises():
    with pytest.raises(DataError):
        mae_loss(Tensor(np.zeros((2, 3))), np.zeros((3, 2)))


def test_frequency_loss_rejects_flat_ranks():
    with pytest.raises(DataError):
        frequency_loss(Tensor(np.zeros((5,))), np.zeros((5,)))
