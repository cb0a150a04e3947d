"""Gradient checks for the reverse-mode engine against central differences.

Every check builds a scalar loss from one or more leaf tensors, runs
backward, and compares each analytic gradient entry with
(f(x+h) - f(x-h)) / 2h evaluated by replaying the forward pass.
"""

import numpy as np
import pytest

from chargecast.autodiff import Tensor, concat, softmax, take_rows

RNG = np.random.default_rng(20240816)
H = 1e-6
TOL = 1e-6


def numeric_grad(build_loss, leaves):
    """Central-difference gradient of build_loss w.r.t. each leaf array."""
    grads = []
    for leaf in leaves:
        g = np.zeros_like(leaf)
        flat = leaf.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + H
            up = build_loss()
            flat[i] = orig - H
            down = build_loss()
            flat[i] = orig
            gflat[i] = (up - down) / (2 * H)
        grads.append(g)
    return grads


def check(build, *leaf_arrays):
    """build maps leaf Tensors to a scalar Tensor."""
    tensors = [Tensor(a, requires_grad=True) for a in leaf_arrays]
    loss = build(*tensors)
    loss.backward()

    def replay():
        fresh = [Tensor(a, requires_grad=False) for a in leaf_arrays]
        return float(build(*fresh).data)

    numeric = numeric_grad(replay, leaf_arrays)
    for t, n in zip(tensors, numeric):
        np.testing.assert_allclose(t.grad, n, rtol=TOL, atol=TOL)


def test_add_mul_broadcast():
    a = RNG.normal(size=(3, 4))
    b = RNG.normal(size=(4,))
    check(lambda x, y: ((x + y) * (x - y)).sum(), a, b)


def test_matmul_batched():
    a = RNG.normal(size=(2, 3, 4))
    b = RNG.normal(size=(4, 5))
    check(lambda x, y: (x @ y).sum(), a, b)


def test_matmul_rejects_vectors():
    a = Tensor(RNG.normal(size=(4,)))
    m = Tensor(RNG.normal(size=(4, 3)))
    with pytest.raises(ValueError, match="2-D"):
        a @ m


def test_division_and_power():
    a = RNG.normal(size=(5,)) + 3.0
    b = RNG.normal(size=(5,)) + 3.0
    check(lambda x, y: ((x / y) ** 2).sum(), a, b)


def test_exp_log_tanh_sqrt():
    a = RNG.uniform(0.5, 2.0, size=(6,))
    check(lambda x: (x.exp() + x.log() + x.tanh() + x.sqrt()).sum(), a)


def test_abs_away_from_kink():
    a = np.array([1.5, -2.0, 0.75, -0.25])
    check(lambda x: x.abs().sum(), a)


def test_relu_away_from_kink():
    a = np.array([1.0, -1.0, 2.5, -0.5])
    check(lambda x: (x.relu() * 3.0).sum(), a)


def test_mean_and_axis_sum():
    a = RNG.normal(size=(3, 4, 2))
    check(lambda x: x.sum(axis=1).mean(), a)
    check(lambda x: x.sum(axis=(0, 2), keepdims=True).mean(), a)


def test_reshape_transpose_slice():
    a = RNG.normal(size=(4, 6))
    check(lambda x: (x.reshape((2, 12)).transpose((1, 0))[3:8] ** 2).sum(), a)


def test_broadcast_to():
    a = RNG.normal(size=(1, 5))
    check(lambda x: (x.broadcast_to((4, 5)) * 2.0).sum(), a)


def test_concat_gradients_split_correctly():
    a = RNG.normal(size=(2, 3))
    b = RNG.normal(size=(2, 2))
    check(lambda x, y: (concat([x, y], axis=1) ** 2).sum(), a, b)


def test_take_rows_accumulates_repeats():
    table = RNG.normal(size=(5, 3))
    idx = np.array([0, 2, 2, 4])

    t = Tensor(table, requires_grad=True)
    loss = take_rows(t, idx).sum()
    loss.backward()
    expected = np.zeros((5, 3))
    for i in idx:
        expected[i] += 1.0
    np.testing.assert_array_equal(t.grad, expected)


def test_softmax_gradient():
    a = RNG.normal(size=(3, 5))
    w = RNG.normal(size=(5,))
    check(lambda x: (softmax(x, axis=-1) * w).sum(), a)


def test_softmax_rows_sum_to_one():
    a = RNG.normal(size=(4, 7)) * 10
    s = softmax(Tensor(a), axis=-1)
    np.testing.assert_allclose(s.data.sum(axis=-1), 1.0, rtol=1e-12)


def test_diamond_graph_accumulates_both_paths():
    # y = x*x + x*x should double the single-path gradient
    x = Tensor(np.array([3.0]), requires_grad=True)
    y = x * x
    (y + y).sum().backward()
    np.testing.assert_allclose(x.grad, [12.0])


def test_backward_requires_scalar():
    x = Tensor(np.ones(3), requires_grad=True)
    with pytest.raises(ValueError):
        (x * 2.0).backward()


def test_grad_resets_between_backward_calls():
    x = Tensor(np.array([2.0]), requires_grad=True)
    (x * x).sum().backward()
    first = x.grad.copy()
    (x * x).sum().backward()
    np.testing.assert_array_equal(x.grad, first)


def test_layernorm_composition():
    a = RNG.normal(size=(3, 8))
    gamma = RNG.normal(size=(8,))
    beta = RNG.normal(size=(8,))

    def ln(x, g, b):
        mu = x.mean(axis=-1, keepdims=True)
        var = ((x - mu) ** 2).mean(axis=-1, keepdims=True)
        return ((x - mu) / (var + 1e-5).sqrt() * g + b).sum()

    check(ln, a, gamma, beta)


def test_attention_composition():
    q = RNG.normal(size=(4, 3))
    k = RNG.normal(size=(4, 3))
    v = RNG.normal(size=(4, 2))

    def attn(qq, kk, vv):
        scores = (qq @ kk.transpose((1, 0))) * (1.0 / np.sqrt(3.0))
        return (softmax(scores, axis=-1) @ vv).sum()

    check(attn, q, k, v)
