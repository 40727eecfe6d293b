"""Gradient checks for the reverse-mode engine, op by op."""

import numpy as np
import pytest

from dnlrl import autograd
from dnlrl.autograd import Tensor, concat, fuzzy_conj, fuzzy_disj, minimum, stack
from dnlrl.errors import NumericError

from helpers import check_gradients, rng_param


@pytest.fixture
def rng():
    return np.random.default_rng(123)


def test_constant_loss_has_zero_gradient(rng):
    x = rng_param((3, 2), rng)
    loss = (x * 0.0).sum() + 5.0
    loss.backward()
    assert np.all(x.grad == 0.0)


def test_add_mul_broadcasting(rng):
    a = rng_param((3, 4), rng)
    b = rng_param((4,), rng)
    c = rng_param((3, 1), rng)
    check_gradients(lambda: ((a + b) * c).sum(), [a, b, c])


def test_sub_div_pow(rng):
    a = rng_param((2, 3), rng, lo=0.5, hi=2.0)
    b = rng_param((2, 3), rng, lo=0.5, hi=2.0)
    check_gradients(lambda: ((a - b) / b + a ** 2.0).sum(), [a, b])


def test_matmul(rng):
    a = rng_param((4, 3), rng)
    b = rng_param((3, 2), rng)
    check_gradients(lambda: (a @ b).sum(), [a, b])


def test_reductions(rng):
    a = rng_param((3, 5), rng)
    check_gradients(lambda: a.sum(axis=1).mean(), [a])
    check_gradients(lambda: a.mean(axis=0, keepdims=True).sum(), [a])


def test_nonlinearities(rng):
    a = rng_param((2, 4), rng, lo=0.2, hi=1.5)
    check_gradients(lambda: a.exp().sum(), [a])
    check_gradients(lambda: a.log().sum(), [a])
    check_gradients(lambda: a.sigmoid().sum(), [a])
    check_gradients(lambda: a.tanh().sum(), [a])
    check_gradients(lambda: ((a - 0.8).relu() * 2.0).sum(), [a])


def test_sigmoid_chain_matches_identity(rng):
    # d sigmoid(c*w) / dw = c * m * (1 - m)
    w = rng_param((5,), rng)
    c = 6.0
    out = (w * c).sigmoid()
    out.sum().backward()
    m = 1.0 / (1.0 + np.exp(-c * w.data))
    assert np.allclose(w.grad, c * m * (1.0 - m), rtol=1e-12)


def test_clip_blocks_gradient_outside_range(rng):
    x = Tensor(np.array([-0.5, 0.3, 1.7]), requires_grad=True)
    x.clip(0.0, 1.0).sum().backward()
    assert np.array_equal(x.grad, np.array([0.0, 1.0, 0.0]))


def test_shape_ops(rng):
    a = rng_param((2, 6), rng)
    b = rng_param((2, 3), rng)
    check_gradients(lambda: a.reshape(3, 4).sum(axis=0).mean(), [a])
    check_gradients(lambda: concat([a, b], axis=1).sum(), [a, b])
    check_gradients(lambda: stack([b, b * 2.0], axis=2).sum(), [b])


def test_minimum_routes_gradient(rng):
    a = Tensor(np.array([1.0, 5.0]), requires_grad=True)
    b = Tensor(np.array([2.0, 3.0]), requires_grad=True)
    minimum(a, b).sum().backward()
    assert np.array_equal(a.grad, np.array([1.0, 0.0]))
    assert np.array_equal(b.grad, np.array([0.0, 1.0]))


def test_fuzzy_ops_gradients(rng):
    x = Tensor(rng.uniform(0.05, 0.95, (3, 6)), requires_grad=True)
    m = Tensor(rng.uniform(0.05, 0.95, (4, 6)), requires_grad=True)
    check_gradients(lambda: fuzzy_conj(x, m).sum(), [x, m])
    md = Tensor(rng.uniform(0.05, 0.95, 6), requires_grad=True)
    check_gradients(lambda: fuzzy_disj(x, md).sum(), [x, md])


def test_conjunction_partial_derivative_formula(rng):
    # d out / d m_i = -(1 - x_i) * prod_{j != i} (1 - m_j (1 - x_j))
    x_val = rng.uniform(0.1, 0.9, 5)
    m = Tensor(rng.uniform(0.1, 0.9, (1, 5)), requires_grad=True)
    out = fuzzy_conj(Tensor(x_val[None, :]), m)
    out.sum().backward()
    terms = 1.0 - m.data[0] * (1.0 - x_val)
    for i in range(5):
        expected = -(1.0 - x_val[i]) * np.prod(np.delete(terms, i))
        assert m.grad[0, i] == pytest.approx(expected, rel=1e-12)


def test_reused_tensor_accumulates(rng):
    x = Tensor(np.array([2.0]), requires_grad=True)
    y = x * 3.0 + x * x
    y.sum().backward()
    assert x.grad[0] == pytest.approx(3.0 + 2.0 * 2.0)


def test_no_grad_blocks_recording():
    x = Tensor(np.array([1.0]), requires_grad=True)
    with autograd.no_grad():
        y = x * 2.0
    assert not y.requires_grad
    assert y._parents == ()


def test_non_finite_gradient_raises():
    x = Tensor(np.array([0.0]), requires_grad=True)
    with np.errstate(divide="ignore"):
        out = x.log().sum()
        with pytest.raises(NumericError):
            out.backward()


def test_backward_requires_scalar():
    x = Tensor(np.ones((2, 2)), requires_grad=True)
    with pytest.raises(ValueError):
        (x * 1.0).backward()
