"""Shared test utilities: finite-difference oracle and small builders."""

import numpy as np

from dnlrl.autograd import Tensor


def finite_difference_grads(f, tensors, h=1e-5):
    """Central-difference gradients of the scalar-returning callable `f`
    with respect to each tensor's data, edited in place."""
    grads = []
    for t in tensors:
        g = np.zeros_like(t.data)
        flat = t.data.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            f_plus = f()
            flat[i] = orig - h
            f_minus = f()
            flat[i] = orig
            gflat[i] = (f_plus - f_minus) / (2.0 * h)
        grads.append(g)
    return grads


def max_relative_error(analytic, numeric):
    """max |analytic - numeric| / max(1, |analytic|) over all entries."""
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(1.0, np.abs(a))
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def check_gradients(build_loss, params, rtol=1e-4, h=1e-5):
    """Assert autodiff gradients match central differences.

    `build_loss` rebuilds the scalar loss Tensor from the current parameter
    data on every call, so the finite-difference probe stays independent of
    the recorded graph.
    """
    for p in params:
        p.grad = None
    build_loss().backward()
    analytic = [np.zeros_like(p.data) if p.grad is None else p.grad.copy()
                for p in params]
    numeric = finite_difference_grads(lambda: float(build_loss().data), params, h=h)
    err = max_relative_error(analytic, numeric)
    assert err <= rtol, f"gradient mismatch: relative error {err:.3e} > {rtol}"
    return err


def rng_param(shape, rng, lo=-1.5, hi=1.5) -> Tensor:
    return Tensor(rng.uniform(lo, hi, size=shape), requires_grad=True)
