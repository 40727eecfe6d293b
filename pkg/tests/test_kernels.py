"""Backend equivalence: compiled kernels must match the numpy reference."""

import numpy as np
import pytest

from dnlrl.kernels import numpy_backend

fastcore = pytest.importorskip(
    "dnlrl.kernels._fastcore", reason="compiled kernels not built")


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def _random_case(rng, b=5, n_in=9, n_out=3):
    x = rng.uniform(0.0, 1.0, (b, n_in))
    m = rng.uniform(0.0, 1.0, (n_out, n_in))
    md = rng.uniform(0.0, 1.0, n_in)
    return x, m, md


def test_conj_forward_backward_match(rng):
    for _ in range(20):
        x, m, _ = _random_case(rng)
        out_np = numpy_backend.conj_forward(x, m)
        out_cy = fastcore.conj_forward(x, m)
        np.testing.assert_allclose(out_cy, out_np, rtol=1e-12, atol=1e-15)
        g = rng.normal(size=out_np.shape)
        gx_np, gm_np = numpy_backend.conj_backward(x, m, out_np, g)
        gx_cy, gm_cy = fastcore.conj_backward(x, m, out_cy, g)
        np.testing.assert_allclose(gx_cy, gx_np, rtol=1e-11, atol=1e-14)
        np.testing.assert_allclose(gm_cy, gm_np, rtol=1e-11, atol=1e-14)


def test_disj_forward_backward_match(rng):
    for _ in range(20):
        x, _, md = _random_case(rng)
        out_np = numpy_backend.disj_forward(x, md)
        out_cy = fastcore.disj_forward(x, md)
        np.testing.assert_allclose(out_cy, out_np, rtol=1e-12, atol=1e-15)
        g = rng.normal(size=out_np.shape)
        gx_np, gm_np = numpy_backend.disj_backward(x, md, out_np, g)
        gx_cy, gm_cy = fastcore.disj_backward(x, md, out_cy, g)
        np.testing.assert_allclose(gx_cy, gx_np, rtol=1e-11, atol=1e-14)
        np.testing.assert_allclose(gm_cy, gm_np, rtol=1e-11, atol=1e-14)


def test_zero_terms_are_handled_identically():
    # m = 1 with x = 0 makes a conjunction term exactly zero; gradients must
    # stay finite and equal across backends
    x = np.array([[0.0, 1.0, 0.5], [0.0, 0.0, 1.0]])
    m = np.array([[1.0, 1.0, 1.0], [1.0, 0.0, 0.5]])
    out_np = numpy_backend.conj_forward(x, m)
    out_cy = fastcore.conj_forward(x, m)
    np.testing.assert_array_equal(out_cy, out_np)
    g = np.ones_like(out_np)
    for backend in (numpy_backend, fastcore):
        gx, gm = backend.conj_backward(x, m, out_np, g)
        assert np.all(np.isfinite(gx)) and np.all(np.isfinite(gm))
    gx_np, gm_np = numpy_backend.conj_backward(x, m, out_np, g)
    gx_cy, gm_cy = fastcore.conj_backward(x, m, out_cy, g)
    np.testing.assert_array_equal(gx_cy, gx_np)
    np.testing.assert_array_equal(gm_cy, gm_np)

    # disjunction: m = 1 with x = 1 zeroes a term
    xd = np.array([[1.0, 0.0], [1.0, 1.0]])
    md = np.array([1.0, 1.0])
    out_np = numpy_backend.disj_forward(xd, md)
    out_cy = fastcore.disj_forward(xd, md)
    np.testing.assert_array_equal(out_cy, out_np)
    gd = np.ones_like(out_np)
    gx_np, gm_np = numpy_backend.disj_backward(xd, md, out_np, gd)
    gx_cy, gm_cy = fastcore.disj_backward(xd, md, out_cy, gd)
    np.testing.assert_array_equal(gx_cy, gx_np)
    np.testing.assert_array_equal(gm_cy, gm_np)


def test_selected_backend_exposed():
    import dnlrl.kernels as k

    assert k.backend_name() in ("cython", "python")
    assert callable(k.conj_forward)
