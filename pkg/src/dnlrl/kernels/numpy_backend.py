"""Pure-numpy reference kernels for the fuzzy logic layers.

These mirror the compiled kernels in ``_fastcore.pyx`` and serve as the
fallback when the extension is unavailable (and as the ground truth for the
backend equivalence tests).
"""

import numpy as np


def conj_forward(x: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Product over inputs of ``1 - m*(1 - x)``.

    x: (batch, n_in), m: (n_out, n_in) -> (batch, n_out)
    """
    terms = 1.0 - m[None, :, :] * (1.0 - x[:, None, :])
    return terms.prod(axis=2)


def conj_backward(x, m, out, grad_out):
    terms = 1.0 - m[None, :, :] * (1.0 - x[:, None, :])
    grad_terms = _product_term_grads(terms) * grad_out[:, :, None]
    gx = (grad_terms * m[None, :, :]).sum(axis=1)
    gm = -(grad_terms * (1.0 - x[:, None, :])).sum(axis=0)
    return gx, gm


def disj_forward(x: np.ndarray, m: np.ndarray) -> np.ndarray:
    """``1 - prod(1 - m*x)`` over the last axis.

    x: (batch, n_in), m: (n_in,) -> (batch,)
    """
    return 1.0 - (1.0 - m[None, :] * x).prod(axis=1)


def disj_backward(x, m, out, grad_out):
    # out = 1 - prod(q), q = 1 - m*x: the two inner minus signs cancel, so
    # dL/dx = g * prod_{k!=j}(q) * m and dL/dm = sum_i g * prod * x.
    terms = 1.0 - m[None, :] * x
    grad_terms = _product_term_grads(terms[:, None, :])[:, 0, :] * grad_out[:, None]
    gx = grad_terms * m[None, :]
    gm = (grad_terms * x).sum(axis=0)
    return gx, gm


def _product_term_grads(terms: np.ndarray) -> np.ndarray:
    """d(prod terms)/d(term_i) along the last axis, robust to zero terms."""
    zero = terms == 0.0
    n_zero = zero.sum(axis=-1, keepdims=True)
    safe = np.where(zero, 1.0, terms)
    prod_nonzero = safe.prod(axis=-1, keepdims=True)
    # No zero term: prod / term_i.  One zero term: the product of the others
    # survives only at that position.  Two or more zeros: every grad is zero.
    grads = np.where(n_zero == 0, prod_nonzero / safe, 0.0)
    grads = np.where((n_zero == 1) & zero, prod_nonzero, grads)
    return grads
