"""Differentiable fuzzy-Boolean logic layers.

An action's rule network cascades a bank of conjunction neurons into a
single disjunction neuron.  Raw weights are squashed to membership values
in (0, 1) by a sharpened sigmoid; a membership near one includes the
corresponding literal (conjunction) or rule (disjunction).
"""

from __future__ import annotations

import numpy as np

from . import autograd
from .autograd import Tensor
from .errors import DimensionMismatchError
from . import kernels

# Raw weights pass through sigmoid(c * w); steeper c saturates faster.
DEFAULT_MEMBERSHIP_SHARPNESS = 6.0
# Negative-mean init keeps initial memberships near zero so the product
# terms start near one and gradients do not vanish.
DEFAULT_INIT_MEAN = -1.0
DEFAULT_INIT_STD = 0.25
# Memberships are clamped away from {0, 1} to avoid zero-gradient lock.
MEMBERSHIP_EPS = 1e-7

_RANGE_TOL = 1e-9


def _check_row(x, m, op: str) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    m = np.asarray(m, dtype=np.float64)
    if x.ndim != 1 or m.ndim != 1:
        raise DimensionMismatchError(f"{op} expects 1-D operands")
    if x.shape[0] != m.shape[0]:
        raise DimensionMismatchError(
            f"{op}: input length {x.shape[0]} != membership length {m.shape[0]}")
    if np.any(x < -_RANGE_TOL) or np.any(x > 1.0 + _RANGE_TOL):
        raise ValueError(f"{op}: inputs must lie in [0, 1]")
    return x, m


def neural_conjunction(x, m) -> float:
    """Soft AND of the literals gated in by membership values.

    Returns ``prod_i(1 - m_i * (1 - x_i))``; a zero membership drops the
    literal, a membership of one requires it.
    """
    x, m = _check_row(x, m, "neural_conjunction")
    return float(kernels.conj_forward(x[None, :], m[None, :])[0, 0])


def neural_disjunction(x, m) -> float:
    """Soft OR: ``1 - prod_i(1 - m_i * x_i)``."""
    x, m = _check_row(x, m, "neural_disjunction")
    return float(kernels.disj_forward(x[None, :], m)[0])


def init_weights(n_p: int, n_e: int, rng,
                 mean: float = DEFAULT_INIT_MEAN,
                 std: float = DEFAULT_INIT_STD) -> tuple[np.ndarray, np.ndarray]:
    """Draw raw conjunction (n_p, n_e) and disjunction (n_p,) weights.

    Gaussian with negative mean, so initial memberships sit below 0.5.
    `rng` is a numpy Generator or an integer seed.
    """
    if n_p < 1 or n_e < 1:
        raise ValueError("n_p and n_e must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    w_conj = rng.normal(mean, std, size=(n_p, n_e))
    w_disj = rng.normal(mean, std, size=n_p)
    return w_conj, w_disj


class DnlNetwork:
    """Rule network for one action: n_p conjunction neurons, one disjunction.

    Trainable state is the raw weight matrices; `forward` maps a batch of
    fuzzy input rows (batch, n_e) to one truth value per row.
    """

    def __init__(self, n_e: int, n_p: int, rng,
                 sharpness: float = DEFAULT_MEMBERSHIP_SHARPNESS,
                 init_mean: float = DEFAULT_INIT_MEAN,
                 init_std: float = DEFAULT_INIT_STD):
        w_conj, w_disj = init_weights(n_p, n_e, rng, init_mean, init_std)
        self.n_e = n_e
        self.n_p = n_p
        self.sharpness = float(sharpness)
        self.w_conj = Tensor(w_conj, requires_grad=True)
        self.w_disj = Tensor(w_disj, requires_grad=True)

    def parameters(self) -> list[Tensor]:
        return [self.w_conj, self.w_disj]

    def memberships(self) -> tuple[Tensor, Tensor]:
        """Sigmoid-squashed weights, clamped away from 0 and 1."""
        mc = (self.w_conj * self.sharpness).sigmoid().clip(MEMBERSHIP_EPS,
                                                           1.0 - MEMBERSHIP_EPS)
        md = (self.w_disj * self.sharpness).sigmoid().clip(MEMBERSHIP_EPS,
                                                           1.0 - MEMBERSHIP_EPS)
        return mc, md

    def membership_values(self) -> tuple[np.ndarray, np.ndarray]:
        """Current membership matrices as plain arrays (read-only use)."""
        with autograd.no_grad():
            mc, md = self.memberships()
        return mc.data.copy(), md.data.copy()

    def forward(self, inputs: Tensor) -> Tensor:
        inputs = Tensor._lift(inputs)
        if inputs.data.ndim != 2 or inputs.data.shape[1] != self.n_e:
            raise DimensionMismatchError(
                f"expected input of shape (batch, {self.n_e}), got {inputs.data.shape}")
        mc, md = self.memberships()
        hidden = autograd.fuzzy_conj(inputs, mc)
        return autograd.fuzzy_disj(hidden, md)

    def __call__(self, inputs: Tensor) -> Tensor:
        return self.forward(inputs)


def forward_action_predicate(rows, network: DnlNetwork) -> np.ndarray:
    """Evaluate the network on fuzzy rows without tracking gradients.

    Accepts one row (n_e,) or a batch (b, n_e); returns matching shape.
    """
    rows = np.asarray(rows, dtype=np.float64)
    single = rows.ndim == 1
    if single:
        rows = rows[None, :]
    with autograd.no_grad():
        out = network.forward(Tensor(rows)).data
    return float(out[0]) if single else out
