"""Minimal reverse-mode automatic differentiation over numpy arrays.

A ``Tensor`` wraps a float64 ndarray and records the operations applied to
it.  Calling :meth:`Tensor.backward` on a scalar result walks the recorded
graph in reverse topological order and accumulates gradients into every
tensor created with ``requires_grad=True``.

Only the operations needed by the logic layers, the boundary predicates and
the small critic networks are implemented.  Broadcasting follows numpy
semantics; gradients of broadcast operands are summed back to the original
shape.
"""

from __future__ import annotations

import contextlib
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NumericError
from . import kernels

_grad_enabled = True


@contextlib.contextmanager
def no_grad():
    """Disable graph recording inside the context (cheap inference passes)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum `grad` over the axes that numpy broadcasting introduced."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[np.ndarray], None] | None = None

    # -- graph plumbing ----------------------------------------------------

    @staticmethod
    def _lift(value) -> "Tensor":
        return value if isinstance(value, Tensor) else Tensor(value)

    @classmethod
    def _result(cls, data, parents: Sequence["Tensor"],
                backward: Callable[[np.ndarray], None]) -> "Tensor":
        out = cls(data)
        if _grad_enabled and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        return out

    def _accumulate(self, grad: np.ndarray) -> None:
        if not np.all(np.isfinite(grad)):
            raise NumericError("non-finite gradient surfaced during backward")
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += grad

    def backward(self, grad=None) -> None:
        """Backpropagate from this tensor (scalar unless `grad` is given)."""
        if grad is None:
            if self.data.size != 1:
                raise ValueError("backward() without grad requires a scalar tensor")
            grad = np.ones_like(self.data)
        else:
            grad = np.asarray(grad, dtype=np.float64)

        topo: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if p.requires_grad and id(p) not in seen:
                    stack.append((p, False))

        grads: dict[int, np.ndarray] = {id(self): grad}
        for node in reversed(topo):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node._backward is None:
                node._accumulate(g)
            else:
                node._backward(g, grads)

    # -- basic arithmetic --------------------------------------------------

    def __add__(self, other):
        other = self._lift(other)
        a, b = self, other

        def backward(g, sink):
            if a.requires_grad:
                _sink_add(sink, a, _unbroadcast(g, a.data.shape))
            if b.requires_grad:
                _sink_add(sink, b, _unbroadcast(g, b.data.shape))

        return self._result(a.data + b.data, (a, b), backward)

    __radd__ = __add__

    def __mul__(self, other):
        other = self._lift(other)
        a, b = self, other

        def backward(g, sink):
            if a.requires_grad:
                _sink_add(sink, a, _unbroadcast(g * b.data, a.data.shape))
            if b.requires_grad:
                _sink_add(sink, b, _unbroadcast(g * a.data, b.data.shape))

        return self._result(a.data * b.data, (a, b), backward)

    __rmul__ = __mul__

    def __neg__(self):
        a = self

        def backward(g, sink):
            _sink_add(sink, a, -g)

        return self._result(-a.data, (a,), backward)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __truediv__(self, other):
        other = self._lift(other)
        a, b = self, other

        def backward(g, sink):
            if a.requires_grad:
                _sink_add(sink, a, _unbroadcast(g / b.data, a.data.shape))
            if b.requires_grad:
                _sink_add(sink, b, _unbroadcast(-g * a.data / (b.data * b.data),
                                                b.data.shape))

        return self._result(a.data / b.data, (a, b), backward)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __matmul__(self, other):
        other = self._lift(other)
        a, b = self, other

        def backward(g, sink):
            if a.requires_grad:
                _sink_add(sink, a, g @ b.data.T)
            if b.requires_grad:
                _sink_add(sink, b, a.data.T @ g)

        return self._result(a.data @ b.data, (a, b), backward)

    def __pow__(self, exponent: float):
        a = self
        e = float(exponent)

        def backward(g, sink):
            _sink_add(sink, a, g * e * np.power(a.data, e - 1.0))

        return self._result(np.power(a.data, e), (a,), backward)

    # -- reductions ----------------------------------------------------------

    def sum(self, axis=None, keepdims: bool = False):
        a = self

        def backward(g, sink):
            g_arr = np.asarray(g)
            if axis is not None and not keepdims:
                g_arr = np.expand_dims(g_arr, axis)
            _sink_add(sink, a, np.broadcast_to(g_arr, a.data.shape).copy())

        return self._result(a.data.sum(axis=axis, keepdims=keepdims), (a,), backward)

    def mean(self, axis=None, keepdims: bool = False):
        count = self.data.size if axis is None else self.data.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    # -- elementwise nonlinearities -------------------------------------------

    def exp(self):
        a = self
        out_data = np.exp(a.data)

        def backward(g, sink):
            _sink_add(sink, a, g * out_data)

        return self._result(out_data, (a,), backward)

    def log(self):
        a = self

        def backward(g, sink):
            _sink_add(sink, a, g / a.data)

        return self._result(np.log(a.data), (a,), backward)

    def sigmoid(self):
        a = self
        out_data = _sigmoid(a.data)

        def backward(g, sink):
            _sink_add(sink, a, g * out_data * (1.0 - out_data))

        return self._result(out_data, (a,), backward)

    def relu(self):
        a = self
        mask = a.data > 0.0

        def backward(g, sink):
            _sink_add(sink, a, g * mask)

        return self._result(a.data * mask, (a,), backward)

    def tanh(self):
        a = self
        out_data = np.tanh(a.data)

        def backward(g, sink):
            _sink_add(sink, a, g * (1.0 - out_data * out_data))

        return self._result(out_data, (a,), backward)

    def clip(self, lo: float, hi: float):
        """Clamp values; gradient passes through only where not clipped."""
        a = self
        mask = (a.data >= lo) & (a.data <= hi)

        def backward(g, sink):
            _sink_add(sink, a, g * mask)

        return self._result(np.clip(a.data, lo, hi), (a,), backward)

    # -- shape ops -------------------------------------------------------------

    def reshape(self, *shape):
        a = self
        old_shape = a.data.shape

        def backward(g, sink):
            _sink_add(sink, a, g.reshape(old_shape))

        return self._result(a.data.reshape(*shape), (a,), backward)

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    # -- misc -------------------------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    def item(self) -> float:
        return float(self.data)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"


def _sink_add(sink: dict[int, np.ndarray], t: Tensor, g: np.ndarray) -> None:
    key = id(t)
    if key in sink:
        sink[key] = sink[key] + g
    else:
        sink[key] = g


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def sigmoid(x) -> Tensor:
    return Tensor._lift(x).sigmoid()


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = [Tensor._lift(t) for t in tensors]
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward(g, sink):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            if t.requires_grad:
                index = [slice(None)] * g.ndim
                index[axis] = slice(lo, hi)
                _sink_add(sink, t, g[tuple(index)])

    return Tensor._result(np.concatenate([t.data for t in tensors], axis=axis),
                          tensors, backward)


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = [Tensor._lift(t) for t in tensors]

    def backward(g, sink):
        for i, t in enumerate(tensors):
            if t.requires_grad:
                _sink_add(sink, t, np.take(g, i, axis=axis))

    return Tensor._result(np.stack([t.data for t in tensors], axis=axis),
                          tensors, backward)


def minimum(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise minimum; ties route the gradient to the first argument."""
    a = Tensor._lift(a)
    b = Tensor._lift(b)
    take_a = a.data <= b.data

    def backward(g, sink):
        if a.requires_grad:
            _sink_add(sink, a, _unbroadcast(g * take_a, a.data.shape))
        if b.requires_grad:
            _sink_add(sink, b, _unbroadcast(g * ~take_a, b.data.shape))

    return Tensor._result(np.minimum(a.data, b.data), (a, b), backward)


def fuzzy_conj(x: Tensor, m: Tensor) -> Tensor:
    """Soft conjunction of input columns under membership gates.

    `x` has shape (batch, n_in), `m` shape (n_out, n_in); the result
    (batch, n_out) holds the product of `1 - m*(1 - x)` terms per row.
    """
    x = Tensor._lift(x)
    m = Tensor._lift(m)
    x_arr = np.ascontiguousarray(x.data)
    m_arr = np.ascontiguousarray(m.data)
    out_data = kernels.conj_forward(x_arr, m_arr)

    def backward(g, sink):
        gx, gm = kernels.conj_backward(x_arr, m_arr, out_data,
                                       np.ascontiguousarray(g))
        if x.requires_grad:
            _sink_add(sink, x, gx)
        if m.requires_grad:
            _sink_add(sink, m, gm)

    return Tensor._result(out_data, (x, m), backward)


def fuzzy_disj(x: Tensor, m: Tensor) -> Tensor:
    """Soft disjunction: 1 - prod(1 - m*x) over the last axis.

    `x` has shape (batch, n_in), `m` shape (n_in,); returns (batch,).
    """
    x = Tensor._lift(x)
    m = Tensor._lift(m)
    x_arr = np.ascontiguousarray(x.data)
    m_arr = np.ascontiguousarray(m.data)
    out_data = kernels.disj_forward(x_arr, m_arr)

    def backward(g, sink):
        gx, gm = kernels.disj_backward(x_arr, m_arr, out_data,
                                       np.ascontiguousarray(g))
        if x.requires_grad:
            _sink_add(sink, x, gx)
        if m.requires_grad:
            _sink_add(sink, m, gm)

    return Tensor._result(out_data, (x, m), backward)


def parameters_of(*groups: Iterable[Tensor]) -> list[Tensor]:
    """Flatten parameter iterables, keeping order and dropping duplicates."""
    seen: set[int] = set()
    flat: list[Tensor] = []
    for group in groups:
        for p in group:
            if id(p) not in seen:
                seen.add(id(p))
                flat.append(p)
    return flat
