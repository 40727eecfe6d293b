"""Small fully connected networks used by the critics and baselines."""

from __future__ import annotations

import numpy as np

from .autograd import Tensor


class Mlp:
    """ReLU multilayer perceptron mapping (batch, in) -> (batch, out)."""

    def __init__(self, sizes: list[int], rng):
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        self.sizes = list(sizes)
        self.weights: list[Tensor] = []
        self.biases: list[Tensor] = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            scale = np.sqrt(2.0 / fan_in)
            self.weights.append(Tensor(rng.normal(0.0, scale, (fan_in, fan_out)),
                                       requires_grad=True))
            self.biases.append(Tensor(np.zeros(fan_out), requires_grad=True))

    def forward(self, x) -> Tensor:
        h = Tensor._lift(x)
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i != last:
                h = h.relu()
        return h

    __call__ = forward

    def parameters(self) -> list[Tensor]:
        return [*self.weights, *self.biases]

    def copy_from(self, other: "Mlp", tau: float = 1.0) -> None:
        """Polyak update: target <- tau * online + (1 - tau) * target."""
        for mine, theirs in zip(self.parameters(), other.parameters()):
            if tau >= 1.0:
                mine.data[...] = theirs.data
            else:
                mine.data *= 1.0 - tau
                mine.data += tau * theirs.data

    def clone(self) -> "Mlp":
        twin = Mlp.__new__(Mlp)
        twin.sizes = list(self.sizes)
        twin.weights = [Tensor(w.data.copy(), requires_grad=True) for w in self.weights]
        twin.biases = [Tensor(b.data.copy(), requires_grad=True) for b in self.biases]
        return twin
