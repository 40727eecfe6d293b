"""Common trainer interface so the experiment harness can swap algorithms."""

from __future__ import annotations

import numpy as np

from ..autograd import Tensor


class Trainer:
    """observe / update / act surface shared by every algorithm.

    `observe` receives each transition as it happens; `update` is called once
    per environment step and returns a metrics dict when it did work, else
    None.  `act` maps a raw state to an action index.
    """

    # set by subclasses that train an interpretable rule policy
    policy = None

    def act(self, state, greedy: bool = False) -> int:
        raise NotImplementedError

    def observe(self, s, a: int, r: float, s_next, done: bool,
                truncated: bool = False) -> None:
        raise NotImplementedError

    def update(self) -> dict | None:
        raise NotImplementedError

    def state_arrays(self) -> dict[str, np.ndarray]:
        """Every array needed to resume training exactly."""
        raise NotImplementedError

    def load_state_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        raise NotImplementedError


def pack_tensors(prefix: str, tensors: list[Tensor]) -> dict[str, np.ndarray]:
    return {f"{prefix}{i}": t.data for i, t in enumerate(tensors)}

def unpack_tensors(prefix: str, tensors: list[Tensor],
                   arrays: dict[str, np.ndarray]) -> None:
    for i, t in enumerate(tensors):
        t.data[...] = arrays[f"{prefix}{i}"]


def entropy_of(probs: np.ndarray) -> float:
    p = np.clip(probs, 1e-12, 1.0)
    return float(-(p * np.log(p)).sum(axis=-1).mean())
