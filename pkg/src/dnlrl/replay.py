"""Uniform experience replay with FIFO eviction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Transition:
    s: np.ndarray
    a: int
    r: float
    s_next: np.ndarray
    done: bool


@dataclass
class Batch:
    s: np.ndarray        # (n, state_dim)
    a: np.ndarray        # (n,) int
    r: np.ndarray        # (n,)
    s_next: np.ndarray   # (n, state_dim)
    done: np.ndarray     # (n,) float 0/1


class ReplayBuffer:
    def __init__(self, capacity: int, state_dim: int, rng=None):
        if capacity < 1:
            raise ValueError("replay capacity must be >= 1")
        self.capacity = int(capacity)
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        self.s = np.zeros((capacity, state_dim), dtype=np.float64)
        self.a = np.zeros(capacity, dtype=np.int64)
        self.r = np.zeros(capacity, dtype=np.float64)
        self.s_next = np.zeros((capacity, state_dim), dtype=np.float64)
        self.done = np.zeros(capacity, dtype=np.float64)
        self.pos = 0
        self.size = 0

    def push(self, t: Transition) -> None:
        i = self.pos
        self.s[i] = t.s
        self.a[i] = t.a
        self.r[i] = t.r
        self.s_next[i] = t.s_next
        self.done[i] = float(t.done)
        self.pos = (self.pos + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, n: int) -> Batch:
        idx = self.rng.integers(0, self.size, size=n)
        return Batch(s=self.s[idx], a=self.a[idx], r=self.r[idx],
                     s_next=self.s_next[idx], done=self.done[idx])

    def __len__(self) -> int:
        return self.size

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {
            "s": self.s, "a": self.a, "r": self.r, "s_next": self.s_next,
            "done": self.done,
            "cursor": np.array([self.pos, self.size], dtype=np.int64),
        }

    def load_state_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        self.s[...] = arrays["s"]
        self.a[...] = arrays["a"]
        self.r[...] = arrays["r"]
        self.s_next[...] = arrays["s_next"]
        self.done[...] = arrays["done"]
        self.pos, self.size = (int(v) for v in arrays["cursor"])
