"""Monte-Carlo policy gradient over the rule-network policy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..optim import Adam
from ..policy import DnlPolicy, sample_action
from .base import Trainer, entropy_of, pack_tensors, unpack_tensors


@dataclass
class ReinforceConfig:
    gamma: float = 0.99
    lr: float = 1e-3


class ReinforceTrainer(Trainer):
    def __init__(self, policy: DnlPolicy, state_dim: int, cfg: ReinforceConfig, rng):
        self.policy = policy
        self.cfg = cfg
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        self.opt = Adam(policy.parameters(), lr=cfg.lr)
        self._states: list[np.ndarray] = []
        self._actions: list[int] = []
        self._rewards: list[float] = []
        self._episode_over = False

    def act(self, state, greedy: bool = False) -> int:
        dist = self.policy.distribution(np.asarray(state)[None, :])[0]
        return sample_action(dist, self.rng, greedy=greedy)

    def observe(self, s, a, r, s_next, done, truncated=False) -> None:
        self._states.append(np.asarray(s, dtype=np.float64))
        self._actions.append(int(a))
        self._rewards.append(float(r))
        self._episode_over = done or truncated

    def update(self) -> dict | None:
        if not self._episode_over:
            return None
        states = np.stack(self._states)
        actions = np.asarray(self._actions)
        returns = self._returns_to_go(np.asarray(self._rewards))
        self._states.clear()
        self._actions.clear()
        self._rewards.clear()
        self._episode_over = False

        out = self.policy.forward(states)
        onehot = np.zeros((len(actions), self.policy.n_actions))
        onehot[np.arange(len(actions)), actions] = 1.0
        log_pi = (out.probs.log() * onehot).sum(axis=1)
        loss = -(log_pi * returns).mean()
        self.opt.zero_grad()
        loss.backward()
        self.opt.step()
        return {
            "actor_loss": float(loss.data),
            "entropy": entropy_of(out.probs.data),
        }

    def _returns_to_go(self, rewards: np.ndarray) -> np.ndarray:
        returns = np.empty_like(rewards)
        acc = 0.0
        for t in range(len(rewards) - 1, -1, -1):
            acc = rewards[t] + self.cfg.gamma * acc
            returns[t] = acc
        return returns

    def state_arrays(self) -> dict[str, np.ndarray]:
        arrays = {}
        for key, value in self.opt.state_arrays().items():
            arrays[f"opt_{key}"] = value
        return arrays

    def load_state_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        self.opt.load_state_arrays(
            {k[4:]: v for k, v in arrays.items() if k.startswith("opt_")})
