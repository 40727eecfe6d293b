"""Advantage actor-critic with n-step rollouts on the rule-network policy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import autograd
from ..nets import Mlp
from ..optim import Adam
from ..policy import DnlPolicy, sample_action
from .base import Trainer, entropy_of, pack_tensors, unpack_tensors


@dataclass
class A2cConfig:
    gamma: float = 0.99
    lr_actor: float = 1e-3
    lr_critic: float = 3e-4
    rollout_steps: int = 32
    entropy_coef: float = 0.0
    hidden: tuple[int, ...] = (64, 64)


class A2cTrainer(Trainer):
    def __init__(self, policy: DnlPolicy, state_dim: int, cfg: A2cConfig, rng):
        self.policy = policy
        self.cfg = cfg
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        self.value = Mlp([state_dim, *cfg.hidden, 1], self.rng)
        self.opt_actor = Adam(policy.parameters(), lr=cfg.lr_actor)
        self.opt_critic = Adam(self.value.parameters(), lr=cfg.lr_critic)
        self._states: list[np.ndarray] = []
        self._actions: list[int] = []
        self._rewards: list[float] = []
        self._last_next: np.ndarray | None = None
        self._last_done = False
        self._flush = False

    def act(self, state, greedy: bool = False) -> int:
        dist = self.policy.distribution(np.asarray(state)[None, :])[0]
        return sample_action(dist, self.rng, greedy=greedy)

    def observe(self, s, a, r, s_next, done, truncated=False) -> None:
        self._states.append(np.asarray(s, dtype=np.float64))
        self._actions.append(int(a))
        self._rewards.append(float(r))
        self._last_next = np.asarray(s_next, dtype=np.float64)
        self._last_done = done
        self._flush = done or truncated or len(self._states) >= self.cfg.rollout_steps

    def update(self) -> dict | None:
        if not self._flush or not self._states:
            return None
        cfg = self.cfg
        states = np.stack(self._states)
        actions = np.asarray(self._actions)
        rewards = np.asarray(self._rewards)
        with autograd.no_grad():
            bootstrap = float(self.value(self._last_next[None, :]).data[0, 0])
        acc = 0.0 if self._last_done else bootstrap
        returns = np.empty_like(rewards)
        for t in range(len(rewards) - 1, -1, -1):
            acc = rewards[t] + cfg.gamma * acc
            returns[t] = acc
        self._states.clear()
        self._actions.clear()
        self._rewards.clear()
        self._flush = False

        values = self.value(states).reshape(-1)
        advantages = returns - values.data
        critic_loss = ((values - returns) ** 2.0).mean()
        self.opt_critic.zero_grad()
        critic_loss.backward()
        self.opt_critic.step()

        out = self.policy.forward(states)
        onehot = np.zeros((len(actions), self.policy.n_actions))
        onehot[np.arange(len(actions)), actions] = 1.0
        log_pi = (out.probs.log() * onehot).sum(axis=1)
        actor = -(log_pi * advantages).mean()
        if cfg.entropy_coef:
            neg_entropy = (out.probs * out.probs.log()).sum(axis=1).mean()
            actor = actor + neg_entropy * cfg.entropy_coef
        self.opt_actor.zero_grad()
        actor.backward()
        self.opt_actor.step()

        return {
            "actor_loss": float(actor.data),
            "critic_loss": float(critic_loss.data),
            "entropy": entropy_of(out.probs.data),
        }

    def state_arrays(self) -> dict[str, np.ndarray]:
        arrays = {}
        arrays.update(pack_tensors("v_", self.value.parameters()))
        for key, value in self.opt_actor.state_arrays().items():
            arrays[f"opta_{key}"] = value
        for key, value in self.opt_critic.state_arrays().items():
            arrays[f"optc_{key}"] = value
        return arrays

    def load_state_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        unpack_tensors("v_", self.value.parameters(), arrays)
        self.opt_actor.load_state_arrays(
            {k[5:]: v for k, v in arrays.items() if k.startswith("opta_")})
        self.opt_critic.load_state_arrays(
            {k[5:]: v for k, v in arrays.items() if k.startswith("optc_")})
