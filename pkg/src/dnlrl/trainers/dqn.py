"""Deep Q-network baseline: epsilon-greedy over a generic Q approximator.

A black-box baseline; it does not carry an interpretable rule policy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import autograd
from ..nets import Mlp
from ..optim import Adam
from ..replay import ReplayBuffer, Transition
from .base import Trainer, pack_tensors, unpack_tensors


@dataclass
class DqnConfig:
    gamma: float = 0.99
    lr: float = 1e-3
    batch_size: int = 64
    replay_capacity: int = 50_000
    warmup_steps: int = 1000
    update_every: int = 1
    target_sync_every: int = 500
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_decay_steps: int = 10_000
    hidden: tuple[int, ...] = (64, 64)


class DqnTrainer(Trainer):
    def __init__(self, state_dim: int, n_actions: int, cfg: DqnConfig, rng):
        self.cfg = cfg
        self.n_actions = n_actions
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        sizes = [state_dim, *cfg.hidden, n_actions]
        self.q = Mlp(sizes, self.rng)
        self.q_target = self.q.clone()
        self.replay = ReplayBuffer(cfg.replay_capacity, state_dim, self.rng)
        self.opt = Adam(self.q.parameters(), lr=cfg.lr)
        self.steps = 0
        self.updates = 0

    def epsilon(self) -> float:
        cfg = self.cfg
        frac = min(1.0, self.steps / max(1, cfg.eps_decay_steps))
        return cfg.eps_start + frac * (cfg.eps_end - cfg.eps_start)

    def act(self, state, greedy: bool = False) -> int:
        if not greedy and self.rng.random() < self.epsilon():
            return int(self.rng.integers(self.n_actions))
        with autograd.no_grad():
            q = self.q(np.asarray(state, dtype=np.float64)[None, :]).data[0]
        return int(np.argmax(q))

    def observe(self, s, a, r, s_next, done, truncated=False) -> None:
        self.replay.push(Transition(np.asarray(s, dtype=np.float64), int(a),
                                    float(r), np.asarray(s_next, dtype=np.float64),
                                    bool(done)))
        self.steps += 1

    def update(self) -> dict | None:
        cfg = self.cfg
        if len(self.replay) == 0:
            return {"skipped": 1.0}
        if len(self.replay) < max(cfg.batch_size, cfg.warmup_steps):
            return None
        if self.steps % cfg.update_every != 0:
            return None
        batch = self.replay.sample(cfg.batch_size)
        with autograd.no_grad():
            q_next = self.q_target(batch.s_next).data.max(axis=1)
        y = batch.r + cfg.gamma * (1.0 - batch.done) * q_next
        onehot = np.zeros((len(batch.a), self.n_actions))
        onehot[np.arange(len(batch.a)), batch.a] = 1.0
        q_a = (self.q(batch.s) * onehot).sum(axis=1)
        loss = ((q_a - y) ** 2.0).mean()
        self.opt.zero_grad()
        loss.backward()
        self.opt.step()
        self.updates += 1
        if self.updates % cfg.target_sync_every == 0:
            self.q_target.copy_from(self.q, tau=1.0)
        return {"critic_loss": float(loss.data), "epsilon": self.epsilon()}

    def state_arrays(self) -> dict[str, np.ndarray]:
        arrays = {}
        arrays.update(pack_tensors("q_", self.q.parameters()))
        arrays.update(pack_tensors("qt_", self.q_target.parameters()))
        arrays["counters"] = np.array([self.steps, self.updates], dtype=np.int64)
        for key, value in self.opt.state_arrays().items():
            arrays[f"opt_{key}"] = value
        for key, value in self.replay.state_arrays().items():
            arrays[f"replay_{key}"] = value
        return arrays

    def load_state_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        unpack_tensors("q_", self.q.parameters(), arrays)
        unpack_tensors("qt_", self.q_target.parameters(), arrays)
        self.steps, self.updates = (int(v) for v in arrays["counters"])
        self.opt.load_state_arrays(
            {k[4:]: v for k, v in arrays.items() if k.startswith("opt_")})
        self.replay.load_state_arrays(
            {k[7:]: v for k, v in arrays.items() if k.startswith("replay_")})
