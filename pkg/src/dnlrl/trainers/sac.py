"""Discrete soft actor-critic driving the rule-network policy.

The actor is the DnlPolicy (rule weights plus predicate bounds); the twin
critics are generic multilayer networks over the raw state.  Expectations
over the discrete action set are taken in closed form, so no
reparameterisation is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import autograd
from ..autograd import Tensor
from ..errors import NumericError
from ..nets import Mlp
from ..optim import Adam
from ..policy import DnlPolicy, sample_action
from ..replay import Batch, ReplayBuffer, Transition
from .base import Trainer, entropy_of, pack_tensors, unpack_tensors


@dataclass
class SacConfig:
    gamma: float = 0.99
    alpha: float = 0.2
    tau: float = 0.005
    batch_size: int = 64
    lr_actor: float = 1e-3
    lr_critic: float = 3e-4
    replay_capacity: int = 100_000
    warmup_steps: int = 1000
    update_every: int = 1
    target_update_every: int = 1
    hidden: tuple[int, ...] = (64, 64)
    auto_alpha: bool = False
    target_entropy_scale: float = 0.98


def critic_targets(batch: Batch, q1_target: Mlp, q2_target: Mlp,
                   policy: DnlPolicy, alpha: float, gamma: float) -> np.ndarray:
    """Soft Bellman backup: r + gamma * (1-done) * E_a[minQ' - alpha*log pi]."""
    with autograd.no_grad():
        probs = policy.forward(batch.s_next).probs.data
        q1 = q1_target(batch.s_next).data
        q2 = q2_target(batch.s_next).data
    q_min = np.minimum(q1, q2)
    log_probs = np.log(probs)
    soft_value = (probs * (q_min - alpha * log_probs)).sum(axis=1)
    return batch.r + gamma * (1.0 - batch.done) * soft_value


def actor_loss(states: np.ndarray, policy: DnlPolicy, q1: Mlp, q2: Mlp,
               alpha) -> tuple[Tensor, dict]:
    """Closed-form expectation of alpha*log pi - minQ under the policy."""
    with autograd.no_grad():
        q_min = np.minimum(q1(states).data, q2(states).data)
    out = policy.forward(states)
    log_probs = out.probs.log()
    inner = out.probs * (log_probs * alpha - q_min)
    loss = inner.sum(axis=1).mean()
    metrics = {"entropy": entropy_of(out.probs.data)}
    return loss, metrics


class SacTrainer(Trainer):
    def __init__(self, policy: DnlPolicy, state_dim: int, cfg: SacConfig, rng):
        self.policy = policy
        self.cfg = cfg
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        n_actions = policy.n_actions
        sizes = [state_dim, *cfg.hidden, n_actions]
        self.q1 = Mlp(sizes, self.rng)
        self.q2 = Mlp(sizes, self.rng)
        self.q1_target = self.q1.clone()
        self.q2_target = self.q2.clone()
        self.replay = ReplayBuffer(cfg.replay_capacity, state_dim, self.rng)
        self.opt_actor = Adam(policy.parameters(), lr=cfg.lr_actor)
        self.opt_critic = Adam(self.q1.parameters() + self.q2.parameters(),
                               lr=cfg.lr_critic)
        self.log_alpha = Tensor(np.array(math.log(cfg.alpha)), requires_grad=True)
        self.opt_alpha = Adam([self.log_alpha], lr=cfg.lr_critic)
        self.target_entropy = cfg.target_entropy_scale * math.log(n_actions)
        self.steps = 0
        self.updates = 0

    @property
    def alpha(self) -> float:
        if self.cfg.auto_alpha:
            return float(np.exp(self.log_alpha.data))
        return self.cfg.alpha

    def act(self, state, greedy: bool = False) -> int:
        dist = self.policy.distribution(np.asarray(state)[None, :])[0]
        return sample_action(dist, self.rng, greedy=greedy)

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
        alpha = self.alpha

        # critic regression toward the soft Bellman targets
        y = critic_targets(batch, self.q1_target, self.q2_target,
                           self.policy, alpha, cfg.gamma)
        onehot = np.zeros((len(batch.a), self.policy.n_actions))
        onehot[np.arange(len(batch.a)), batch.a] = 1.0
        q1_a = (self.q1(batch.s) * onehot).sum(axis=1)
        q2_a = (self.q2(batch.s) * onehot).sum(axis=1)
        critic_mse = ((q1_a - y) ** 2.0).mean() + ((q2_a - y) ** 2.0).mean()
        if not np.isfinite(critic_mse.data):
            raise NumericError("critic loss is not finite; aborting update")
        self.opt_critic.zero_grad()
        critic_mse.backward()
        self.opt_critic.step()

        # actor step on the closed-form objective
        loss, metrics = actor_loss(batch.s, self.policy, self.q1, self.q2, alpha)
        if not np.isfinite(loss.data):
            raise NumericError("actor loss is not finite; aborting update")
        self.opt_actor.zero_grad()
        loss.backward()
        self.opt_actor.step()

        if cfg.auto_alpha:
            with autograd.no_grad():
                probs = self.policy.forward(batch.s).probs.data
            log_probs = np.log(np.clip(probs, 1e-12, 1.0))
            coeff = (probs * (log_probs + self.target_entropy)).sum(axis=1).mean()
            alpha_loss = self.log_alpha * (-coeff)
            self.opt_alpha.zero_grad()
            alpha_loss.backward()
            self.opt_alpha.step()

        self.updates += 1
        if self.updates % cfg.target_update_every == 0:
            self.q1_target.copy_from(self.q1, cfg.tau)
            self.q2_target.copy_from(self.q2, cfg.tau)

        return {
            "critic_loss": float(critic_mse.data),
            "actor_loss": float(loss.data),
            "entropy": metrics["entropy"],
            "alpha": alpha,
        }

    # -- checkpointing -----------------------------------------------------

    def state_arrays(self) -> dict[str, np.ndarray]:
        arrays = {}
        arrays.update(pack_tensors("q1_", self.q1.parameters()))
        arrays.update(pack_tensors("q2_", self.q2.parameters()))
        arrays.update(pack_tensors("q1t_", self.q1_target.parameters()))
        arrays.update(pack_tensors("q2t_", self.q2_target.parameters()))
        arrays["log_alpha"] = self.log_alpha.data
        arrays["counters"] = np.array([self.steps, self.updates], dtype=np.int64)
        for key, value in self.opt_actor.state_arrays().items():
            arrays[f"opta_{key}"] = value
        for key, value in self.opt_critic.state_arrays().items():
            arrays[f"optc_{key}"] = value
        for key, value in self.replay.state_arrays().items():
            arrays[f"replay_{key}"] = value
        return arrays

    def load_state_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        unpack_tensors("q1_", self.q1.parameters(), arrays)
        unpack_tensors("q2_", self.q2.parameters(), arrays)
        unpack_tensors("q1t_", self.q1_target.parameters(), arrays)
        unpack_tensors("q2t_", self.q2_target.parameters(), arrays)
        self.log_alpha.data[...] = arrays["log_alpha"]
        self.steps, self.updates = (int(v) for v in arrays["counters"])
        self.opt_actor.load_state_arrays(
            {k[5:]: v for k, v in arrays.items() if k.startswith("opta_")})
        self.opt_critic.load_state_arrays(
            {k[5:]: v for k, v in arrays.items() if k.startswith("optc_")})
        self.replay.load_state_arrays(
            {k[7:]: v for k, v in arrays.items() if k.startswith("replay_")})
