"""Trainer registry."""

from .a2c import A2cConfig, A2cTrainer
from .base import Trainer
from .dqn import DqnConfig, DqnTrainer
from .reinforce import ReinforceConfig, ReinforceTrainer
from .sac import SacConfig, SacTrainer, actor_loss, critic_targets

TRAINER_CONFIGS = {
    "sac": SacConfig,
    "reinforce": ReinforceConfig,
    "dqn": DqnConfig,
    "a2c": A2cConfig,
}


def make_trainer(name: str, policy, state_dim: int, n_actions: int, cfg, rng) -> Trainer:
    name = name.lower()
    if name == "sac":
        return SacTrainer(policy, state_dim, cfg, rng)
    if name == "reinforce":
        return ReinforceTrainer(policy, state_dim, cfg, rng)
    if name == "dqn":
        return DqnTrainer(state_dim, n_actions, cfg, rng)
    if name == "a2c":
        return A2cTrainer(policy, state_dim, cfg, rng)
    raise ValueError(f"unknown trainer {name!r}")


__all__ = [
    "A2cConfig", "A2cTrainer", "DqnConfig", "DqnTrainer", "ReinforceConfig",
    "ReinforceTrainer", "SacConfig", "SacTrainer", "Trainer", "TRAINER_CONFIGS",
    "actor_loss", "critic_targets", "make_trainer",
]
