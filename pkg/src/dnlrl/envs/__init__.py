"""Built-in control environments."""

from .base import StepResult
from .cartpole import CartPoleEnv
from .lander import LanderEnv

ENVIRONMENTS = {
    "cartpole": CartPoleEnv,
    "lander": LanderEnv,
}


def make_env(name: str, rng=None, max_steps: int | None = None):
    cls = ENVIRONMENTS.get(name.lower())
    if cls is None:
        raise ValueError(f"unknown environment {name!r}; known: {sorted(ENVIRONMENTS)}")
    kwargs = {}
    if max_steps is not None:
        kwargs["max_steps"] = max_steps
    return cls(rng=rng, **kwargs)


__all__ = ["CartPoleEnv", "LanderEnv", "StepResult", "ENVIRONMENTS", "make_env"]
