"""Pole balancing on a cart, integrated from the classic nonlinear dynamics.

State: (cart position, cart velocity, pole angle, pole angular velocity).
Actions: 0 pushes left, 1 pushes right.  Reward is 1 per step; the episode
terminates when the cart leaves the track or the pole tips past 12 degrees,
and truncates at the step cap.
"""

from __future__ import annotations

import math

import numpy as np

from ..predicates import ContinuousFeature, FeatureSchema
from .base import StepResult

GRAVITY = 9.8
CART_MASS = 1.0
POLE_MASS = 0.1
TOTAL_MASS = CART_MASS + POLE_MASS
HALF_LENGTH = 0.5            # half the pole length
POLE_MASS_LENGTH = POLE_MASS * HALF_LENGTH
FORCE_MAG = 10.0
TAU = 0.02                   # integration step, seconds

X_LIMIT = 2.4
THETA_LIMIT = 12.0 * math.pi / 180.0
DEFAULT_MAX_STEPS = 300
RESET_SPAN = 0.05

ACTION_NAMES = ("left", "right")

# binning ranges shipped with the environment; explicit because rule quality
# is sensitive to them
FEATURE_RANGES = {
    "CartPos": (-4.8, 4.8),
    "CartVeloc": (-3.0, 3.0),
    "PoleAngle": (-0.418, 0.418),
    "PoleAngleVeloc": (-3.0, 3.0),
}


def dynamics_step(state: np.ndarray, force: float) -> np.ndarray:
    """One explicit-Euler step of the cart-pole equations of motion."""
    x, x_dot, theta, theta_dot = state
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    temp = (force + POLE_MASS_LENGTH * theta_dot * theta_dot * sin_t) / TOTAL_MASS
    theta_acc = (GRAVITY * sin_t - cos_t * temp) / (
        HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos_t * cos_t / TOTAL_MASS))
    x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos_t / TOTAL_MASS
    return np.array([
        x + TAU * x_dot,
        x_dot + TAU * x_acc,
        theta + TAU * theta_dot,
        theta_dot + TAU * theta_acc,
    ])


class CartPoleEnv:
    n_actions = 2
    action_names = ACTION_NAMES

    def __init__(self, rng=None, max_steps: int = DEFAULT_MAX_STEPS):
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        self.max_steps = int(max_steps)
        self.state = np.zeros(4)
        self.step_count = 0

    @staticmethod
    def schema(bins=4) -> FeatureSchema:
        if isinstance(bins, int):
            bins = {name: bins for name in FEATURE_RANGES}
        return FeatureSchema(continuous=[
            ContinuousFeature(name, low, high, bins[name])
            for name, (low, high) in FEATURE_RANGES.items()
        ])

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        self.state = self.rng.uniform(-RESET_SPAN, RESET_SPAN, size=4)
        self.step_count = 0
        return self.state.copy()

    def step(self, action: int) -> StepResult:
        if action not in (0, 1):
            raise ValueError(f"invalid action {action!r} for CartPole")
        force = FORCE_MAG if action == 1 else -FORCE_MAG
        self.state = dynamics_step(self.state, force)
        self.step_count += 1
        x, _, theta, _ = self.state
        done = bool(abs(x) > X_LIMIT or abs(theta) > THETA_LIMIT)
        truncated = bool(not done and self.step_count >= self.max_steps)
        return StepResult(state=self.state.copy(), reward=1.0,
                          done=done, truncated=truncated)
