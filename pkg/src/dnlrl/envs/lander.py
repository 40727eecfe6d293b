"""Simplified planar lunar lander.

A rigid body with a main engine (thrust along its axis) and two side
thrusters (lateral force plus torque) descends to a landing pad at the
origin.  The observation is 8-dimensional: x, y, horizontal and vertical
velocity, angle, angular velocity, and two Boolean leg-contact flags.
Actions: 0 do nothing, 1 fire left thruster, 2 fire main engine, 3 fire
right thruster.

Reward is potential-based shaping toward a slow, level, centred descent,
minus fuel cost, plus +100 for a soft two-legged touchdown and -100 for a
crash or leaving the play area.  A soft landing from the standard start
totals roughly 200 and up.
"""

from __future__ import annotations

import math

import numpy as np

from ..predicates import ContinuousFeature, DiscreteFeature, FeatureSchema
from .base import StepResult

DT = 0.04
GRAVITY = 0.5
MAIN_ACCEL = 1.2
SIDE_ACCEL = 0.12
SIDE_TORQUE = 1.5
MAIN_FUEL_COST = 0.3
SIDE_FUEL_COST = 0.03

LEG_SPAN = 0.12              # lateral offset of each leg tip
LEG_DROP = 0.08              # vertical offset of the tips below the centre

# touchdown classification
LAND_VX = 0.35
LAND_VY = 0.45
LAND_ANGLE = 0.35
CRASH_VY = 0.8
CRASH_VX = 1.0
CRASH_ANGLE = 0.6
LEVEL_TOL = 0.05             # both tips within this height for a rest

X_BOUND = 1.6
Y_BOUND = 2.2
DEFAULT_MAX_STEPS = 500

START_Y = 1.4

ACTION_NAMES = ("doNothing", "fireLeft", "fireMain", "fireRight")

FEATURE_RANGES = {
    "CoordX": (-1.5, 1.5),
    "CoordY": (-1.0, 2.0),
    "LinearVelocX": (-2.0, 2.0),
    "LinearVelocY": (-2.0, 2.0),
    "Angle": (-1.6, 1.6),
    "AngularVeloc": (-2.5, 2.5),
}


def _leg_heights(x: float, y: float, theta: float) -> tuple[float, float]:
    sin_t = math.sin(theta)
    cos_t = math.cos(theta)
    left = y + (-LEG_SPAN) * sin_t - LEG_DROP * cos_t
    right = y + LEG_SPAN * sin_t - LEG_DROP * cos_t
    return left, right


def _potential(state: np.ndarray) -> float:
    x, y, vx, vy, theta, _, left, right = state
    return (-100.0 * math.sqrt(x * x + y * y)
            - 100.0 * math.sqrt(vx * vx + vy * vy)
            - 100.0 * abs(theta)
            + 10.0 * left + 10.0 * right)


class LanderEnv:
    n_actions = 4
    action_names = ACTION_NAMES

    def __init__(self, rng=None, max_steps: int = DEFAULT_MAX_STEPS):
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        self.max_steps = int(max_steps)
        self.state = np.zeros(8)
        self.step_count = 0

    @staticmethod
    def schema(bins=3) -> FeatureSchema:
        if isinstance(bins, int):
            bins = {name: bins for name in FEATURE_RANGES}
        return FeatureSchema(
            continuous=[ContinuousFeature(name, low, high, bins[name])
                        for name, (low, high) in FEATURE_RANGES.items()],
            discrete=[DiscreteFeature("LeftLegContact"),
                      DiscreteFeature("RightLegContact")],
        )

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        self.state = np.array([
            self.rng.uniform(-0.4, 0.4),     # x
            START_Y,                         # y
            self.rng.uniform(-0.2, 0.2),     # vx
            self.rng.uniform(-0.1, 0.0),     # vy
            self.rng.uniform(-0.15, 0.15),   # angle
            self.rng.uniform(-0.1, 0.1),     # angular velocity
            0.0, 0.0,                        # leg contacts
        ])
        self.step_count = 0
        return self.state.copy()

    def step(self, action: int) -> StepResult:
        if action not in (0, 1, 2, 3):
            raise ValueError(f"invalid action {action!r} for Lander")
        x, y, vx, vy, theta, vtheta, _, _ = self.state
        prev_potential = _potential(self.state)

        ax = 0.0
        ay = -GRAVITY
        torque = 0.0
        fuel = 0.0
        sin_t = math.sin(theta)
        cos_t = math.cos(theta)
        if action == 2:           # main engine, thrust along the body axis
            ax += -MAIN_ACCEL * sin_t
            ay += MAIN_ACCEL * cos_t
            fuel = MAIN_FUEL_COST
        elif action == 1:         # left thruster pushes right, rotates ccw
            ax += SIDE_ACCEL * cos_t
            ay += SIDE_ACCEL * sin_t
            torque = SIDE_TORQUE
            fuel = SIDE_FUEL_COST
        elif action == 3:         # right thruster pushes left, rotates cw
            ax += -SIDE_ACCEL * cos_t
            ay += -SIDE_ACCEL * sin_t
            torque = -SIDE_TORQUE
            fuel = SIDE_FUEL_COST

        vx += ax * DT
        vy += ay * DT
        vtheta += torque * DT
        x += vx * DT
        y += vy * DT
        theta += vtheta * DT

        left_h, right_h = _leg_heights(x, y, theta)
        left_contact = left_h <= 0.0
        right_contact = right_h <= 0.0

        done = False
        terminal_reward = 0.0
        if left_contact or right_contact:
            hard = (abs(vy) > CRASH_VY or abs(vx) > CRASH_VX
                    or abs(theta) > CRASH_ANGLE)
            soft = (abs(vx) <= LAND_VX and abs(vy) <= LAND_VY
                    and abs(theta) <= LAND_ANGLE)
            rest = left_h <= LEVEL_TOL and right_h <= LEVEL_TOL
            if hard:
                done = True
                terminal_reward = -100.0
            elif soft and rest:
                done = True
                terminal_reward = 100.0
                left_contact = right_contact = True
            else:
                # gentle single-leg touch: the leg supports the body
                lift = -min(left_h, right_h)
                y += lift
                if vy < 0.0:
                    vy = 0.0
                vtheta *= 0.5
        if not done and (abs(x) > X_BOUND or y > Y_BOUND):
            done = True
            terminal_reward = -100.0

        self.state = np.array([x, y, vx, vy, theta, vtheta,
                               float(left_contact), float(right_contact)])
        self.step_count += 1
        reward = _potential(self.state) - prev_potential - fuel + terminal_reward
        truncated = bool(not done and self.step_count >= self.max_steps)
        return StepResult(state=self.state.copy(), reward=float(reward),
                          done=done, truncated=truncated)
