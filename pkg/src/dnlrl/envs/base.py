"""Shared environment types."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class StepResult:
    state: np.ndarray
    reward: float
    done: bool          # true only for genuine terminal states
    truncated: bool     # step-limit cutoff, reported separately
