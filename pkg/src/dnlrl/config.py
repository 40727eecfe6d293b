"""Experiment configuration: YAML with full default inheritance.

Every hyperparameter named anywhere in the package is reachable from here;
validation collects all violations before raising.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .envs import ENVIRONMENTS
from .errors import ConfigurationError
from .predicates import TRANSFORM_FUNCTIONS
from .trainers import TRAINER_CONFIGS

VARIANTS = ("dnlrlc", "dnlrlnlc")


@dataclass
class ExperimentConfig:
    environment: str = "cartpole"
    variant: str = "dNLRLc"                  # dNLRLc (no transforms) or dNLRLnlc
    trainer: str = "sac"
    seed: int = 0
    episodes: int = 3000
    max_steps: int | None = None             # None keeps the environment default
    output_dir: str = "runs/run"
    bins: dict[str, int] | int | None = None # None keeps the environment default
    ranges: dict[str, list[float]] = field(default_factory=dict)
    transforms: dict[str, str] = field(default_factory=dict)
    rules_per_action: int = 4
    membership_sharpness: float = 6.0
    boundary_sharpness: float = 20.0
    init_mean: float = -1.0
    init_std: float = 0.25
    distribution_floor: float = 1e-6
    stop_reward: float | None = None         # early stop on last-100 mean
    checkpoint_every: int = 0                # 0 checkpoints only at the end
    trainer_params: dict = field(default_factory=dict)

    def resolved_trainer_config(self):
        cls = TRAINER_CONFIGS[self.trainer.lower()]
        params = dict(self.trainer_params)
        if "hidden" in params:
            params["hidden"] = tuple(params["hidden"])
        return cls(**params)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _known_fields() -> set[str]:
    return {f.name for f in dataclasses.fields(ExperimentConfig)}


def load_config(path: str | Path, overrides: dict | None = None) -> ExperimentConfig:
    """Load YAML, apply overrides, validate."""
    raw = yaml.safe_load(Path(path).read_text()) or {}
    if not isinstance(raw, dict):
        raise ConfigurationError([f"{path}: top level must be a mapping"])
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_dict(raw, source=str(path))


def config_from_dict(raw: dict, source: str = "<dict>") -> ExperimentConfig:
    known = _known_fields()
    violations = [f"unknown option {key!r}" for key in raw if key not in known]
    cfg = ExperimentConfig(**{k: v for k, v in raw.items() if k in known})
    violations.extend(validate(cfg))
    if violations:
        raise ConfigurationError([f"{source}: {v}" for v in violations])
    return cfg


def validate(cfg: ExperimentConfig) -> list[str]:
    """Return every violation found (empty list when valid)."""
    problems: list[str] = []
    if cfg.environment.lower() not in ENVIRONMENTS:
        problems.append(f"environment {cfg.environment!r} not in {sorted(ENVIRONMENTS)}")
    if cfg.variant.lower() not in VARIANTS:
        problems.append(f"variant {cfg.variant!r} must be one of dNLRLc, dNLRLnlc")
    if cfg.trainer.lower() not in TRAINER_CONFIGS:
        problems.append(f"trainer {cfg.trainer!r} not in {sorted(TRAINER_CONFIGS)}")
    if cfg.episodes < 0:
        problems.append(f"episodes must be >= 0, got {cfg.episodes}")
    if cfg.max_steps is not None and cfg.max_steps < 1:
        problems.append(f"max_steps must be >= 1, got {cfg.max_steps}")
    if cfg.rules_per_action < 1:
        problems.append(f"rules_per_action must be >= 1, got {cfg.rules_per_action}")
    if cfg.membership_sharpness < 1.0:
        problems.append("membership_sharpness must be >= 1")
    if cfg.boundary_sharpness < 1.0:
        problems.append("boundary_sharpness must be >= 1")
    if cfg.distribution_floor <= 0.0:
        problems.append("distribution_floor must be > 0")
    if cfg.init_std <= 0.0:
        problems.append("init_std must be > 0")

    variant = cfg.variant.lower()
    if variant == "dnlrlc" and cfg.transforms:
        problems.append("variant dNLRLc must not register transforms")
    if variant == "dnlrlnlc" and not cfg.transforms:
        problems.append("variant dNLRLnlc requires at least one transform")
    for feature, func in cfg.transforms.items():
        if func not in TRANSFORM_FUNCTIONS:
            problems.append(f"transform {func!r} for {feature!r} unknown; "
                            f"known: {sorted(TRANSFORM_FUNCTIONS)}")

    if isinstance(cfg.bins, int) and cfg.bins < 1:
        problems.append(f"bins must be >= 1, got {cfg.bins}")
    if isinstance(cfg.bins, dict):
        for name, k in cfg.bins.items():
            if not isinstance(k, int) or k < 1:
                problems.append(f"bins[{name!r}] must be a positive integer, got {k!r}")
    for name, bounds in cfg.ranges.items():
        if (not isinstance(bounds, (list, tuple)) or len(bounds) != 2
                or not bounds[0] < bounds[1]):
            problems.append(f"ranges[{name!r}] must be [low, high] with low < high")

    if cfg.trainer.lower() in TRAINER_CONFIGS:
        cls = TRAINER_CONFIGS[cfg.trainer.lower()]
        valid = {f.name for f in dataclasses.fields(cls)}
        for key, value in cfg.trainer_params.items():
            if key not in valid:
                problems.append(f"trainer_params.{key} unknown for {cfg.trainer}; "
                                f"known: {sorted(valid)}")
                continue
            if key in ("gamma",) and not 0.0 <= value <= 1.0:
                problems.append(f"trainer_params.gamma must be in [0, 1], got {value}")
            if key in ("alpha",) and value <= 0.0:
                problems.append(f"trainer_params.alpha must be > 0, got {value}")
            if key in ("tau",) and not 0.0 < value <= 1.0:
                problems.append(f"trainer_params.tau must be in (0, 1], got {value}")
            if key in ("batch_size", "replay_capacity") and value < 1:
                problems.append(f"trainer_params.{key} must be >= 1, got {value}")
    return problems


def dump_config(cfg: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(cfg.to_dict(), sort_keys=True))
