"""Experiment harness: training loop, checkpoints, metrics and plot data.

A run is fully determined by its configuration and seed: all randomness
flows from one seed sequence (environment, policy init, trainer), metrics
are written with fixed formatting, and wall-clock timings live in a
separate file so the metrics CSV is byte-reproducible.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, config_from_dict, dump_config
from .envs import ENVIRONMENTS, make_env
from .errors import SchemaMismatchError
from .kernels import backend_name
from .policy import DnlPolicy
from .predicates import ContinuousFeature, FeatureSchema, TransformKB
from .rules import ExtractedRule, extract_policy, format_policy, rules_to_jsonl
from .trainers import make_trainer
from .trainers.base import pack_tensors, unpack_tensors

METRICS_HEADER = "episode,reward,steps,actor_loss,critic_loss,entropy"
CHECKPOINT_VERSION = 1


@dataclass
class EpisodeRecord:
    index: int
    reward: float
    steps: int
    actor_loss: float | None
    critic_loss: float | None
    entropy: float | None
    wall_clock: float


@dataclass
class RunRecord:
    config: ExperimentConfig
    episodes: list[EpisodeRecord] = field(default_factory=list)
    rules: list[ExtractedRule] = field(default_factory=list)
    output_dir: Path | None = None

    def rewards(self) -> np.ndarray:
        return np.array([e.reward for e in self.episodes])

    def last100(self) -> tuple[float, float]:
        if not self.episodes:
            return float("nan"), float("nan")
        tail = self.rewards()[-100:]
        return float(tail.mean()), float(tail.std())


# -- schema and component construction ----------------------------------------

def build_schema(cfg: ExperimentConfig) -> FeatureSchema:
    env_cls = ENVIRONMENTS[cfg.environment.lower()]
    base = env_cls.schema() if cfg.bins is None else env_cls.schema(cfg.bins)
    if not cfg.ranges:
        return base
    continuous = []
    for f in base.continuous:
        if f.name in cfg.ranges:
            low, high = cfg.ranges[f.name]
            continuous.append(ContinuousFeature(f.name, float(low), float(high), f.bins))
        else:
            continuous.append(f)
    return FeatureSchema(continuous=continuous, discrete=base.discrete)


def build_components(cfg: ExperimentConfig):
    """Environment, schema, transform KB, policy and trainer for a config."""
    seed_seq = np.random.SeedSequence(cfg.seed)
    env_rng, policy_rng, trainer_rng = (np.random.default_rng(s)
                                        for s in seed_seq.spawn(3))
    env = make_env(cfg.environment, env_rng, cfg.max_steps)
    schema = build_schema(cfg)
    kb = TransformKB(cfg.transforms)
    policy = None
    if cfg.trainer.lower() != "dqn":
        policy = DnlPolicy(
            schema, list(env.action_names), policy_rng, kb=kb,
            rules_per_action=cfg.rules_per_action,
            membership_sharpness=cfg.membership_sharpness,
            boundary_sharpness=cfg.boundary_sharpness,
            init_mean=cfg.init_mean, init_std=cfg.init_std,
            floor=cfg.distribution_floor)
    trainer = make_trainer(cfg.trainer, policy, schema.state_dim,
                           env.n_actions, cfg.resolved_trainer_config(),
                           trainer_rng)
    return env, schema, kb, policy, trainer


# -- training loop --------------------------------------------------------------

def run_experiment(cfg: ExperimentConfig, resume_from: str | Path | None = None,
                   quiet: bool = True) -> RunRecord:
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dump_config(cfg, out_dir / "config.yaml")

    if resume_from is not None:
        loaded = checkpoint_load(resume_from)
        env, schema, kb = loaded.env, loaded.schema, loaded.kb
        policy, trainer = loaded.policy, loaded.trainer
        start_episode = loaded.episode_index
    else:
        env, schema, kb, policy, trainer = build_components(cfg)
        start_episode = 0

    metrics_path = out_dir / "metrics.csv"
    timings_path = out_dir / "timings.csv"
    append = resume_from is not None and metrics_path.exists()
    metrics_file = metrics_path.open("a" if append else "w")
    timings_file = timings_path.open("a" if append else "w")
    if not append:
        metrics_file.write(METRICS_HEADER + "\n")
        timings_file.write("episode,wall_clock_s\n")

    record = RunRecord(config=cfg, output_dir=out_dir)
    reward_tail: list[float] = []
    run_start = time.perf_counter()

    try:
        for episode in range(start_episode, cfg.episodes):
            t0 = time.perf_counter()
            state = env.reset()
            total_reward = 0.0
            steps = 0
            sums = {"actor_loss": 0.0, "critic_loss": 0.0, "entropy": 0.0}
            counts = {"actor_loss": 0, "critic_loss": 0, "entropy": 0}
            while True:
                action = trainer.act(state)
                result = env.step(action)
                trainer.observe(state, action, result.reward, result.state,
                                result.done, result.truncated)
                metrics = trainer.update()
                if metrics:
                    for key in sums:
                        if key in metrics:
                            sums[key] += metrics[key]
                            counts[key] += 1
                state = result.state
                total_reward += result.reward
                steps += 1
                if result.done or result.truncated:
                    break
            wall = time.perf_counter() - t0
            means = {k: (sums[k] / counts[k] if counts[k] else None) for k in sums}
            ep = EpisodeRecord(index=episode, reward=total_reward, steps=steps,
                               actor_loss=means["actor_loss"],
                               critic_loss=means["critic_loss"],
                               entropy=means["entropy"], wall_clock=wall)
            record.episodes.append(ep)
            metrics_file.write(_format_metrics_row(ep) + "\n")
            timings_file.write(f"{episode},{wall:.6f}\n")
            if not quiet and (episode % 50 == 0 or episode == cfg.episodes - 1):
                mean100 = np.mean([e.reward for e in record.episodes[-100:]])
                print(f"episode {episode}: reward {total_reward:.1f} "
                      f"(last-100 mean {mean100:.1f})")

            if cfg.checkpoint_every and (episode + 1) % cfg.checkpoint_every == 0:
                checkpoint_save(out_dir / f"checkpoint_ep{episode + 1}.npz",
                                cfg, schema, kb, policy, trainer, env,
                                episode + 1)
            reward_tail.append(total_reward)
            if len(reward_tail) > 100:
                reward_tail.pop(0)
            if (cfg.stop_reward is not None
                    and np.mean(reward_tail) >= cfg.stop_reward):
                break
    finally:
        metrics_file.close()
        timings_file.close()

    episodes_done = start_episode + len(record.episodes)
    checkpoint_save(out_dir / "checkpoint.npz", cfg, schema, kb, policy,
                    trainer, env, episodes_done)

    mean, std = record.last100()
    if policy is not None:
        record.rules = extract_policy(policy)
        report = format_policy(record.rules, list(env.action_names),
                               None if np.isnan(mean) else mean,
                               None if np.isnan(std) else std)
    else:
        report = "no interpretable rule policy for this trainer\n"
    (out_dir / "rules.txt").write_text(report, encoding="utf-8")
    (out_dir / "rules.jsonl").write_text(rules_to_jsonl(record.rules),
                                         encoding="utf-8")
    write_plot_data(out_dir)
    (out_dir / "run_meta.json").write_text(json.dumps({
        "version": __version__,
        "kernel_backend": backend_name(),
        "episodes": episodes_done,
        "last100_mean": None if np.isnan(mean) else mean,
        "last100_std": None if np.isnan(std) else std,
        "total_wall_clock_s": time.perf_counter() - run_start,
    }, indent=2))
    return record


def _format_metrics_row(ep: EpisodeRecord) -> str:
    def fmt(v):
        return "" if v is None else f"{v:.6f}"

    return (f"{ep.index},{ep.reward:.6f},{ep.steps},"
            f"{fmt(ep.actor_loss)},{fmt(ep.critic_loss)},{fmt(ep.entropy)}")


# -- checkpointing -----------------------------------------------------------------

def checkpoint_save(path, cfg: ExperimentConfig, schema: FeatureSchema,
                    kb: TransformKB, policy: DnlPolicy | None, trainer,
                    env, episode_index: int) -> None:
    arrays: dict[str, np.ndarray] = {}
    if policy is not None:
        for i, name in enumerate(policy.action_names):
            net = policy.networks[name]
            arrays[f"net{i}_wconj"] = net.w_conj.data
            arrays[f"net{i}_wdisj"] = net.w_disj.data
        for j, entry in enumerate(policy.bank.entries):
            arrays[f"bank{j}_gt"] = entry.gt_bounds.data
            arrays[f"bank{j}_lt"] = entry.lt_bounds.data
    for key, value in trainer.state_arrays().items():
        arrays[f"trainer_{key}"] = value
    meta = {
        "checkpoint_version": CHECKPOINT_VERSION,
        "package_version": __version__,
        "config": cfg.to_dict(),
        "schema": schema.descriptor(kb),
        "episode_index": int(episode_index),
        "env_rng": env.rng.bit_generator.state,
        "trainer_rng": trainer.rng.bit_generator.state,
    }
    arrays["meta"] = np.frombuffer(json.dumps(meta).encode("utf-8"), dtype=np.uint8)
    np.savez(path, **arrays)


@dataclass
class LoadedCheckpoint:
    config: ExperimentConfig
    env: object
    schema: FeatureSchema
    kb: TransformKB
    policy: DnlPolicy | None
    trainer: object
    episode_index: int


def checkpoint_load(path) -> LoadedCheckpoint:
    with np.load(path) as data:
        arrays = {key: data[key] for key in data.files}
    meta = json.loads(arrays.pop("meta").tobytes().decode("utf-8"))
    cfg = config_from_dict(meta["config"], source=str(path))
    env, schema, kb, policy, trainer = build_components(cfg)

    expected = schema.descriptor(kb)
    if meta["schema"] != expected:
        raise SchemaMismatchError(
            f"checkpoint schema {meta['schema']} does not match configuration "
            f"schema {expected}")

    if policy is not None:
        for i, name in enumerate(policy.action_names):
            net = policy.networks[name]
            net.w_conj.data[...] = arrays[f"net{i}_wconj"]
            net.w_disj.data[...] = arrays[f"net{i}_wdisj"]
        for j, entry in enumerate(policy.bank.entries):
            entry.gt_bounds.data[...] = arrays[f"bank{j}_gt"]
            entry.lt_bounds.data[...] = arrays[f"bank{j}_lt"]
    trainer.load_state_arrays(
        {k[8:]: v for k, v in arrays.items() if k.startswith("trainer_")})
    env.rng.bit_generator.state = meta["env_rng"]
    trainer.rng.bit_generator.state = meta["trainer_rng"]
    return LoadedCheckpoint(config=cfg, env=env, schema=schema, kb=kb,
                            policy=policy, trainer=trainer,
                            episode_index=int(meta["episode_index"]))


# -- evaluation ----------------------------------------------------------------------

def evaluate_policy(loaded: LoadedCheckpoint, episodes: int = 10,
                    greedy: bool = False, seed: int | None = None) -> list[float]:
    """Roll out the trained agent without learning; returns episode rewards."""
    env = loaded.env
    if seed is not None:
        env.rng = np.random.default_rng(seed)
    rewards = []
    for _ in range(episodes):
        state = env.reset()
        total = 0.0
        while True:
            action = loaded.trainer.act(state, greedy=greedy)
            result = env.step(action)
            total += result.reward
            state = result.state
            if result.done or result.truncated:
                break
        rewards.append(total)
    return rewards


def visitation_states(loaded: LoadedCheckpoint, n_states: int,
                      seed: int = 0) -> np.ndarray:
    """States drawn from the trained agent's own on-policy distribution."""
    env = loaded.env
    env.rng = np.random.default_rng(seed)
    states = []
    while len(states) < n_states:
        state = env.reset()
        while True:
            states.append(state.copy())
            if len(states) >= n_states:
                break
            action = loaded.trainer.act(state)
            result = env.step(action)
            state = result.state
            if result.done or result.truncated:
                break
    return np.stack(states[:n_states])


# -- plot data --------------------------------------------------------------------------

def moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Trailing mean over up to `window` previous values."""
    out = np.empty(len(values))
    csum = np.cumsum(np.insert(np.asarray(values, dtype=np.float64), 0, 0.0))
    for i in range(len(values)):
        lo = max(0, i - window + 1)
        out[i] = (csum[i + 1] - csum[lo]) / (i + 1 - lo)
    return out


def moving_std(values: np.ndarray, window: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    out = np.empty(len(values))
    for i in range(len(values)):
        lo = max(0, i - window + 1)
        out[i] = values[lo:i + 1].std()
    return out


def write_plot_data(run_dir: str | Path, avg_window: int = 50,
                    std_window: int = 20) -> Path:
    """Reward curve columns for one run: raw, moving mean, moving std."""
    run_dir = Path(run_dir)
    rewards = read_metrics(run_dir / "metrics.csv")["reward"]
    avg = moving_average(rewards, avg_window)
    std = moving_std(rewards, std_window)
    path = run_dir / "plot_data.csv"
    with path.open("w") as fh:
        fh.write(f"episode,reward,moving_avg_{avg_window},moving_std_{std_window}\n")
        for i in range(len(rewards)):
            fh.write(f"{i},{rewards[i]:.6f},{avg[i]:.6f},{std[i]:.6f}\n")
    return path


def write_overlay(run_dirs: list[str | Path], out_path: str | Path) -> Path:
    """Across-seed mean and deviation bands, truncated to the shortest run."""
    series = [read_metrics(Path(d) / "metrics.csv")["reward"] for d in run_dirs]
    n = min(len(s) for s in series)
    stacked = np.stack([s[:n] for s in series])
    mean = stacked.mean(axis=0)
    std = stacked.std(axis=0)
    out_path = Path(out_path)
    with out_path.open("w") as fh:
        fh.write("episode,mean_reward,std_reward,n_runs\n")
        for i in range(n):
            fh.write(f"{i},{mean[i]:.6f},{std[i]:.6f},{len(series)}\n")
    return out_path


def read_metrics(path: str | Path) -> dict[str, np.ndarray]:
    rows = Path(path).read_text().strip().splitlines()
    header = rows[0].split(",")
    columns: dict[str, list[float]] = {name: [] for name in header}
    for line in rows[1:]:
        for name, cell in zip(header, line.split(",")):
            columns[name].append(float(cell) if cell else float("nan"))
    return {name: np.array(vals) for name, vals in columns.items()}


def render_plots(run_dirs: list[str | Path], out_dir: str | Path | None = None):
    """Optional PNG rendering on top of the CSV plot data."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return None
    paths = []
    for run_dir in run_dirs:
        run_dir = Path(run_dir)
        data = read_metrics(run_dir / "plot_data.csv")
        fig, ax = plt.subplots(figsize=(8, 4.5))
        ax.plot(data["episode"], data["reward"], alpha=0.35, label="episode reward")
        avg_key = next(k for k in data if k.startswith("moving_avg"))
        ax.plot(data["episode"], data[avg_key], label=avg_key.replace("_", " "))
        ax.set_xlabel("episode")
        ax.set_ylabel("reward")
        ax.legend()
        fig.tight_layout()
        png = run_dir / "reward_curve.png"
        fig.savefig(png, dpi=120)
        plt.close(fig)
        paths.append(png)
    return paths
