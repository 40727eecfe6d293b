"""Command-line interface: train, evaluate, extract, plot."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import load_config
from .errors import DnlrlError
from .experiment import (checkpoint_load, evaluate_policy, render_plots,
                         run_experiment, write_overlay, write_plot_data)
from .rules import extract_policy, format_policy, rules_to_jsonl


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dnlrl",
        description="Train and inspect rule-based reinforcement learning agents.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run a training experiment")
    p_train.add_argument("config", help="experiment YAML file")
    p_train.add_argument("--output", help="override output_dir")
    p_train.add_argument("--seed", type=int, help="override seed")
    p_train.add_argument("--episodes", type=int, help="override episode budget")
    p_train.add_argument("--resume", help="checkpoint to continue from")
    p_train.add_argument("--trials", type=int, default=1,
                         help="run N seeds (seed, seed+1, ...), one dir each")
    p_train.add_argument("--verbose", action="store_true")

    p_eval = sub.add_parser("evaluate", help="roll out a trained checkpoint")
    p_eval.add_argument("checkpoint")
    p_eval.add_argument("--episodes", type=int, default=10)
    p_eval.add_argument("--greedy", action="store_true")
    p_eval.add_argument("--seed", type=int, default=None)

    p_extract = sub.add_parser("extract", help="print the rule policy")
    p_extract.add_argument("checkpoint")
    p_extract.add_argument("--threshold", type=float, default=0.5,
                           help="membership floor for keeping rules/atoms")
    p_extract.add_argument("--confident", type=float, default=0.95,
                           help="memberships at or above print without weight")
    p_extract.add_argument("--jsonl", help="also write machine-readable rules here")

    p_plot = sub.add_parser("plot", help="emit reward-curve plot data")
    p_plot.add_argument("run_dirs", nargs="+")
    p_plot.add_argument("--overlay", help="write across-seed overlay CSV here")
    p_plot.add_argument("--png", action="store_true",
                        help="also render PNGs (requires matplotlib)")
    return parser


def cmd_train(args) -> int:
    overrides = {"output_dir": args.output, "seed": args.seed,
                 "episodes": args.episodes}
    cfg = load_config(args.config, overrides)
    for trial in range(args.trials):
        trial_cfg = cfg
        if args.trials > 1:
            trial_cfg = load_config(args.config, {
                **overrides,
                "seed": cfg.seed + trial,
                "output_dir": str(Path(cfg.output_dir) / f"seed{cfg.seed + trial}"),
            })
        record = run_experiment(trial_cfg, resume_from=args.resume,
                                quiet=not args.verbose)
        mean, std = record.last100()
        print(f"{trial_cfg.output_dir}: {len(record.episodes)} episodes, "
              f"last-100 mean {mean:.1f} ± {std:.1f}")
    return 0


def cmd_evaluate(args) -> int:
    loaded = checkpoint_load(args.checkpoint)
    rewards = evaluate_policy(loaded, episodes=args.episodes,
                              greedy=args.greedy, seed=args.seed)
    arr = np.asarray(rewards)
    mode = "greedy" if args.greedy else "stochastic"
    print(f"{args.episodes} {mode} episodes: mean {arr.mean():.2f} "
          f"± {arr.std():.2f} (min {arr.min():.2f}, max {arr.max():.2f})")
    return 0


def cmd_extract(args) -> int:
    loaded = checkpoint_load(args.checkpoint)
    if loaded.policy is None:
        print("error: this checkpoint's trainer has no rule policy", file=sys.stderr)
        return 2
    rules = extract_policy(loaded.policy, args.threshold, args.confident)
    print(format_policy(rules, list(loaded.env.action_names)), end="")
    if args.jsonl:
        Path(args.jsonl).write_text(rules_to_jsonl(rules), encoding="utf-8")
    return 0


def cmd_plot(args) -> int:
    for run_dir in args.run_dirs:
        path = write_plot_data(run_dir)
        print(f"wrote {path}")
    if args.overlay or len(args.run_dirs) > 1:
        overlay = args.overlay or str(Path(args.run_dirs[0]).parent / "overlay.csv")
        print(f"wrote {write_overlay(args.run_dirs, overlay)}")
    if args.png:
        paths = render_plots(args.run_dirs)
        if paths is None:
            print("matplotlib not available; skipped PNG rendering", file=sys.stderr)
        else:
            for p in paths:
                print(f"wrote {p}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"train": cmd_train, "evaluate": cmd_evaluate,
                "extract": cmd_extract, "plot": cmd_plot}
    try:
        return handlers[args.command](args)
    except DnlrlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
