"""Run orchestration: pretrain (or load) the feasibility map, train one agent
per seed, evaluate, and leave a fully reproducible artifact directory.

Layout of a run directory:
    manifest.json            resolved config + revision, written before training
    effective-config.ini     the exact configuration a rerun would need
    feasibility.ckpt         pretrained latent-to-action map (am-* runs)
    pretrain.csv             feasibility pretraining curve (am-* runs)
    metrics_seed<k>.csv      per-episode rows plus one row per 1000 env steps
    agent_seed<k>.ckpt       final policy/critic parameters
    eval_seed<k>.csv         fixed-policy evaluation episodes
    completed.json           end timestamp and per-seed summaries

Reruns with an identical configuration resume: finished seeds are detected by
their artifacts and skipped, and a manifest from a *different* configuration
aborts the run rather than silently mixing artifacts.
"""

from __future__ import annotations

import csv
import json
import subprocess
import time
from pathlib import Path

import numpy as np

from ..agents import (
    LatentMapper,
    PPOAgent,
    SACAgent,
    evaluate_policy,
    make_filter,
    train_ppo,
    train_sac,
)
from ..autodiff import load_checkpoint, save_checkpoint
from ..envs import make_env
from ..feasibility.models import make_model
from ..pretrain import pretrain, toy_mode_occupancy
from .config import RunConfig, dump_config, load_config, parse_algorithm

INTERVAL_STEPS = 1000


def source_revision() -> str:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True, text=True, timeout=10,
        )
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def build_env(config: RunConfig):
    if config.environment == "path":
        return make_env("path", s_points=config.s_points)
    return make_env(config.environment)


def build_feasibility_model(config: RunConfig):
    if config.environment == "path":
        return make_model("path", s_points=config.s_points)
    return make_model(config.environment)


def build_agent(config: RunConfig, env, rng: np.random.Generator):
    base, _ = parse_algorithm(config.algorithm)
    ego, _, _ = env.obs_parts(env.reset(0))
    kind = SACAgent if base.endswith("sac") else PPOAgent
    return kind(
        len(ego), env.item_dim, env.max_items, env.action_dim,
        config.agent, rng, with_cost_critic=base.startswith("lag"),
    )


def ensure_feasibility_params(config: RunConfig, run_dir: Path):
    """Load or pretrain the latent-to-action map for am-* algorithms."""
    base, _ = parse_algorithm(config.algorithm)
    if not base.startswith("am"):
        return None
    if config.feasibility_checkpoint:
        return load_checkpoint(config.feasibility_checkpoint)["feasibility"]
    target = run_dir / "feasibility.ckpt"
    if target.exists():
        return load_checkpoint(str(target))["feasibility"]
    env = build_env(config)
    model = build_feasibility_model(config)
    rng = np.random.default_rng([config.seeds[0], 0])
    mode_fn = toy_mode_occupancy if config.environment == "toy" else None
    params = pretrain(
        config.pretrain, env, model, rng,
        log_path=str(run_dir / "pretrain.csv"),
        checkpoint_dir=None, mode_fn=mode_fn,
    )
    save_checkpoint(str(target), {"feasibility": params})
    return params


def write_metrics_csv(path: Path, log, total_steps: int) -> None:
    """Episode rows interleaved with one summary row per 1000 env steps."""
    episodes = sorted(log.episodes, key=lambda e: e.end_step)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["record", "step", "return", "length", "violated", "constraint"])
        idx = 0
        done_count = 0
        for mark in range(INTERVAL_STEPS, total_steps + 1, INTERVAL_STEPS):
            window = []
            while idx < len(episodes) and episodes[idx].end_step <= mark:
                e = episodes[idx]
                writer.writerow([
                    "episode", e.end_step, repr(e.return_), e.length,
                    int(e.violated), e.constraint or "",
                ])
                window.append(e)
                idx += 1
            done_count += len(window)
            mean_return = repr(float(np.mean([e.return_ for e in window]))) if window else ""
            rate = repr(float(np.mean([e.violated for e in window]))) if window else ""
            writer.writerow(["interval", mark, mean_return, done_count, rate, ""])
        for e in episodes[idx:]:  # tail episodes past the last full interval
            writer.writerow([
                "episode", e.end_step, repr(e.return_), e.length,
                int(e.violated), e.constraint or "",
            ])


def write_eval_csv(path: Path, records) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "return", "length", "violated", "constraint"])
        for i, rec in enumerate(records):
            writer.writerow([i, repr(rec.return_), rec.length, int(rec.violated),
                             rec.constraint or ""])


def train_one_seed(config: RunConfig, seed: int, feas_params, run_dir: Path) -> dict:
    base, filt_name = parse_algorithm(config.algorithm)
    env = build_env(config)
    agent = build_agent(config, env, np.random.default_rng([seed, 1]))
    mapper = LatentMapper(env, feas_params) if base.startswith("am") else None
    action_filter = None
    if filt_name is not None:
        action_filter = make_filter(filt_name, env, build_feasibility_model(config))
    lagrangian = base.startswith("lag")
    trainer = train_sac if base.endswith("sac") else train_ppo
    log = trainer(
        env, agent, config.total_steps, np.random.default_rng([seed, 2]),
        mapper=mapper, action_filter=action_filter, lagrangian=lagrangian,
    )
    write_metrics_csv(run_dir / f"metrics_seed{seed}.csv", log, config.total_steps)
    save_checkpoint(str(run_dir / f"agent_seed{seed}.ckpt"), agent.state_components())

    summary = {
        "seed": seed,
        "episodes": len(log.episodes),
        "violation_rate": log.violation_rate(),
    }
    returns = log.returns()
    if len(returns):
        tail = returns[-max(1, len(returns) // 10):]
        summary["final_return_median"] = float(np.median(tail))
    if action_filter is not None:
        summary["filter"] = action_filter.counters()
    if config.eval_episodes:
        records = evaluate_policy(
            env, agent, config.eval_episodes, np.random.default_rng([seed, 3]),
            mapper=mapper, action_filter=action_filter,
        )
        write_eval_csv(run_dir / f"eval_seed{seed}.csv", records)
        summary["eval_return_median"] = float(np.median([r.return_ for r in records]))
        summary["eval_violation_rate"] = float(np.mean([r.violated for r in records]))
    return summary


def evaluate_run(run_dir, seed: int | None = None, episodes: int | None = None) -> dict:
    """Re-evaluate trained checkpoints from a finished run directory.

    Rebuilds each requested agent from its checkpoint and runs fixed-policy
    episodes on the evaluation stream, rewriting eval_seed<k>.csv. Returns
    {seed: {return_median, violation_rate, episodes}}.
    """
    run_dir = Path(run_dir)
    config = load_config(str(run_dir / "effective-config.ini"))
    base, filt_name = parse_algorithm(config.algorithm)
    feas_params = ensure_feasibility_params(config, run_dir)
    seeds = [seed] if seed is not None else list(config.seeds)
    n = episodes or config.eval_episodes or 100
    results = {}
    for s in seeds:
        env = build_env(config)
        agent = build_agent(config, env, np.random.default_rng([s, 1]))
        agent.load_components(load_checkpoint(str(run_dir / f"agent_seed{s}.ckpt")))
        mapper = LatentMapper(env, feas_params) if base.startswith("am") else None
        action_filter = None
        if filt_name is not None:
            action_filter = make_filter(filt_name, env, build_feasibility_model(config))
        records = evaluate_policy(
            env, agent, n, np.random.default_rng([s, 3]),
            mapper=mapper, action_filter=action_filter,
        )
        write_eval_csv(run_dir / f"eval_seed{s}.csv", records)
        results[s] = {
            "return_median": float(np.median([r.return_ for r in records])),
            "violation_rate": float(np.mean([r.violated for r in records])),
            "episodes": n,
        }
    return results


def run(config: RunConfig, base_dir: str | None = None) -> Path:
    """Execute a full run; returns the artifact directory."""
    run_dir = Path(base_dir or config.out_dir) / config.name
    run_dir.mkdir(parents=True, exist_ok=True)
    effective = dump_config(config)

    manifest_path = run_dir / "manifest.json"
    if manifest_path.exists():
        previous = json.loads(manifest_path.read_text())
        if previous["config"] != effective:
            raise RuntimeError(
                f"{manifest_path} belongs to a different configuration; "
                "choose a fresh run_name or out_dir"
            )
    else:
        manifest = {
            "config": effective,
            "revision": source_revision(),
            "seeds": list(config.seeds),
            "started": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "outputs": {
                "metrics": [f"metrics_seed{s}.csv" for s in config.seeds],
                "checkpoints": [f"agent_seed{s}.ckpt" for s in config.seeds],
            },
        }
        manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
        (run_dir / "effective-config.ini").write_text(effective)

    feas_params = ensure_feasibility_params(config, run_dir)
    summaries = []
    for seed in config.seeds:
        metrics = run_dir / f"metrics_seed{seed}.csv"
        ckpt = run_dir / f"agent_seed{seed}.ckpt"
        if metrics.exists() and ckpt.exists():
            summaries.append({"seed": seed, "resumed": True})
            continue
        summaries.append(train_one_seed(config, seed, feas_params, run_dir))

    (run_dir / "completed.json").write_text(json.dumps({
        "finished": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "seeds": summaries,
    }, indent=2) + "\n")
    return run_dir
