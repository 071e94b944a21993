"""Command-line interface for the workbench.

Subcommands:
    pretrain      train or load a feasibility policy, save its checkpoint
    train         full run: pretrain/load, train per seed, evaluate, artifacts
    eval          re-evaluate trained checkpoints from a run directory
    timing        per-decision latency of base, mapped, and projection variants
    s-sweep       spline feasibility agreement across evaluation densities
    export-plots  aggregate metrics CSVs into median/min/max band curves

Training-style subcommands read an optional INI config file; every [run]
field also has a dedicated flag, and any field in any section can be set
with repeated --set section.key=value overrides. Exit codes: 0 success,
1 configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .harness import (
    ConfigError,
    RunConfig,
    ensure_feasibility_params,
    evaluate_run,
    export_plots,
    load_config,
    measure_decisions,
    parse_algorithm,
    run,
    s_sweep,
    write_sweep_csv,
)


def _run_field_names():
    return [f.name for f in dataclasses.fields(RunConfig)
            if f.name not in ("agent", "pretrain")]


def add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default="", metavar="FILE",
                        help="INI configuration file")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE",
                        help="override any field, e.g. --set agent.gamma=0.9")
    for name in _run_field_names():
        parser.add_argument("--" + name.replace("_", "-"), default=None,
                            metavar="V", help=f"[run] {name}")


def build_config(args) -> RunConfig:
    overrides = {}
    for name in _run_field_names():
        value = getattr(args, name, None)
        if value is not None:
            overrides[f"run.{name}"] = value
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError([f"override {item!r} is not SECTION.KEY=VALUE"])
        overrides[key.strip()] = value
    try:
        return load_config(args.config, overrides)
    except OSError as exc:
        raise ConfigError([f"config file: {exc}"])


def cmd_pretrain(args) -> int:
    config = build_config(args)
    base, _ = parse_algorithm(config.algorithm)
    if not base.startswith("am"):
        raise ConfigError(
            ["[run] algorithm: pretraining applies to am-sac / am-ppo"]
        )
    run_dir = Path(config.out_dir) / config.name
    run_dir.mkdir(parents=True, exist_ok=True)
    ensure_feasibility_params(config, run_dir)
    target = config.feasibility_checkpoint or str(run_dir / "feasibility.ckpt")
    print(f"feasibility checkpoint: {target}")
    return 0


def cmd_train(args) -> int:
    config = build_config(args)
    run_dir = run(config)
    print(f"run complete: {run_dir}")
    return 0


def cmd_eval(args) -> int:
    results = evaluate_run(args.run_dir, seed=args.seed, episodes=args.episodes)
    for seed, stats in sorted(results.items()):
        print(f"seed {seed}: median return {stats['return_median']:.4f}, "
              f"violation rate {stats['violation_rate']:.4f} "
              f"over {stats['episodes']} episodes")
    return 0


def cmd_timing(args) -> int:
    config = build_config(args)
    report = measure_decisions(config, decisions=args.decisions, seed=args.seed)
    for name, ms in report.rows():
        print(f"{name:>15}: {ms:.4f} ms/decision")
    print(f"decisions per variant: {report.decisions}, "
          f"projection interventions: {report.projection_interventions}")
    return 0


def cmd_sweep(args) -> int:
    report = s_sweep(pairs=args.pairs, seed=args.seed)
    ref = report.s_values[-1]
    for i, s in enumerate(report.s_values):
        print(f"S={s:>4}: agreement vs S={ref} "
              f"{report.agreement[i, -1] * 100.0:6.2f}%, "
              f"eval time {report.wall_time_s[i]:.3f}s, "
              f"feasible fraction {report.feasible_fraction[i]:.3f}")
    if args.out:
        write_sweep_csv(report, args.out)
        print(f"wrote {args.out}")
    return 0


def cmd_export_plots(args) -> int:
    written = export_plots(args.run_dirs, args.out_prefix)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actmap",
        description="constrained-RL workbench: feasibility pretraining, "
                    "latent-space and baseline agents, experiment tooling",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("pretrain", help="train or load a feasibility policy")
    add_config_flags(p)
    p.set_defaults(handler=cmd_pretrain)

    p = sub.add_parser("train", help="full training run with artifacts")
    add_config_flags(p)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("eval", help="re-evaluate checkpoints from a run")
    p.add_argument("run_dir", help="run directory with effective-config.ini")
    p.add_argument("--seed", type=int, default=None,
                   help="evaluate one seed (default: all in the config)")
    p.add_argument("--episodes", type=int, default=None,
                   help="episode count (default: eval_episodes from config)")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("timing", help="per-decision latency comparison")
    add_config_flags(p)
    p.add_argument("--decisions", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_timing)

    p = sub.add_parser("s-sweep", help="spline check density agreement sweep")
    p.add_argument("--pairs", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="", help="write the report as CSV")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("export-plots", help="band curves from metrics CSVs")
    p.add_argument("run_dirs", nargs="+", help="run directories to aggregate")
    p.add_argument("--out-prefix", default="plots/curve",
                   help="path prefix for the emitted CSVs")
    p.set_defaults(handler=cmd_export_plots)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "handler", None) is None:
        parser.print_help()
        return 1
    try:
        return args.handler(args)
    except ConfigError as exc:
        print("configuration error:", file=sys.stderr)
        for line in exc.diagnostics:
            print(f"  {line}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure; artifacts stay for resume
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
