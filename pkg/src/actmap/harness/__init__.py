"""Experiment harness: configuration, run orchestration, timing, reports."""

from .config import (
    BASE_ALGORITHMS,
    FILTER_NAMES,
    ConfigError,
    RunConfig,
    default_run_config,
    dump_config,
    load_config,
    parse_algorithm,
    validate,
)
from .plots import aggregate_run, export_plots, seed_curves, write_band_csv
from .run import (
    build_agent,
    build_env,
    build_feasibility_model,
    ensure_feasibility_params,
    evaluate_run,
    run,
    train_one_seed,
    write_eval_csv,
    write_metrics_csv,
)
from .sweep import DEFAULT_S_VALUES, SweepReport, s_sweep, write_sweep_csv
from .timing import TimingReport, measure_decisions

__all__ = [
    "BASE_ALGORITHMS",
    "FILTER_NAMES",
    "ConfigError",
    "RunConfig",
    "default_run_config",
    "dump_config",
    "load_config",
    "parse_algorithm",
    "validate",
    "aggregate_run",
    "export_plots",
    "seed_curves",
    "write_band_csv",
    "build_agent",
    "build_env",
    "build_feasibility_model",
    "ensure_feasibility_params",
    "evaluate_run",
    "run",
    "train_one_seed",
    "write_eval_csv",
    "write_metrics_csv",
    "DEFAULT_S_VALUES",
    "SweepReport",
    "s_sweep",
    "write_sweep_csv",
    "TimingReport",
    "measure_decisions",
]
