"""Aggregate per-seed training logs into plot-ready band curves.

Episode rows from ``metrics_seed<k>.csv`` are binned onto a common grid of
1000-step marks. Within each bin a seed contributes the mean episode return
and the violation fraction; bins with no finished episode carry the previous
value forward so every seed is defined on the full grid. Across seeds the
band is (median, min, max) per mark, written as CSV for external plotting.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

GRID_STEP = 1000


def read_episode_rows(metrics_path) -> list[dict]:
    """Episode rows (record == 'episode') from one training metrics CSV."""
    rows = []
    with open(metrics_path, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["record"] != "episode":
                continue
            rows.append(
                {
                    "step": int(row["step"]),
                    "return": float(row["return"]),
                    "violated": row["violated"] in ("1", "True", "true"),
                }
            )
    return rows


def seed_curves(rows: list[dict], total_steps: int):
    """Bin one seed's episodes onto the grid; carry values forward over gaps.

    Returns (grid, returns, violation_rates); leading empty bins hold nan
    until the first episode finishes.
    """
    grid = np.arange(GRID_STEP, total_steps + 1, GRID_STEP)
    returns = np.full(len(grid), np.nan)
    rates = np.full(len(grid), np.nan)
    for i, mark in enumerate(grid):
        lo = mark - GRID_STEP
        bin_rows = [r for r in rows if lo < r["step"] <= mark]
        if bin_rows:
            returns[i] = np.mean([r["return"] for r in bin_rows])
            rates[i] = np.mean([float(r["violated"]) for r in bin_rows])
        elif i > 0:
            returns[i] = returns[i - 1]
            rates[i] = rates[i - 1]
    return grid, returns, rates


def band(curves: np.ndarray):
    """(median, min, max) across seeds, ignoring nan bins."""
    with np.errstate(all="ignore"):
        med = np.nanmedian(curves, axis=0)
        lo = np.nanmin(curves, axis=0)
        hi = np.nanmax(curves, axis=0)
    return med, lo, hi


def aggregate_run(run_dir, total_steps: int | None = None):
    """Band curves for one run directory holding metrics_seed<k>.csv files.

    Returns a dict with the grid and (median, min, max) triples for both
    return and violation rate.
    """
    run_dir = Path(run_dir)
    paths = sorted(run_dir.glob("metrics_seed*.csv"))
    if not paths:
        raise FileNotFoundError(f"no metrics_seed*.csv under {run_dir}")
    per_seed = [read_episode_rows(p) for p in paths]
    if total_steps is None:
        last = max((r["step"] for rows in per_seed for r in rows), default=GRID_STEP)
        total_steps = int(np.ceil(last / GRID_STEP)) * GRID_STEP
    ret_curves, rate_curves = [], []
    grid = None
    for rows in per_seed:
        grid, ret, rate = seed_curves(rows, total_steps)
        ret_curves.append(ret)
        rate_curves.append(rate)
    ret_curves = np.asarray(ret_curves)
    rate_curves = np.asarray(rate_curves)
    ret_med, ret_lo, ret_hi = band(ret_curves)
    rate_med, rate_lo, rate_hi = band(rate_curves)
    return {
        "grid": grid,
        "return": (ret_med, ret_lo, ret_hi),
        "violation_rate": (rate_med, rate_lo, rate_hi),
        "seeds": len(per_seed),
    }


def write_band_csv(path, grid, triple) -> None:
    med, lo, hi = triple
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "median", "min", "max"])
        for i, mark in enumerate(grid):
            if np.isnan(med[i]):
                continue
            writer.writerow([int(mark), repr(float(med[i])),
                             repr(float(lo[i])), repr(float(hi[i]))])


def export_plots(run_dirs, out_prefix, total_steps: int | None = None) -> list:
    """Write <prefix>_<run>_return.csv and _violation.csv per run directory."""
    written = []
    parent = Path(out_prefix).parent
    if str(parent) not in ("", "."):
        parent.mkdir(parents=True, exist_ok=True)
    for run_dir in run_dirs:
        run_dir = Path(run_dir)
        agg = aggregate_run(run_dir, total_steps)
        base = f"{out_prefix}_{run_dir.name}"
        ret_path = Path(f"{base}_return.csv")
        vio_path = Path(f"{base}_violation.csv")
        write_band_csv(ret_path, agg["grid"], agg["return"])
        write_band_csv(vio_path, agg["grid"], agg["violation_rate"])
        written.extend([ret_path, vio_path])
    return written
