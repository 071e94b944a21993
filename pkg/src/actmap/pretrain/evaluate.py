"""Feasibility-policy evaluation: precision and a pairwise-distance coverage proxy.

Precision is the feasible fraction of generated actions. Coverage is the
mean pairwise Euclidean distance among the feasible ones; a generator that
collapses onto one point scores 0 even at perfect precision, which is what
makes the pair of metrics worth watching together. Convergence is judged by
an operator watching both stabilize, not auto-detected: the feasibility
evaluations are too noisy a signal to stop on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..autodiff import NetworkParams
from .policy import map_latent_batch


@dataclass
class FeasEvalReport:
    precision: float
    coverage: float | None  # None when no state yields two feasible actions
    per_state_precision: np.ndarray
    per_state_coverage: list
    mode_occupancy: list | None = None

    def __post_init__(self):
        if not 0.0 <= self.precision <= 1.0:
            raise ValueError("precision must be a fraction")


def mean_pairwise_distance(points: np.ndarray) -> float | None:
    """Mean Euclidean distance over all unordered pairs; None below 2 points."""
    n = len(points)
    if n < 2:
        return None
    total = 0.0
    for i in range(n - 1):
        total += float(np.linalg.norm(points[i + 1 :] - points[i], axis=1).sum())
    return 2.0 * total / (n * (n - 1))


def evaluate_actions(partials, actions_per_state, model, mode_fn=None) -> FeasEvalReport:
    """Score already-generated actions; the metric core behind evaluate()."""
    precisions = []
    coverages = []
    modes = [] if mode_fn is not None else None
    for partial, actions in zip(partials, actions_per_state):
        feasible = model.g_batch(partial, actions)
        precisions.append(float(feasible.mean()))
        coverages.append(mean_pairwise_distance(actions[feasible]))
        if mode_fn is not None:
            modes.append(mode_fn(partial, actions[feasible]))
    defined = [c for c in coverages if c is not None]
    return FeasEvalReport(
        precision=float(np.mean(precisions)),
        coverage=float(np.mean(defined)) if defined else None,
        per_state_precision=np.array(precisions),
        per_state_coverage=coverages,
        mode_occupancy=modes,
    )


def evaluate(
    params: NetworkParams,
    env,
    partials,
    m: int,
    model,
    rng: np.random.Generator,
    mode_fn=None,
) -> FeasEvalReport:
    """Generate m actions per state from uniform latents and score them."""
    if m < 2:
        raise ValueError("need at least 2 samples per state")
    actions_per_state = []
    for partial in partials:
        z = rng.uniform(-1.0, 1.0, size=(m, env.action_dim))
        actions_per_state.append(map_latent_batch(params, env.partial_features(partial), z))
    return evaluate_actions(partials, actions_per_state, model, mode_fn)


def toy_mode_occupancy(partial, actions) -> np.ndarray:
    """Count feasible actions per disk on the two-disk environment."""
    from ..envs.toy import DiskPair, disk_membership

    member = disk_membership(DiskPair.from_vector(partial), actions)
    return np.array([(member == 0).sum(), (member == 1).sum()])
