"""Per-transition cost aggregation."""

from __future__ import annotations

import numpy as np


def joint_cost(costs, bounds) -> float:
    """Sum of bound violations: sum_i max(0, C_i - w_i)."""
    costs = np.asarray(costs, dtype=np.float64)
    bounds = np.asarray(bounds, dtype=np.float64)
    if costs.shape != bounds.shape:
        raise ValueError(f"costs {costs.shape} and bounds {bounds.shape} differ in length")
    return float(np.maximum(costs - bounds, 0.0).sum())
