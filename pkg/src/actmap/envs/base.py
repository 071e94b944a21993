"""Shared environment interface.

Environments are seeded, stepwise-deterministic simulators: (seed, action
sequence) fully determines a trajectory. Constraint violations terminate the
episode and are reported in-band through StepResult.info.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass
class StepResult:
    state: Any
    reward: float
    done: bool
    info: dict = field(default_factory=dict)

    @property
    def violation(self) -> bool:
        return bool(self.info.get("violation", False))


class Env:
    """Minimal contract all environments satisfy."""

    action_dim: int

    def reset(self, seed: int):
        raise NotImplementedError

    def step(self, action: np.ndarray) -> StepResult:
        raise NotImplementedError

    def partial_state(self, state=None):
        """Feasibility-relevant slice of the (current) state; objective fields omitted."""
        raise NotImplementedError

    def generate_partial_state(self, rng: np.random.Generator):
        """Fresh feasibility-relevant state for pretraining, independent of episodes."""
        raise NotImplementedError

    def partial_features(self, partial) -> np.ndarray:
        """Fixed-size encoding of a partial state for the feasibility network."""
        raise NotImplementedError

    def obs_parts(self, state=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(ego, items, mask) encoding for the set-pooling networks."""
        raise NotImplementedError

    def safe_action(self, state=None) -> np.ndarray | None:
        """A known-feasible action at the given state, or None if the env has none."""
        return None


def violation_result(state, constraint: str, reward: float = 0.0, **extra) -> StepResult:
    info = {"violation": True, "constraint": constraint, "cost": 1.0}
    info.update(extra)
    return StepResult(state, reward, True, info)


def plain_result(state, reward: float, done: bool, **extra) -> StepResult:
    info = {"violation": False, "constraint": None, "cost": 0.0}
    info.update(extra)
    return StepResult(state, reward, done, info)
