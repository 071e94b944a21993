"""Feasibility models: Boolean g and continuous violation G per environment.

g(s, a) is true exactly when G(s, a) = 0; both are defined over partial
states (feasibility-relevant fields only). The underlying violation math
lives with each environment so the simulator and the model can never drift
apart; single-action evaluation is the batch evaluation of size one, so the
batch invariant holds bitwise.

Both environments here are exact models: transitions are deterministic and
a feasible one-step prediction always admits a violation-free continuation
(the robot can stop; a feasible spline can be followed and replanned).
"""

from __future__ import annotations

import numpy as np

from ..envs.path import PathPartialState, spline_violation_batch
from ..envs.robot import RobotPartialState, one_step_violation_batch
from ..envs.toy import DiskPair, disk_distance


class FeasibilityModel:
    """Boolean/continuous feasibility over one environment family."""

    def violation_batch(self, partial, actions: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def G(self, partial, action: np.ndarray) -> float:
        return float(self.violation_batch(partial, np.asarray(action)[None, :])[0])

    def g(self, partial, action: np.ndarray) -> bool:
        return self.G(partial, action) == 0.0

    def g_batch(self, partial, actions: np.ndarray) -> np.ndarray:
        return self.violation_batch(partial, actions) == 0.0


class RobotFeasibilityModel(FeasibilityModel):
    """One-step prediction checks: joint limits, frame speed cap, hull clearance."""

    def __init__(self, capsule_radius: float = 0.06):
        self.capsule_radius = capsule_radius

    def violation_batch(self, partial: RobotPartialState, actions: np.ndarray) -> np.ndarray:
        return one_step_violation_batch(partial, actions, self.capsule_radius)[0]


class PathFeasibilityModel(FeasibilityModel):
    """Planned-spline checks at S parameter points plus the length band."""

    def __init__(self, s_points: int = 64):
        if s_points < 2:
            raise ValueError("need at least 2 evaluation points")
        self.s_points = s_points

    def violation_batch(self, partial: PathPartialState, actions: np.ndarray) -> np.ndarray:
        return spline_violation_batch(partial, actions, self.s_points)[0]


class ToyFeasibilityModel(FeasibilityModel):
    """Analytic two-disk membership; the ground-truth oracle for tests."""

    def violation_batch(self, partial: np.ndarray, actions: np.ndarray) -> np.ndarray:
        return disk_distance(DiskPair.from_vector(partial), actions)


MODELS = {
    "toy": ToyFeasibilityModel,
    "robot": RobotFeasibilityModel,
    "path": PathFeasibilityModel,
}


def make_model(env_name: str, **kwargs) -> FeasibilityModel:
    if env_name not in MODELS:
        raise ValueError(f"no feasibility model for environment {env_name!r}")
    return MODELS[env_name](**kwargs)


def trajectory_cost(env, model: FeasibilityModel, policy, seed: int) -> float:
    """Worst continuous violation G over the transitions of one episode.

    ``policy`` maps a state to an action. Because G already aggregates the
    clipped per-constraint overshoots, a clean episode scores exactly 0.0
    and a single 0.05 rad joint-limit breach scores 0.05. One sampled
    trajectory is a diagnostic under-approximation of the true worst case.
    """
    state = env.reset(seed)
    worst = 0.0
    done = False
    while not done:
        action = policy(state)
        worst = max(worst, model.G(env.partial_state(state), action))
        result = env.step(action)
        state = result.state
        done = result.done
    return worst
