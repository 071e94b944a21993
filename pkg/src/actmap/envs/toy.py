"""Two-disk toy environment: navigation with disconnected feasible action sets.

The agent moves in the unit square toward a goal. Each step the feasible
action set is the union of two disjoint disks inside the action square
[-1,1]^2, resampled per step and visible in the observation. Everything is
closed-form, including a perfect latent-to-action map, so the environment
doubles as the ground-truth oracle for feasibility-training tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Env, StepResult, plain_result, violation_result


@dataclass
class DiskPair:
    """Feasible action region: two disjoint disks in the action square."""

    centers: np.ndarray  # (2, 2)
    radii: np.ndarray  # (2,)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.centers.ravel(), self.radii])

    @staticmethod
    def from_vector(v: np.ndarray) -> "DiskPair":
        v = np.asarray(v, dtype=np.float64)
        return DiskPair(centers=v[:4].reshape(2, 2).copy(), radii=v[4:6].copy())


@dataclass
class ToyDiskState:
    position: np.ndarray  # (2,) in [0,1]^2
    goal: np.ndarray  # (2,)
    disks: DiskPair
    steps: int = 0


def sample_disks(rng: np.random.Generator, r_lo=0.25, r_hi=0.4, margin=0.1) -> DiskPair:
    """Two disjoint disks fully inside the action square."""
    while True:
        radii = rng.uniform(r_lo, r_hi, size=2)
        centers = rng.uniform(-0.95 + radii[:, None], 0.95 - radii[:, None], size=(2, 2))
        if np.linalg.norm(centers[0] - centers[1]) >= radii.sum() + margin:
            return DiskPair(centers=centers, radii=radii)


def disk_distance(disks: DiskPair, actions: np.ndarray) -> np.ndarray:
    """Distance to the nearest disk; 0 inside either."""
    actions = np.atleast_2d(actions)
    d0 = np.linalg.norm(actions - disks.centers[0], axis=1) - disks.radii[0]
    d1 = np.linalg.norm(actions - disks.centers[1], axis=1) - disks.radii[1]
    return np.maximum(np.minimum(d0, d1), 0.0)


def disk_feasible(disks: DiskPair, actions: np.ndarray) -> np.ndarray:
    return disk_distance(disks, actions) == 0.0


def disk_membership(disks: DiskPair, actions: np.ndarray) -> np.ndarray:
    """-1 outside both disks, else index of the containing (nearest) disk."""
    actions = np.atleast_2d(actions)
    d0 = np.linalg.norm(actions - disks.centers[0], axis=1) - disks.radii[0]
    d1 = np.linalg.norm(actions - disks.centers[1], axis=1) - disks.radii[1]
    inside = np.minimum(d0, d1) <= 0.0
    return np.where(inside, np.where(d0 <= d1, 0, 1), -1)


def perfect_disk_map(disks: DiskPair, z: np.ndarray) -> np.ndarray:
    """Closed-form surjection [-1,1]^2 -> the two disks.

    The sign of z_0 selects a disk; the remaining square is sent onto the
    disk with the elliptical square-to-disk mapping, so the image covers
    both disks exactly and violations are impossible by construction.
    """
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    pick = (z[:, 0] >= 0).astype(int)
    # unfold each half of z_0 back to [-1, 1]
    u = np.where(pick == 1, 2.0 * z[:, 0] - 1.0, 2.0 * z[:, 0] + 1.0)
    v = z[:, 1]
    x = u * np.sqrt(np.maximum(1.0 - v**2 / 2.0, 0.0))
    y = v * np.sqrt(np.maximum(1.0 - u**2 / 2.0, 0.0))
    unit = np.stack([x, y], axis=1)
    return disks.centers[pick] + disks.radii[pick, None] * unit


class ToyDiskEnv(Env):
    """Goal reaching under per-step disconnected action constraints."""

    action_dim = 2
    latent_dim = 2
    partial_dim = 6  # two centers + two radii
    ego_dim = 10  # position, goal offset, disk parameters
    item_dim = 1
    max_items = 0

    def __init__(self, step_scale=0.1, goal_tolerance=0.05, timeout=50, goal_reward=1.0):
        self.step_scale = step_scale
        self.goal_tolerance = goal_tolerance
        self.timeout = timeout
        self.goal_reward = goal_reward
        self._rng = None
        self.state: ToyDiskState | None = None

    def reset(self, seed: int) -> ToyDiskState:
        self._rng = np.random.default_rng(seed)
        position = self._rng.uniform(0.1, 0.9, size=2)
        goal = self._rng.uniform(0.1, 0.9, size=2)
        self.state = ToyDiskState(position, goal, sample_disks(self._rng))
        return self.state

    def step(self, action: np.ndarray) -> StepResult:
        s = self.state
        action = np.clip(np.asarray(action, dtype=np.float64), -1.0, 1.0)
        if not bool(disk_feasible(s.disks, action)[0]):
            return violation_result(s, "outside-feasible-disks")
        new_pos = np.clip(s.position + self.step_scale * action, 0.0, 1.0)
        reward = float(np.linalg.norm(s.position - s.goal) - np.linalg.norm(new_pos - s.goal))
        s.position = new_pos
        s.steps += 1
        if np.linalg.norm(new_pos - s.goal) <= self.goal_tolerance:
            return plain_result(s, reward + self.goal_reward, True, success=True)
        if s.steps >= self.timeout:
            return plain_result(s, reward, True, timeout=True)
        s.disks = sample_disks(self._rng)
        return plain_result(s, reward, False)

    # feasibility-side interface

    def partial_state(self, state: ToyDiskState | None = None) -> np.ndarray:
        s = state or self.state
        return s.disks.as_vector()

    def generate_partial_state(self, rng: np.random.Generator) -> np.ndarray:
        return sample_disks(rng).as_vector()

    def partial_features(self, partial: np.ndarray) -> np.ndarray:
        return np.asarray(partial, dtype=np.float64)

    def feasible(self, partial: np.ndarray, actions: np.ndarray) -> np.ndarray:
        return disk_feasible(DiskPair.from_vector(partial), actions)

    def violation_measure(self, partial: np.ndarray, actions: np.ndarray) -> np.ndarray:
        return disk_distance(DiskPair.from_vector(partial), actions)

    # observation encoding

    def obs_parts(self, state: ToyDiskState | None = None):
        s = state or self.state
        ego = np.concatenate([s.position, s.goal - s.position, s.disks.as_vector()])
        return ego, np.zeros((0, 1)), np.zeros(0)

    def safe_action(self, state: ToyDiskState | None = None) -> np.ndarray:
        s = state or self.state
        return s.disks.centers[0].copy()
