"""7-DOF arm pose-reaching among spherical obstacles.

Actions are joint-angle deltas (normalized units scaled to +-90 degrees)
applied over dt = 0.5 s. Constraints per transition: joint limits, a 0.3 m/s
cartesian speed cap on every frame origin, and capsule-hull clearance from
all obstacles. The reward is the weighted decrement of the end-effector's
position and orientation error toward the target pose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import (
    JOINT_LIMITS,
    N_JOINTS,
    chain_sphere_clearances,
    fk_frames,
    fk_origins_batch,
    matrix_to_quat,
    rotation_angle,
)
from .base import Env, StepResult, plain_result, violation_result

DT = 0.5  # seconds per step
MAX_DELTA = np.pi / 2  # largest joint change per step
SPEED_LIMIT = 0.3  # m/s cap on every frame origin
MAX_OBSTACLES = 20
CANDIDATE_OBSTACLES = 30

# workspace box obstacles are sampled in
_OBS_LO = np.array([-0.8, -0.8, 0.05])
_OBS_HI = np.array([0.8, 0.8, 1.1])
_OBS_RADIUS = (0.05, 0.15)


@dataclass
class RobotState:
    joints: np.ndarray  # (7,)
    target_rot: np.ndarray  # (3, 3)
    target_pos: np.ndarray  # (3,)
    obstacle_centers: np.ndarray  # (M, 3), M <= 20
    obstacle_radii: np.ndarray  # (M,)
    steps: int = 0


@dataclass
class RobotPartialState:
    """Feasibility-relevant fields only: configuration and obstacles."""

    joints: np.ndarray
    obstacle_centers: np.ndarray
    obstacle_radii: np.ndarray


def chain_clearances(joints, centers, radii, capsule_radius):
    """(links, obstacles) signed clearances of the capsule hull at one configuration."""
    origins, _ = fk_frames(joints)
    seg_r = np.full(len(origins) - 1, capsule_radius)
    return chain_sphere_clearances(origins[:-1], origins[1:], seg_r, centers, radii)


def one_step_violation_batch(
    partial: "RobotPartialState", actions: np.ndarray, capsule_radius: float = 0.06
) -> tuple[np.ndarray, list]:
    """Continuous violation measure of one-step predictions for a batch of actions.

    Sums, per action: joint-limit overshoot [rad], per-frame displacement
    beyond the speed cap [m], and capsule-hull penetration depth [m]. Zero
    means the transition satisfies every constraint. The second return gives
    the first violated category per action (None when feasible).
    """
    actions = np.atleast_2d(np.clip(np.asarray(actions, dtype=np.float64), -1.0, 1.0))
    b = len(actions)
    new_joints = partial.joints + actions * MAX_DELTA

    limit = np.maximum(JOINT_LIMITS[:, 0] - new_joints, 0.0).sum(axis=1)
    limit += np.maximum(new_joints - JOINT_LIMITS[:, 1], 0.0).sum(axis=1)

    old_origins, _ = fk_frames(partial.joints)
    new_origins = fk_origins_batch(new_joints)
    disp = np.linalg.norm(new_origins - old_origins, axis=2)
    speed = np.maximum(disp - SPEED_LIMIT * DT, 0.0).sum(axis=1)

    if len(partial.obstacle_centers):
        n_links = new_origins.shape[1] - 1
        clear = chain_sphere_clearances(
            new_origins[:, :-1].reshape(-1, 3),
            new_origins[:, 1:].reshape(-1, 3),
            np.full(b * n_links, capsule_radius),
            partial.obstacle_centers,
            partial.obstacle_radii,
        )
        # sorted accumulation makes G exactly independent of obstacle ordering
        pen = np.sort(np.maximum(-clear, 0.0).reshape(b, -1), axis=1)
        collision = pen.sum(axis=1)
    else:
        collision = np.zeros(b)

    total = limit + speed + collision
    reasons = []
    for i in range(b):
        if total[i] == 0.0:
            reasons.append(None)
        elif limit[i] > 0:
            reasons.append("joint-limit")
        elif speed[i] > 0:
            reasons.append("cartesian-speed")
        else:
            reasons.append("collision")
    return total, reasons


def sample_joints(rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    lo, hi = JOINT_LIMITS[:, 0], JOINT_LIMITS[:, 1]
    if n is None:
        return rng.uniform(lo, hi)
    return rng.uniform(lo, hi, size=(n, N_JOINTS))


class RobotArmEnv(Env):
    action_dim = N_JOINTS
    latent_dim = N_JOINTS
    ego_dim = N_JOINTS + 7  # joints + target quaternion + target position
    item_dim = 4  # obstacle center + radius
    max_items = MAX_OBSTACLES

    def __init__(
        self,
        capsule_radius=0.06,
        w_pos=1.0,
        w_rot=0.5,
        timeout=100,
        pos_tolerance=0.05,
        rot_tolerance=0.1,
    ):
        self.capsule_radius = capsule_radius
        self.w_pos = w_pos
        self.w_rot = w_rot
        self.timeout = timeout
        self.pos_tolerance = pos_tolerance
        self.rot_tolerance = rot_tolerance
        self.state: RobotState | None = None

    def reset(self, seed: int) -> RobotState:
        """Start configuration, reachable target pose, obstacle field.

        30 obstacle candidates are sampled and those touching the start or
        the target configuration are rejected; at most 20 survive.
        """
        rng = np.random.default_rng(seed)
        start = sample_joints(rng)
        target_joints = sample_joints(rng)
        centers = rng.uniform(_OBS_LO, _OBS_HI, size=(CANDIDATE_OBSTACLES, 3))
        radii = rng.uniform(*_OBS_RADIUS, size=CANDIDATE_OBSTACLES)
        keep = np.ones(CANDIDATE_OBSTACLES, dtype=bool)
        for q in (start, target_joints):
            clear = chain_clearances(q, centers, radii, self.capsule_radius)
            keep &= clear.min(axis=0) > 0.0
        origins, rot = fk_frames(target_joints)
        self.state = RobotState(
            joints=start,
            target_rot=rot,
            target_pos=origins[-1],
            obstacle_centers=centers[keep][:MAX_OBSTACLES],
            obstacle_radii=radii[keep][:MAX_OBSTACLES],
        )
        return self.state

    def step(self, action: np.ndarray) -> StepResult:
        s = self.state
        action = np.clip(np.asarray(action, dtype=np.float64), -1.0, 1.0)
        measure, reasons = one_step_violation_batch(
            self.partial_state(s), action[None, :], self.capsule_radius
        )
        if measure[0] > 0.0:
            return violation_result(s, reasons[0])

        new_joints = s.joints + action * MAX_DELTA
        old_origins, old_rot = fk_frames(s.joints)
        new_origins, new_rot = fk_frames(new_joints)
        old_pos_err = float(np.linalg.norm(old_origins[-1] - s.target_pos))
        old_rot_err = rotation_angle(old_rot, s.target_rot)
        new_pos_err = float(np.linalg.norm(new_origins[-1] - s.target_pos))
        new_rot_err = rotation_angle(new_rot, s.target_rot)
        reward = self.w_pos * (old_pos_err - new_pos_err) + self.w_rot * (
            old_rot_err - new_rot_err
        )
        s.joints = new_joints
        s.steps += 1
        if new_pos_err <= self.pos_tolerance and new_rot_err <= self.rot_tolerance:
            return plain_result(s, reward, True, success=True)
        if s.steps >= self.timeout:
            return plain_result(s, reward, True, timeout=True)
        return plain_result(s, reward, False)

    # feasibility-side interface

    def partial_state(self, state: RobotState | None = None) -> RobotPartialState:
        s = state or self.state
        return RobotPartialState(
            joints=s.joints.copy(),
            obstacle_centers=s.obstacle_centers.copy(),
            obstacle_radii=s.obstacle_radii.copy(),
        )

    def generate_partial_state(
        self, rng: np.random.Generator, candidates: int = CANDIDATE_OBSTACLES
    ) -> RobotPartialState:
        """Random configuration plus obstacles, colliders with the arm removed.

        Obstacle density is configurable above the episode default so
        pretraining sees more safety-critical states.
        """
        joints = sample_joints(rng)
        centers = rng.uniform(_OBS_LO, _OBS_HI, size=(candidates, 3))
        radii = rng.uniform(*_OBS_RADIUS, size=candidates)
        clear = chain_clearances(joints, centers, radii, self.capsule_radius)
        keep = clear.min(axis=0) > 0.0
        return RobotPartialState(joints, centers[keep][:MAX_OBSTACLES], radii[keep][:MAX_OBSTACLES])

    def partial_features(self, partial: RobotPartialState) -> np.ndarray:
        """Joints plus a zero-padded obstacle block with per-slot presence flags."""
        items = np.zeros((MAX_OBSTACLES, 5))
        m = len(partial.obstacle_centers)
        if m:
            items[:m, :3] = partial.obstacle_centers
            items[:m, 3] = partial.obstacle_radii
            items[:m, 4] = 1.0
        return np.concatenate([partial.joints, items.ravel()])

    # observation encoding

    def obs_parts(self, state: RobotState | None = None):
        s = state or self.state
        ego = np.concatenate([s.joints, matrix_to_quat(s.target_rot), s.target_pos])
        m = len(s.obstacle_centers)
        items = np.zeros((MAX_OBSTACLES, self.item_dim))
        mask = np.zeros(MAX_OBSTACLES)
        if m:
            items[:m, :3] = s.obstacle_centers
            items[:m, 3] = s.obstacle_radii
            mask[:m] = 1.0
        return ego, items, mask

    def safe_action(self, state: RobotState | None = None) -> np.ndarray:
        """No motion: always feasible from a valid state."""
        return np.zeros(N_JOINTS)
