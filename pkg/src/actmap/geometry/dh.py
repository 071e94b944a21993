"""Kinematics of the 7-DOF arm from its DH table.

The table follows the proximal (Craig) variant: each row's transform is
Rot_x(alpha) Trans_x(a) Rot_z(theta) Trans_z(d), which places the first
joint's frame at the base-height translation (0, 0, 0.333). The last row is
the static flange offset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PI_2 = np.pi / 2.0


@dataclass(frozen=True)
class DHRow:
    """One table row: link length a [m], offset d [m], twist alpha and angle theta [rad]."""

    a: float
    d: float
    alpha: float
    theta: float = 0.0

    def __post_init__(self):
        for v in (self.a, self.d, self.alpha, self.theta):
            if not np.isfinite(v):
                raise ValueError("DH parameters must be finite")


# 7 actuated joints plus the flange; theta column holds the joint variable.
ARM_DH_ROWS = (
    DHRow(0.0, 0.333, 0.0),
    DHRow(0.0, 0.0, -_PI_2),
    DHRow(0.0, 0.316, _PI_2),
    DHRow(0.0825, 0.0, _PI_2),
    DHRow(-0.0825, 0.384, -_PI_2),
    DHRow(0.0, 0.0, _PI_2),
    DHRow(0.088, 0.0, _PI_2),
    DHRow(0.0, 0.107, 0.0),
)

N_JOINTS = 7

# (lower, upper) per actuated joint [rad]
JOINT_LIMITS = np.array(
    [
        [-2.7437, 2.7437],
        [-1.7837, 1.7837],
        [-2.9007, 2.9007],
        [-3.0421, -0.1518],
        [-2.8065, 2.8065],
        [0.5445, 4.5169],
        [-3.0159, 3.0159],
    ]
)


def dh_transform(row: DHRow) -> np.ndarray:
    """4x4 homogeneous transform of one table row."""
    ct, st = np.cos(row.theta), np.sin(row.theta)
    ca, sa = np.cos(row.alpha), np.sin(row.alpha)
    return np.array(
        [
            [ct, -st, 0.0, row.a],
            [st * ca, ct * ca, -sa, -row.d * sa],
            [st * sa, ct * sa, ca, row.d * ca],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def fk_frames(joints: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Frame origins along the chain and the flange rotation.

    Returns (origins, rotation): origins is (9, 3) starting at the base,
    one entry per table row after that; rotation is the 3x3 flange frame.
    """
    joints = np.asarray(joints, dtype=np.float64)
    if joints.shape != (N_JOINTS,):
        raise ValueError(f"expected {N_JOINTS} joint angles, got {joints.shape}")
    t = np.eye(4)
    origins = np.zeros((len(ARM_DH_ROWS) + 1, 3))
    for i, row in enumerate(ARM_DH_ROWS):
        theta = joints[i] if i < N_JOINTS else 0.0
        t = t @ dh_transform(DHRow(row.a, row.d, row.alpha, theta))
        origins[i + 1] = t[:3, 3]
    return origins, t[:3, :3].copy()


def fk_origins_batch(joints: np.ndarray) -> np.ndarray:
    """Frame origins for a batch of configurations: (B, 7) -> (B, 9, 3)."""
    joints = np.asarray(joints, dtype=np.float64)
    b = joints.shape[0]
    t = np.broadcast_to(np.eye(4), (b, 4, 4)).copy()
    origins = np.zeros((b, len(ARM_DH_ROWS) + 1, 3))
    for i, row in enumerate(ARM_DH_ROWS):
        theta = joints[:, i] if i < N_JOINTS else np.zeros(b)
        ct, st = np.cos(theta), np.sin(theta)
        ca, sa = np.cos(row.alpha), np.sin(row.alpha)
        m = np.zeros((b, 4, 4))
        m[:, 0, 0] = ct
        m[:, 0, 1] = -st
        m[:, 0, 3] = row.a
        m[:, 1, 0] = st * ca
        m[:, 1, 1] = ct * ca
        m[:, 1, 2] = -sa
        m[:, 1, 3] = -row.d * sa
        m[:, 2, 0] = st * sa
        m[:, 2, 1] = ct * sa
        m[:, 2, 2] = ca
        m[:, 2, 3] = row.d * ca
        m[:, 3, 3] = 1.0
        t = t @ m
        origins[:, i + 1] = t[:, :3, 3]
    return origins


def flange_pose(joints: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(rotation 3x3, position 3) of the flange frame."""
    origins, rot = fk_frames(joints)
    return rot, origins[-1]
