"""Kinematics, collision and curve primitives shared by the environments."""

from .bezier import CubicBezier, polyline_length
from .collision import (
    Capsule,
    Sphere,
    capsule_sphere_clearance,
    chain_sphere_clearances,
    rect_signed_distance,
)
from .dh import (
    ARM_DH_ROWS,
    JOINT_LIMITS,
    N_JOINTS,
    DHRow,
    dh_transform,
    fk_frames,
    fk_origins_batch,
    flange_pose,
)
from .rotations import matrix_to_quat, quat_to_matrix, random_quaternion, rotation_angle

__all__ = [
    "ARM_DH_ROWS",
    "JOINT_LIMITS",
    "N_JOINTS",
    "Capsule",
    "CubicBezier",
    "DHRow",
    "Sphere",
    "capsule_sphere_clearance",
    "chain_sphere_clearances",
    "dh_transform",
    "fk_frames",
    "fk_origins_batch",
    "flange_pose",
    "matrix_to_quat",
    "polyline_length",
    "quat_to_matrix",
    "random_quaternion",
    "rect_signed_distance",
    "rotation_angle",
]
