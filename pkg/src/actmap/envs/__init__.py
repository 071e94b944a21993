"""Constrained environments: robot arm, spline path planning, two-disk toy."""

from .base import Env, StepResult
from .path import (
    PathPartialState,
    PathPlanEnv,
    PathState,
    decode_spline,
    spline_violation,
    spline_violation_batch,
)
from .robot import (
    RobotArmEnv,
    RobotPartialState,
    RobotState,
    one_step_violation_batch,
    sample_joints,
)
from .scene_io import load_scene, save_scene
from .toy import (
    DiskPair,
    ToyDiskEnv,
    ToyDiskState,
    disk_feasible,
    disk_membership,
    perfect_disk_map,
    sample_disks,
)

ENVIRONMENTS = {
    "toy": ToyDiskEnv,
    "robot": RobotArmEnv,
    "path": PathPlanEnv,
}


def make_env(name: str, **kwargs) -> Env:
    if name not in ENVIRONMENTS:
        raise ValueError(f"unknown environment {name!r}; choose from {sorted(ENVIRONMENTS)}")
    return ENVIRONMENTS[name](**kwargs)


__all__ = [
    "ENVIRONMENTS",
    "DiskPair",
    "Env",
    "PathPartialState",
    "PathPlanEnv",
    "PathState",
    "RobotArmEnv",
    "RobotPartialState",
    "RobotState",
    "StepResult",
    "ToyDiskEnv",
    "ToyDiskState",
    "decode_spline",
    "disk_feasible",
    "disk_membership",
    "load_scene",
    "make_env",
    "one_step_violation_batch",
    "perfect_disk_map",
    "sample_disks",
    "sample_joints",
    "save_scene",
    "spline_violation",
    "spline_violation_batch",
]
