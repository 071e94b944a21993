"""Boolean and continuous feasibility evaluation for all environments."""

from .cost import joint_cost
from .models import (
    FeasibilityModel,
    PathFeasibilityModel,
    RobotFeasibilityModel,
    ToyFeasibilityModel,
    make_model,
    trajectory_cost,
)

__all__ = [
    "FeasibilityModel",
    "PathFeasibilityModel",
    "RobotFeasibilityModel",
    "ToyFeasibilityModel",
    "joint_cost",
    "make_model",
    "trajectory_cost",
]
