"""Feasibility-policy pretraining: generator network, training loop, evaluation."""

from .evaluate import (
    FeasEvalReport,
    evaluate,
    evaluate_actions,
    mean_pairwise_distance,
    toy_mode_occupancy,
)
from .loop import FeasTrainConfig, PretrainRecord, pretrain
from .policy import build_policy_params, latent_inputs, map_latent, map_latent_batch

__all__ = [
    "FeasEvalReport",
    "FeasTrainConfig",
    "PretrainRecord",
    "build_policy_params",
    "evaluate",
    "evaluate_actions",
    "latent_inputs",
    "map_latent",
    "map_latent_batch",
    "mean_pairwise_distance",
    "pretrain",
    "toy_mode_occupancy",
]
