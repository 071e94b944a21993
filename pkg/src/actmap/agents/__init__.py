"""Latent-box policy optimization: SAC and PPO cores, constrained variants,
safety-filter baselines, and the interaction loops that tie them to envs."""

from .buffers import ReplayBuffer, RolloutBuffer
from .config import AgentConfig
from .gae import gae
from .heads import (
    LOG_STD_MAX,
    LOG_STD_MIN,
    split_head,
    squash,
    squashed_logpdf,
    squashed_sample,
)
from .nets import SetNet
from .ppo import PPOAgent, lagrangian_ppo_update, ppo_update
from .rollout import (
    EpisodeRecord,
    LatentMapper,
    TrainLog,
    evaluate_policy,
    train_ppo,
    train_sac,
)
from .sac import SACAgent, lagrangian_sac_update, sac_targets, sac_update
from .wrappers import (
    ActionFilter,
    ProjectionFilter,
    ReplacementFilter,
    ResamplingFilter,
    make_filter,
)

__all__ = [
    "ActionFilter",
    "AgentConfig",
    "EpisodeRecord",
    "LatentMapper",
    "LOG_STD_MAX",
    "LOG_STD_MIN",
    "PPOAgent",
    "ProjectionFilter",
    "ReplacementFilter",
    "ReplayBuffer",
    "ResamplingFilter",
    "RolloutBuffer",
    "SACAgent",
    "SetNet",
    "TrainLog",
    "evaluate_policy",
    "gae",
    "lagrangian_ppo_update",
    "lagrangian_sac_update",
    "make_filter",
    "ppo_update",
    "sac_targets",
    "sac_update",
    "split_head",
    "squash",
    "squashed_logpdf",
    "squashed_sample",
    "train_ppo",
    "train_sac",
]
