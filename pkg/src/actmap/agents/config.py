"""Shared hyperparameter record for the objective-policy trainers."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class AgentConfig:
    gamma: float = 0.97
    actor_lr: float = 3e-5
    critic_lr: float = 1e-4
    entropy_coef: float = 2e-4  # SAC alpha; the PPO presets use 5e-3
    tau: float = 0.005
    update_delay: int = 2048  # env steps collected before learning starts
    batch_size: int = 128
    updates_per_cycle: int = 2
    cycle_env_steps: int = 50
    replay_capacity: int = 1_000_000
    rollout_size: int = 10_000
    rollout_epochs: int = 3
    gae_lambda: float = 0.9
    clip_epsilon: float = 0.2
    advantage_normalization: bool = True
    value_coef: float = 0.5
    # constrained (Lagrangian) extras
    cost_gamma: float = 0.9
    cost_threshold: float = 0.05
    multiplier_lr: float = 0.01
    # network sizes
    item_hidden: tuple = (64,)
    pool_dim: int = 64
    trunk_hidden: tuple = (256, 256)

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0 or not 0.0 <= self.gae_lambda <= 1.0:
            raise ValueError("discount and GAE lambda must lie in [0, 1]")
        if self.clip_epsilon <= 0.0:
            raise ValueError("clip range must be positive")
        if not 0.0 <= self.cost_gamma <= 1.0:
            raise ValueError("cost discount must lie in [0, 1]")
        if self.batch_size < 1 or self.rollout_size < 1 or self.replay_capacity < 1:
            raise ValueError("batch, rollout and replay sizes must be positive")
        self.item_hidden = tuple(int(h) for h in self.item_hidden)
        self.trunk_hidden = tuple(int(h) for h in self.trunk_hidden)
