"""Interaction loops: collection, training drivers, and policy evaluation.

Two execution modes share every loop. In mapped mode the agent's squashed
output z is a latent that a pretrained feasibility network turns into an
environment action; the stored experience keeps z, because the composed
system env(map(s, z)) is the environment from the learner's point of view.
In direct mode z is the action itself, optionally routed through a safety
filter; then the executed (possibly corrected) action is stored and, for
on-policy learners, its log-density is re-evaluated under the current head.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..envs.base import Env
from ..pretrain.policy import map_latent
from .buffers import ReplayBuffer, RolloutBuffer
from .heads import split_head, squashed_logpdf, squashed_sample
from .ppo import PPOAgent, ppo_update
from .sac import SACAgent, sac_update
from .wrappers import ActionFilter


class LatentMapper:
    """Closure binding a feasibility network to one environment's encoding."""

    def __init__(self, env: Env, params):
        self.env = env
        self.params = params

    def __call__(self, partial, z: np.ndarray) -> np.ndarray:
        return map_latent(self.params, self.env.partial_features(partial), z)


@dataclass
class EpisodeRecord:
    end_step: int
    return_: float
    length: int
    violated: bool
    constraint: str | None = None


@dataclass
class TrainLog:
    episodes: list = field(default_factory=list)
    update_stats: list = field(default_factory=list)

    def returns(self) -> np.ndarray:
        return np.array([e.return_ for e in self.episodes])

    def violation_rate(self) -> float:
        if not self.episodes:
            return 0.0
        return float(np.mean([e.violated for e in self.episodes]))


def _reset_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**31 - 1))


def _decide(agent, obs, env, rng, mapper, action_filter, warmup: bool):
    """One decision: (z stored for learning, action executed, logpi of z)."""
    ego, items, mask = obs
    if warmup:
        d = agent.latent_dim
        z = rng.uniform(-1.0, 1.0, size=d)
        mean = log_std = None
        logp = 0.0
    else:
        mean, log_std = split_head(agent.actor.forward(ego, items, mask))
        z, logp = squashed_sample(mean, log_std, rng)
    if mapper is not None:
        return z, mapper(env.partial_state(), z), float(logp)
    action = z
    if action_filter is not None:
        def sampler(r):
            if mean is None:
                return r.uniform(-1.0, 1.0, size=len(z))
            return squashed_sample(mean, log_std, r)[0]

        action = action_filter(z, rng, sampler)
        if not np.array_equal(action, z):
            z = action  # the executed action is what the learner must explain
            logp = 0.0 if mean is None else float(squashed_logpdf(mean, log_std, z))
    return z, action, float(logp)


def train_sac(
    env: Env,
    agent: SACAgent,
    total_steps: int,
    rng: np.random.Generator,
    mapper: LatentMapper | None = None,
    action_filter: ActionFilter | None = None,
    lagrangian: bool = False,
    on_cycle=None,
) -> TrainLog:
    """Off-policy driver: uniform-latent warmup, then interleaved updates.

    Gradient updates start once the buffer holds ``update_delay`` transitions;
    thereafter every ``cycle_env_steps`` environment steps trigger
    ``updates_per_cycle`` update batches.
    """
    cfg = agent.config
    ego, items, mask = env.obs_parts(env.reset(_reset_seed(rng)))
    buffer = ReplayBuffer(
        cfg.replay_capacity, len(ego), items.shape[1] if items.ndim == 2 else 1,
        items.shape[0], agent.latent_dim,
    )
    log = TrainLog()
    obs = (ego, items, mask)
    ep_return, ep_len = 0.0, 0
    for step in range(total_steps):
        warmup = step < cfg.update_delay
        z, action, _ = _decide(agent, obs, env, rng, mapper, action_filter, warmup)
        result = env.step(action)
        next_obs = env.obs_parts(result.state)
        cost = float(result.info.get("cost", 0.0))
        buffer.push(obs, z, result.reward, next_obs, result.done, cost)
        ep_return += result.reward
        ep_len += 1
        if result.done:
            log.episodes.append(EpisodeRecord(
                step + 1, ep_return, ep_len,
                bool(result.info.get("violation", False)), result.info.get("constraint"),
            ))
            ep_return, ep_len = 0.0, 0
            obs = env.obs_parts(env.reset(_reset_seed(rng)))
        else:
            obs = next_obs
        if not warmup and (step + 1) % cfg.cycle_env_steps == 0:
            for _ in range(cfg.updates_per_cycle):
                batch = buffer.sample(cfg.batch_size, rng)
                stats = sac_update(agent, batch, rng, lagrangian=lagrangian)
            stats["step"] = step + 1
            log.update_stats.append(stats)
            if on_cycle is not None:
                on_cycle(step + 1, agent, log)
    return log


def train_ppo(
    env: Env,
    agent: PPOAgent,
    total_steps: int,
    rng: np.random.Generator,
    mapper: LatentMapper | None = None,
    action_filter: ActionFilter | None = None,
    lagrangian: bool = False,
    on_cycle=None,
) -> TrainLog:
    """On-policy driver: fill the rollout buffer, update, clear, repeat."""
    cfg = agent.config
    ego, items, mask = env.obs_parts(env.reset(_reset_seed(rng)))
    rollout = RolloutBuffer(
        cfg.rollout_size, len(ego), items.shape[1] if items.ndim == 2 else 1,
        items.shape[0], agent.latent_dim,
    )
    log = TrainLog()
    obs = (ego, items, mask)
    ep_return, ep_len = 0.0, 0
    for step in range(total_steps):
        z, action, logp = _decide(agent, obs, env, rng, mapper, action_filter, False)
        value = agent.value_of(obs)
        cost_value = agent.cost_value_of(obs) if lagrangian else 0.0
        result = env.step(action)
        next_obs = env.obs_parts(result.state)
        cost = float(result.info.get("cost", 0.0))
        rollout.push(obs, z, logp, value, result.reward, result.done, cost, cost_value)
        ep_return += result.reward
        ep_len += 1
        if result.done:
            log.episodes.append(EpisodeRecord(
                step + 1, ep_return, ep_len,
                bool(result.info.get("violation", False)), result.info.get("constraint"),
            ))
            ep_return, ep_len = 0.0, 0
            obs = env.obs_parts(env.reset(_reset_seed(rng)))
        else:
            obs = next_obs
        if rollout.full:
            if not result.done:
                rollout.bootstrap_value = agent.value_of(obs)
                if lagrangian:
                    rollout.bootstrap_cost_value = agent.cost_value_of(obs)
            stats = ppo_update(agent, rollout, rng, lagrangian=lagrangian)
            stats["step"] = step + 1
            log.update_stats.append(stats)
            if on_cycle is not None:
                on_cycle(step + 1, agent, log)
    return log


def evaluate_policy(
    env: Env,
    agent,
    episodes: int,
    rng: np.random.Generator,
    mapper: LatentMapper | None = None,
    action_filter: ActionFilter | None = None,
    deterministic: bool = True,
) -> list[EpisodeRecord]:
    """Roll fixed-policy episodes; deterministic mode uses the squashed mean."""
    records = []
    for _ in range(episodes):
        obs = env.obs_parts(env.reset(_reset_seed(rng)))
        ep_return, ep_len, done = 0.0, 0, False
        info = {}
        while not done:
            if deterministic:
                z = agent.act_deterministic(obs)
                if mapper is not None:
                    action = mapper(env.partial_state(), z)
                elif action_filter is not None:
                    action = action_filter(z, rng, lambda r: agent.act(obs, r)[0])
                else:
                    action = z
            else:
                _, action, _ = _decide(agent, obs, env, rng, mapper, action_filter, False)
            result = env.step(action)
            ep_return += result.reward
            ep_len += 1
            done = result.done
            info = result.info
            obs = env.obs_parts(result.state)
        records.append(EpisodeRecord(
            ep_len, ep_return, ep_len,
            bool(info.get("violation", False)), info.get("constraint"),
        ))
    return records
