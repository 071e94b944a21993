"""Per-decision inference latency for the three deployment modes.

One decision is: encode the current observation, run the policy head, and
produce an executable action. The mapped variant adds exactly one extra
network forward (the latent-to-action map); the projection variant adds a
feasibility check plus, on infeasible proposals, iterative gradient descent
on the violation measure. All variants are timed on the same recorded state
sequence so the comparison isolates the decision cost.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..agents import ProjectionFilter, SACAgent
from ..agents.rollout import LatentMapper
from ..pretrain.policy import build_policy_params
from .config import RunConfig
from .run import build_env, build_feasibility_model


@dataclass
class TimingReport:
    decisions: int
    base_ms: float
    mapped_ms: float
    projection_ms: float
    projection_interventions: int

    def rows(self):
        return [
            ("base", self.base_ms),
            ("action-mapping", self.mapped_ms),
            ("projection", self.projection_ms),
        ]


def _collect_states(env, n_states: int, rng: np.random.Generator):
    """Snapshot (obs, partial) pairs along random-action trajectories."""
    states = []
    env.reset(int(rng.integers(2**31 - 1)))
    while len(states) < n_states:
        states.append((env.obs_parts(), env.partial_state()))
        action = rng.uniform(-1.0, 1.0, size=env.action_dim)
        result = env.step(action)
        if result.done:
            env.reset(int(rng.integers(2**31 - 1)))
    return states


def measure_decisions(config: RunConfig, decisions: int = 10_000,
                      seed: int = 0, feas_params=None) -> TimingReport:
    """Mean per-decision latency over >= ``decisions`` repeated decisions."""
    env = build_env(config)
    model = build_feasibility_model(config)
    rng = np.random.default_rng(seed)
    agent = SACAgent(
        len(env.obs_parts(env.reset(0))[0]), env.item_dim, env.max_items,
        env.action_dim, config.agent, rng,
    )
    if feas_params is None:
        probe = env.generate_partial_state(rng)
        feas_params = build_policy_params(
            env.partial_features(probe).size, env.action_dim,
            config.pretrain.hidden, rng,
        )
    mapper = LatentMapper(env, feas_params)
    filt = ProjectionFilter(env, model)

    n_states = min(decisions, 2000)
    states = _collect_states(env, n_states, rng)
    order = [states[i % n_states] for i in range(decisions)]

    def base_decide(obs, partial, r):
        z, _ = agent.act(obs, r)
        return z

    def mapped_decide(obs, partial, r):
        z, _ = agent.act(obs, r)
        return mapper(partial, z)

    def projected_decide(obs, partial, r):
        z, _ = agent.act(obs, r)
        return filt(z, partial=partial)

    results = {}
    for name, decide in (
        ("base", base_decide), ("mapped", mapped_decide), ("projection", projected_decide),
    ):
        r = np.random.default_rng(seed + 1)
        start = time.perf_counter()
        for obs, partial in order:
            decide(obs, partial, r)
        results[name] = (time.perf_counter() - start) * 1000.0 / decisions

    return TimingReport(
        decisions=decisions,
        base_ms=results["base"],
        mapped_ms=results["mapped"],
        projection_ms=results["projection"],
        projection_interventions=filt.interventions,
    )
