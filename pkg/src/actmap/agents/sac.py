"""Soft actor-critic over the latent box, with an optional safety critic.

The agent is agnostic about whether its outputs are environment actions or
latents for a feasibility map: it always acts in [-1, 1]^d. Twin critics
regress toward r + gamma * (min target-Q - alpha * logpi') on non-terminal
transitions; the actor ascends min-Q - alpha * logpi. The safety critic
(constrained variant) learns discounted violation costs and enters the
actor loss through the Lagrange multiplier.
"""

from __future__ import annotations

import numpy as np

from ..autodiff import Adam, GradientError, NetworkParams
from ..autodiff import tape as T
from .config import AgentConfig
from .heads import head_nodes, reparam_sample_nodes, split_head, squashed_sample
from .nets import SetNet


class SACAgent:
    def __init__(
        self,
        ego_dim: int,
        item_dim: int,
        max_items: int,
        latent_dim: int,
        config: AgentConfig,
        rng: np.random.Generator,
        with_cost_critic: bool = False,
    ):
        self.config = config
        self.latent_dim = int(latent_dim)
        kw = dict(
            item_hidden=config.item_hidden,
            pool_dim=config.pool_dim,
            trunk_hidden=config.trunk_hidden,
        )
        self.actor = SetNet(ego_dim, item_dim, max_items, 0, 2 * latent_dim, rng, **kw)
        self.critic1 = SetNet(ego_dim, item_dim, max_items, latent_dim, 1, rng, **kw)
        self.critic2 = SetNet(ego_dim, item_dim, max_items, latent_dim, 1, rng, **kw)
        self.target1 = self.critic1.copy()
        self.target2 = self.critic2.copy()
        self.actor_opt = Adam(config.actor_lr)
        self.critic1_opt = Adam(config.critic_lr)
        self.critic2_opt = Adam(config.critic_lr)
        self.multiplier = 0.0
        self.cost_critic = None
        self.cost_target = None
        self.cost_opt = None
        if with_cost_critic:
            # built after the shared nets so both variants draw identical
            # initializations for actor and critics from one stream
            self.cost_critic = SetNet(ego_dim, item_dim, max_items, latent_dim, 1, rng, **kw)
            self.cost_target = self.cost_critic.copy()
            self.cost_opt = Adam(config.critic_lr)

    def policy_head(self, ego, items=None, mask=None):
        return split_head(self.actor.forward(ego, items, mask))

    def act(self, obs, rng: np.random.Generator):
        """Sample a latent from the squashed policy; returns (z, logpi)."""
        ego, items, mask = obs
        mean, log_std = self.policy_head(ego, items, mask)
        return squashed_sample(mean, log_std, rng)

    def act_deterministic(self, obs) -> np.ndarray:
        ego, items, mask = obs
        mean, _ = self.policy_head(ego, items, mask)
        return np.tanh(mean)

    def state_components(self) -> dict:
        out = {}
        for name, net in (
            ("actor", self.actor),
            ("critic1", self.critic1),
            ("critic2", self.critic2),
            ("target1", self.target1),
            ("target2", self.target2),
        ):
            out.update(net.state_components(name))
        if self.cost_critic is not None:
            out.update(self.cost_critic.state_components("cost_critic"))
            out.update(self.cost_target.state_components("cost_target"))
            # the scalar multiplier rides along as a degenerate 1x1 layer
            out["multiplier"] = NetworkParams(
                ((1, 1),), ("identity",), np.array([self.multiplier, 0.0])
            )
        return out

    def load_components(self, components: dict) -> None:
        for name, net in (
            ("actor", self.actor),
            ("critic1", self.critic1),
            ("critic2", self.critic2),
            ("target1", self.target1),
            ("target2", self.target2),
        ):
            net.load_components(components, name)
        if self.cost_critic is not None:
            self.cost_critic.load_components(components, "cost_critic")
            self.cost_target.load_components(components, "cost_target")
            self.multiplier = float(components["multiplier"].values[0])


def sac_targets(agent: SACAgent, batch: dict, rng: np.random.Generator, lagrangian=False):
    """Critic regression targets; terminal transitions bootstrap nothing."""
    cfg = agent.config
    mean, log_std = agent.policy_head(batch["next_ego"], batch["next_items"], batch["next_mask"])
    z_next, logp_next = squashed_sample(mean, log_std, rng)
    q1 = agent.target1.forward(batch["next_ego"], batch["next_items"], batch["next_mask"], z_next)
    q2 = agent.target2.forward(batch["next_ego"], batch["next_items"], batch["next_mask"], z_next)
    soft = np.minimum(q1[:, 0], q2[:, 0]) - cfg.entropy_coef * logp_next
    nonterminal = 1.0 - batch["done"]
    y = batch["reward"] + cfg.gamma * nonterminal * soft
    y_cost = None
    if lagrangian:
        qc = agent.cost_target.forward(
            batch["next_ego"], batch["next_items"], batch["next_mask"], z_next
        )
        y_cost = batch["cost"] + cfg.cost_gamma * nonterminal * qc[:, 0]
    return y, y_cost, z_next


def _critic_step(net: SetNet, opt: Adam, batch: dict, y: np.ndarray, what: str) -> float:
    tape = T.Tape()
    vnode = tape.param(net.values)
    q = net.forward_tape(tape, vnode, batch["ego"], batch["items"], batch["mask"], batch["z"])
    loss = T.mean(T.square(T.sub(q, tape.constant(y[:, None]))))
    value = float(loss.value)
    if not np.isfinite(value):
        raise GradientError(f"{what} loss is not finite ({value})")
    net.set_values(opt.step(net.values, T.gradient(tape, loss, wrt=vnode)))
    return value


def sac_update(agent: SACAgent, batch: dict, rng: np.random.Generator, lagrangian=False) -> dict:
    """One gradient step on critics and actor from a sampled batch.

    With the safety critic enabled the actor additionally descends
    multiplier * (Q_C - threshold) and the multiplier ascends the estimated
    constraint violation, floored at zero. With multiplier 0 the actor and
    critic updates are bit-identical to the plain ones under the same
    random stream: the dual term contributes exactly zero.
    """
    cfg = agent.config
    y, y_cost, _ = sac_targets(agent, batch, rng, lagrangian)
    stats = {
        "critic1_loss": _critic_step(agent.critic1, agent.critic1_opt, batch, y, "critic 1"),
        "critic2_loss": _critic_step(agent.critic2, agent.critic2_opt, batch, y, "critic 2"),
    }
    if lagrangian:
        stats["cost_critic_loss"] = _critic_step(
            agent.cost_critic, agent.cost_opt, batch, y_cost, "safety critic"
        )

    tape = T.Tape()
    vnode = tape.param(agent.actor.values)
    out = agent.actor.forward_tape(tape, vnode, batch["ego"], batch["items"], batch["mask"])
    mean_node, log_std_node = head_nodes(tape, out)
    xi = rng.standard_normal(size=(len(batch["reward"]), agent.latent_dim))
    z_node, logp_node = reparam_sample_nodes(tape, mean_node, log_std_node, xi)
    q1 = agent.critic1.forward_tape(
        tape, tape.constant(agent.critic1.values), batch["ego"], batch["items"], batch["mask"], z_node
    )
    q2 = agent.critic2.forward_tape(
        tape, tape.constant(agent.critic2.values), batch["ego"], batch["items"], batch["mask"], z_node
    )
    qmin = T.minimum(q1, q2)
    terms = T.sub(T.mul(T.reshape(logp_node, (-1, 1)), cfg.entropy_coef), qmin)
    if lagrangian and agent.multiplier != 0.0:
        qc = agent.cost_critic.forward_tape(
            tape,
            tape.constant(agent.cost_critic.values),
            batch["ego"],
            batch["items"],
            batch["mask"],
            z_node,
        )
        terms = T.add(terms, T.mul(T.sub(qc, cfg.cost_threshold), agent.multiplier))
    actor_loss = T.mean(terms)
    stats["actor_loss"] = float(actor_loss.value)
    if not np.isfinite(stats["actor_loss"]):
        raise GradientError(f"actor loss is not finite ({stats['actor_loss']})")
    agent.actor.set_values(
        agent.actor_opt.step(agent.actor.values, T.gradient(tape, actor_loss, wrt=vnode))
    )

    if lagrangian:
        qc_now = agent.cost_critic.forward(
            batch["ego"], batch["items"], batch["mask"], z_node.value
        )[:, 0]
        violation = float(qc_now.mean()) - cfg.cost_threshold
        agent.multiplier = max(0.0, agent.multiplier + cfg.multiplier_lr * violation)
        stats["multiplier"] = agent.multiplier
        stats["cost_estimate"] = violation + cfg.cost_threshold

    tau = cfg.tau
    for online, target in (
        (agent.critic1, agent.target1),
        (agent.critic2, agent.target2),
    ):
        target.set_values((1.0 - tau) * target.values + tau * online.values)
    if lagrangian:
        agent.cost_target.set_values(
            (1.0 - tau) * agent.cost_target.values + tau * agent.cost_critic.values
        )
    return stats


def lagrangian_sac_update(agent: SACAgent, batch: dict, rng: np.random.Generator) -> dict:
    if agent.cost_critic is None:
        raise ValueError("agent was built without a safety critic")
    return sac_update(agent, batch, rng, lagrangian=True)
