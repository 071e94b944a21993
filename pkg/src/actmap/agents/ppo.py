"""Clipped-surrogate policy optimization over the latent box.

Rollouts store the squashed latent and its log-density at collection time;
each update re-evaluates the density under the current head (atanh of the
stored latent, guarded away from +-1) and ascends the clipped importance
ratio. The value function trains on returns from generalized advantage
estimation. The constrained variant keeps a second value function for
discounted violation costs and shifts advantages by multiplier * cost
advantage before the surrogate.
"""

from __future__ import annotations

import numpy as np

from ..autodiff import Adam, GradientError, NetworkParams
from ..autodiff import tape as T
from .buffers import RolloutBuffer
from .config import AgentConfig
from .gae import gae
from .heads import head_nodes, logpdf_nodes, split_head, squashed_logpdf, squashed_sample
from .nets import SetNet

# importance ratios beyond e^20 mean the head moved absurdly far from the
# sampling policy; such samples are dropped rather than allowed to blow up
LOG_RATIO_LIMIT = 20.0


class PPOAgent:
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
        self.value_net = SetNet(ego_dim, item_dim, max_items, 0, 1, rng, **kw)
        self.actor_opt = Adam(config.actor_lr)
        self.value_opt = Adam(config.critic_lr)
        self.multiplier = 0.0
        self.cost_value_net = None
        self.cost_value_opt = None
        if with_cost_critic:
            # built after the shared nets so both variants draw identical
            # actor and value initializations from one stream
            self.cost_value_net = SetNet(ego_dim, item_dim, max_items, 0, 1, rng, **kw)
            self.cost_value_opt = Adam(config.critic_lr)

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

    def value_of(self, obs) -> float:
        ego, items, mask = obs
        return float(self.value_net.forward(ego, items, mask)[..., 0])

    def cost_value_of(self, obs) -> float:
        if self.cost_value_net is None:
            return 0.0
        ego, items, mask = obs
        return float(self.cost_value_net.forward(ego, items, mask)[..., 0])

    def state_components(self) -> dict:
        out = {}
        out.update(self.actor.state_components("actor"))
        out.update(self.value_net.state_components("value"))
        if self.cost_value_net is not None:
            out.update(self.cost_value_net.state_components("cost_value"))
            # the scalar multiplier rides along as a degenerate 1x1 layer
            out["multiplier"] = NetworkParams(
                ((1, 1),), ("identity",), np.array([self.multiplier, 0.0])
            )
        return out

    def load_components(self, components: dict) -> None:
        self.actor.load_components(components, "actor")
        self.value_net.load_components(components, "value")
        if self.cost_value_net is not None:
            self.cost_value_net.load_components(components, "cost_value")
            self.multiplier = float(components["multiplier"].values[0])


def _value_step(net: SetNet, opt: Adam, coef: float, ego, items, mask, targets, what: str) -> float:
    tape = T.Tape()
    vnode = tape.param(net.values)
    v = net.forward_tape(tape, vnode, ego, items, mask)
    loss = T.mul(T.mean(T.square(T.sub(v, tape.constant(targets[:, None])))), coef)
    value = float(loss.value)
    if not np.isfinite(value):
        raise GradientError(f"{what} loss is not finite ({value})")
    net.set_values(opt.step(net.values, T.gradient(tape, loss, wrt=vnode)))
    return value


def ppo_update(agent: PPOAgent, rollout: RolloutBuffer, rng: np.random.Generator,
               lagrangian: bool = False) -> dict:
    """Train on a collected rollout for several epochs, then clear it.

    Advantage estimates are fixed once per update; only the importance
    ratios move across epochs. With the constrained variant at multiplier 0
    the surrogate is bit-identical to the plain one under the same random
    stream: the cost shift is skipped entirely.
    """
    cfg = agent.config
    n = rollout.ptr
    if n == 0:
        raise ValueError("rollout buffer is empty")
    adv, returns = gae(
        rollout.reward[:n], rollout.value[:n], rollout.done[:n],
        cfg.gamma, cfg.gae_lambda, rollout.bootstrap_value,
        normalize=cfg.advantage_normalization,
    )
    stats = {"policy_losses": [], "value_losses": [], "skipped": 0}
    if lagrangian:
        # cost advantages stay raw: their scale carries the constraint units
        cost_adv, cost_returns = gae(
            rollout.cost[:n], rollout.cost_value[:n], rollout.done[:n],
            cfg.cost_gamma, cfg.gae_lambda, rollout.bootstrap_cost_value,
            normalize=False,
        )
        violation = float(cost_returns.mean()) - cfg.cost_threshold
        agent.multiplier = max(0.0, agent.multiplier + cfg.multiplier_lr * violation)
        stats["multiplier"] = agent.multiplier
        stats["cost_estimate"] = violation + cfg.cost_threshold
        stats["cost_value_losses"] = []
        if agent.multiplier != 0.0:
            adv = adv - agent.multiplier * cost_adv

    ego, items, mask, z = rollout.ego[:n], rollout.items[:n], rollout.mask[:n], rollout.z[:n]
    old_logp = rollout.logp[:n]
    for _ in range(cfg.rollout_epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            mb = order[start:start + cfg.batch_size]
            mean, log_std = agent.policy_head(ego[mb], items[mb], mask[mb])
            log_ratio = squashed_logpdf(mean, log_std, z[mb]) - old_logp[mb]
            keep = np.abs(log_ratio) <= LOG_RATIO_LIMIT
            stats["skipped"] += int((~keep).sum())
            mb = mb[keep]
            if len(mb) == 0:
                continue

            tape = T.Tape()
            vnode = tape.param(agent.actor.values)
            out = agent.actor.forward_tape(tape, vnode, ego[mb], items[mb], mask[mb])
            mean_node, log_std_node = head_nodes(tape, out)
            logp_node = logpdf_nodes(tape, mean_node, log_std_node, z[mb])
            ratio = T.exp(T.sub(logp_node, tape.constant(old_logp[mb])))
            adv_c = tape.constant(adv[mb])
            surr = T.minimum(
                T.mul(ratio, adv_c),
                T.mul(T.clip(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon), adv_c),
            )
            loss = T.add(T.neg(T.mean(surr)), T.mul(T.mean(logp_node), cfg.entropy_coef))
            lval = float(loss.value)
            if not np.isfinite(lval):
                raise GradientError(f"policy loss is not finite ({lval})")
            agent.actor.set_values(
                agent.actor_opt.step(agent.actor.values, T.gradient(tape, loss, wrt=vnode))
            )
            stats["policy_losses"].append(lval)

            stats["value_losses"].append(_value_step(
                agent.value_net, agent.value_opt, cfg.value_coef,
                ego[mb], items[mb], mask[mb], returns[mb], "value",
            ))
            if lagrangian:
                stats["cost_value_losses"].append(_value_step(
                    agent.cost_value_net, agent.cost_value_opt, cfg.value_coef,
                    ego[mb], items[mb], mask[mb], cost_returns[mb], "cost value",
                ))
    rollout.clear()
    return stats


def lagrangian_ppo_update(agent: PPOAgent, rollout: RolloutBuffer, rng: np.random.Generator) -> dict:
    if agent.cost_value_net is None:
        raise ValueError("agent was built without a cost value function")
    return ppo_update(agent, rollout, rng, lagrangian=True)
