"""Generalized advantage estimation."""

from __future__ import annotations

import numpy as np


def gae(rewards, values, dones, gamma: float, lam: float, bootstrap_value: float,
        normalize: bool = False):
    """Backward-recursive advantages and returns over a (possibly multi-episode) batch.

    ``values`` are V(s_t) for each stored step; the value after the final
    step is ``bootstrap_value`` (ignored when that step terminates). Returns
    (advantages, returns) with returns = advantages + values computed before
    any normalization, so the value target is unaffected by it.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones, dtype=np.float64)
    if not (len(rewards) == len(values) == len(dones)):
        raise ValueError("rewards, values and dones must have equal length")
    t = len(rewards)
    adv = np.zeros(t)
    next_value = float(bootstrap_value)
    carry = 0.0
    for i in range(t - 1, -1, -1):
        nonterminal = 1.0 - dones[i]
        delta = rewards[i] + gamma * next_value * nonterminal - values[i]
        carry = delta + gamma * lam * nonterminal * carry
        adv[i] = carry
        next_value = values[i]
    returns = adv + values
    if normalize:
        adv = (adv - adv.mean()) / (adv.std() + 1e-8)
    return adv, returns
