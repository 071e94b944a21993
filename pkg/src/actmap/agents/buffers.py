"""Experience storage.

Both buffers store the latent z in the action slot, never the mapped action:
the action-mapping agents treat the composed system env(map(s, z)) as their
environment, so the latent is the action from the learner's point of view.
"""

from __future__ import annotations

import numpy as np


class ReplayBuffer:
    """Ring buffer of (obs, z, reward, next obs, done, cost) for off-policy agents."""

    def __init__(self, capacity: int, ego_dim: int, item_dim: int, max_items: int, latent_dim: int):
        self.capacity = int(capacity)
        self.size = 0
        self._pos = 0
        shape = (self.capacity,)
        self.ego = np.zeros(shape + (ego_dim,))
        self.next_ego = np.zeros(shape + (ego_dim,))
        self.items = np.zeros(shape + (max_items, item_dim))
        self.next_items = np.zeros(shape + (max_items, item_dim))
        self.mask = np.zeros(shape + (max_items,))
        self.next_mask = np.zeros(shape + (max_items,))
        self.z = np.zeros(shape + (latent_dim,))
        self.reward = np.zeros(shape)
        self.done = np.zeros(shape)
        self.cost = np.zeros(shape)

    def __len__(self) -> int:
        return self.size

    def push(self, obs, z, reward, next_obs, done, cost=0.0) -> None:
        i = self._pos
        ego, items, mask = obs
        self.ego[i] = ego
        if self.items.shape[1]:
            self.items[i] = items
            self.mask[i] = mask
        n_ego, n_items, n_mask = next_obs
        self.next_ego[i] = n_ego
        if self.items.shape[1]:
            self.next_items[i] = n_items
            self.next_mask[i] = n_mask
        self.z[i] = z
        self.reward[i] = reward
        self.done[i] = float(done)
        self.cost[i] = float(cost)
        self._pos = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> dict:
        idx = rng.integers(0, self.size, size=batch_size)
        return {
            "ego": self.ego[idx],
            "items": self.items[idx],
            "mask": self.mask[idx],
            "next_ego": self.next_ego[idx],
            "next_items": self.next_items[idx],
            "next_mask": self.next_mask[idx],
            "z": self.z[idx],
            "reward": self.reward[idx],
            "done": self.done[idx],
            "cost": self.cost[idx],
        }


class RolloutBuffer:
    """Fixed-length on-policy buffer; reset after each training pass."""

    def __init__(self, size: int, ego_dim: int, item_dim: int, max_items: int, latent_dim: int):
        self.max_size = int(size)
        self.ptr = 0
        self.ego = np.zeros((size, ego_dim))
        self.items = np.zeros((size, max_items, item_dim))
        self.mask = np.zeros((size, max_items))
        self.z = np.zeros((size, latent_dim))
        self.logp = np.zeros(size)
        self.value = np.zeros(size)
        self.cost_value = np.zeros(size)
        self.reward = np.zeros(size)
        self.done = np.zeros(size)
        self.cost = np.zeros(size)
        self.bootstrap_value = 0.0
        self.bootstrap_cost_value = 0.0

    def __len__(self) -> int:
        return self.ptr

    @property
    def full(self) -> bool:
        return self.ptr >= self.max_size

    def push(self, obs, z, logp, value, reward, done, cost=0.0, cost_value=0.0) -> None:
        if self.full:
            raise ValueError("rollout buffer is full; train and clear first")
        i = self.ptr
        ego, items, mask = obs
        self.ego[i] = ego
        if self.items.shape[1]:
            self.items[i] = items
            self.mask[i] = mask
        self.z[i] = z
        self.logp[i] = logp
        self.value[i] = value
        self.cost_value[i] = float(cost_value)
        self.reward[i] = reward
        self.done[i] = float(done)
        self.cost[i] = float(cost)
        self.ptr += 1

    def clear(self) -> None:
        self.ptr = 0
        self.bootstrap_value = 0.0
        self.bootstrap_cost_value = 0.0
