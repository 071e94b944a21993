"""Actor/critic networks over set-valued observations.

Observations arrive as (ego, items, mask): a fixed ego vector plus a padded
block of per-item rows with a validity mask. Items pass through a shared
dense encoder and are sum-pooled under the mask, which keeps the network
permutation-invariant in the items; the pooled code is concatenated with the
ego features (and optionally an action/latent input) and fed to a trunk.
All parameters of one network live in a single flat vector so one optimizer
state covers encoder and trunk together.
"""

from __future__ import annotations

import numpy as np

from ..autodiff import NetworkParams, forward, forward_tape, init_params
from ..autodiff import tape as T


class SetNet:
    """Deep-set encoder + dense trunk with a combined flat parameter vector."""

    def __init__(
        self,
        ego_dim: int,
        item_dim: int,
        max_items: int,
        extra_dim: int,
        out_dim: int,
        rng: np.random.Generator,
        item_hidden: tuple = (64,),
        pool_dim: int = 64,
        trunk_hidden: tuple = (256, 256),
    ):
        self.ego_dim = int(ego_dim)
        self.item_dim = int(item_dim)
        self.max_items = int(max_items)
        self.extra_dim = int(extra_dim)
        self.pool_dim = int(pool_dim) if max_items > 0 else 0
        self.item: NetworkParams | None = None
        if max_items > 0:
            dims = [self.item_dim, *item_hidden, self.pool_dim]
            shapes = [(dims[i + 1], dims[i]) for i in range(len(dims) - 1)]
            self.item = init_params(shapes, ["relu"] * len(shapes), rng)
        dims = [self.ego_dim + self.pool_dim + self.extra_dim, *trunk_hidden, out_dim]
        shapes = [(dims[i + 1], dims[i]) for i in range(len(dims) - 1)]
        self.trunk = init_params(shapes, ["relu"] * (len(shapes) - 1) + ["identity"], rng)
        self._item_size = 0 if self.item is None else self.item.values.size

    @property
    def out_dim(self) -> int:
        return self.trunk.out_dim

    @property
    def values(self) -> np.ndarray:
        if self.item is None:
            return self.trunk.values.copy()
        return np.concatenate([self.item.values, self.trunk.values])

    def set_values(self, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=np.float64)
        if self.item is not None:
            self.item = NetworkParams(
                self.item.shapes, self.item.activations, values[: self._item_size]
            )
        self.trunk = NetworkParams(
            self.trunk.shapes, self.trunk.activations, values[self._item_size :]
        )

    def copy(self) -> "SetNet":
        other = object.__new__(SetNet)
        other.__dict__.update(self.__dict__)
        other.item = None if self.item is None else self.item.copy()
        other.trunk = self.trunk.copy()
        return other

    def state_components(self, prefix: str) -> dict:
        out = {f"{prefix}.trunk": self.trunk}
        if self.item is not None:
            out[f"{prefix}.item"] = self.item
        return out

    def load_components(self, components: dict, prefix: str) -> None:
        self.trunk = components[f"{prefix}.trunk"].copy()
        if self.item is not None:
            self.item = components[f"{prefix}.item"].copy()

    def _trunk_input(self, ego, items, mask, extra):
        parts = [np.atleast_2d(np.asarray(ego, dtype=np.float64))]
        if self.item is not None:
            items = np.asarray(items, dtype=np.float64)
            mask = np.asarray(mask, dtype=np.float64)
            if items.ndim == 2:
                items = items[None]
                mask = np.atleast_2d(mask)
            b, m, _ = items.shape
            codes = forward(self.item, items.reshape(b * m, self.item_dim))
            codes = (codes * mask.reshape(b * m, 1)).reshape(b, m, self.pool_dim)
            parts.append(codes.sum(axis=1))
        if self.extra_dim:
            parts.append(np.atleast_2d(np.asarray(extra, dtype=np.float64)))
        return np.concatenate(parts, axis=1)

    def forward(self, ego, items=None, mask=None, extra=None) -> np.ndarray:
        """Pure evaluation; accepts single observations or batches."""
        single = np.asarray(ego).ndim == 1
        out = forward(self.trunk, self._trunk_input(ego, items, mask, extra))
        return out[0] if single else out

    def forward_tape(self, tape: T.Tape, values_node: T.Node, ego, items=None, mask=None, extra=None) -> T.Node:
        """Tape-tracked evaluation; ``extra`` may be a Node (e.g. sampled latents)."""
        ego = np.atleast_2d(np.asarray(ego, dtype=np.float64))
        parts = [tape.constant(ego)]
        if self.item is not None:
            items = np.asarray(items, dtype=np.float64)
            mask = np.asarray(mask, dtype=np.float64)
            if items.ndim == 2:
                items = items[None]
                mask = np.atleast_2d(mask)
            b, m, _ = items.shape
            codes = forward_tape(tape, values_node, self.item, items.reshape(b * m, self.item_dim))
            codes = T.mul(codes, tape.constant(mask.reshape(b * m, 1)))
            pooled = T.sum_(T.reshape(codes, (b, m, self.pool_dim)), axis=1)
            parts.append(pooled)
        if self.extra_dim:
            if isinstance(extra, T.Node):
                parts.append(extra)
            else:
                parts.append(tape.constant(np.atleast_2d(np.asarray(extra, dtype=np.float64))))
        x = parts[0] if len(parts) == 1 else T.concat(parts, axis=1)
        return forward_tape(tape, values_node, self.trunk, x, offset=self._item_size)
