"""The feasibility policy: a state-conditioned map from the latent cube to actions.

The network takes (encoded partial state, latent z) and squashes its output
into the action box with a tanh layer, so generated actions always lie in
[-1, 1]^d. The latent dimension equals the action dimension.
"""

from __future__ import annotations

import numpy as np

from ..autodiff import NetworkParams, forward, init_params


def build_policy_params(
    feature_dim: int, action_dim: int, hidden: tuple, rng: np.random.Generator
) -> NetworkParams:
    dims = [feature_dim + action_dim, *hidden, action_dim]
    shapes = [(dims[i + 1], dims[i]) for i in range(len(dims) - 1)]
    activations = ["relu"] * len(hidden) + ["tanh"]
    return init_params(shapes, activations, rng)


def latent_inputs(features: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Stack the state encoding in front of each latent row."""
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    features = np.asarray(features, dtype=np.float64)
    tiled = np.broadcast_to(features, (len(z), features.size))
    return np.concatenate([tiled, z], axis=1)


def map_latent(params: NetworkParams, features: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Deterministic action for one latent; always inside the action box."""
    z = np.clip(np.asarray(z, dtype=np.float64), -1.0, 1.0)
    return forward(params, np.concatenate([np.asarray(features, float), z]))


def map_latent_batch(params: NetworkParams, features: np.ndarray, zs: np.ndarray) -> np.ndarray:
    zs = np.clip(np.asarray(zs, dtype=np.float64), -1.0, 1.0)
    return forward(params, latent_inputs(features, zs))
