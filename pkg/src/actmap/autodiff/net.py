"""Dense network parameters stored as one flat float64 vector.

The flat layout (per layer: row-major weights, then bias) keeps
finite-difference testing and checkpointing trivial. Supported activations
are the minimal set the Gaussian heads and encoders need.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tape as T

ACTIVATIONS = ("tanh", "relu", "softplus", "identity")

_ACT_FN = {
    "tanh": np.tanh,
    "relu": lambda x: np.maximum(x, 0.0),
    "softplus": lambda x: np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x))),
    "identity": lambda x: x,
}

_ACT_NODE = {
    "tanh": T.tanh,
    "relu": T.relu,
    "softplus": T.softplus,
    "identity": lambda x: x,
}


class ConfigurationError(ValueError):
    """Shape or activation mismatch in a network definition or call."""


@dataclass
class NetworkParams:
    """Flat parameter vector plus per-layer (rows, cols) shapes and activations."""

    shapes: tuple[tuple[int, int], ...]
    activations: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        self.shapes = tuple((int(r), int(c)) for r, c in self.shapes)
        self.activations = tuple(self.activations)
        if len(self.shapes) != len(self.activations):
            raise ConfigurationError("one activation tag per layer required")
        for act in self.activations:
            if act not in ACTIVATIONS:
                raise ConfigurationError(f"unsupported activation {act!r}")
        for (r0, c0), (r1, c1) in zip(self.shapes, self.shapes[1:]):
            if c1 != r0:
                raise ConfigurationError(
                    f"layer chain mismatch: {r0}x{c0} feeds {r1}x{c1}"
                )
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (param_count(self.shapes),):
            raise ConfigurationError(
                f"expected {param_count(self.shapes)} values, got {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ConfigurationError("parameter values must be finite")

    @property
    def in_dim(self) -> int:
        return self.shapes[0][1]

    @property
    def out_dim(self) -> int:
        return self.shapes[-1][0]

    def copy(self) -> "NetworkParams":
        return NetworkParams(self.shapes, self.activations, self.values.copy())


def param_count(shapes) -> int:
    return int(sum(r * c + r for r, c in shapes))


def layer_offsets(shapes):
    """[(w_start, w_stop, b_stop), ...] into the flat vector."""
    out = []
    pos = 0
    for r, c in shapes:
        w_stop = pos + r * c
        b_stop = w_stop + r
        out.append((pos, w_stop, b_stop))
        pos = b_stop
    return out


def init_params(shapes, activations, rng, scale: float | None = None) -> NetworkParams:
    """Glorot-style init; biases zero."""
    shapes = tuple((int(r), int(c)) for r, c in shapes)
    values = np.zeros(param_count(shapes))
    for (r, c), (w0, w1, b1) in zip(shapes, layer_offsets(shapes)):
        s = scale if scale is not None else np.sqrt(2.0 / max(r + c, 1))
        values[w0:w1] = rng.normal(0.0, s, size=r * c)
    return NetworkParams(shapes, tuple(activations), values)


def forward(params: NetworkParams, x: np.ndarray) -> np.ndarray:
    """Pure forward pass; x is (in,) or (batch, in)."""
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[None, :]
    if x.shape[1] != params.in_dim:
        raise ConfigurationError(
            f"input dim {x.shape[1]} does not match first layer cols {params.in_dim}"
        )
    v = params.values
    for (r, c), act, (w0, w1, b1) in zip(
        params.shapes, params.activations, layer_offsets(params.shapes)
    ):
        w = v[w0:w1].reshape(r, c)
        x = _ACT_FN[act](x @ w.T + v[w1:b1])
    return x[0] if squeeze else x


def forward_tape(
    tape: T.Tape, values_node: T.Node, params: NetworkParams, x, offset: int = 0
) -> T.Node:
    """Tape-tracked forward pass.

    ``values_node`` is the flat parameter leaf; ``offset`` locates this
    network's block inside it (composite nets pack several blocks into one
    vector). ``x`` may be a Node or an array promoted to a constant.
    """
    x = x if isinstance(x, T.Node) else tape.constant(np.atleast_2d(x))
    if x.value.shape[-1] != params.in_dim:
        raise ConfigurationError(
            f"input dim {x.value.shape[-1]} does not match first layer cols {params.in_dim}"
        )
    for (r, c), act, (w0, w1, b1) in zip(
        params.shapes, params.activations, layer_offsets(params.shapes)
    ):
        w = T.reshape(T.flat_slice(values_node, offset + w0, offset + w1), (r, c))
        b = T.flat_slice(values_node, offset + w1, offset + b1)
        x = _ACT_NODE[act](T.add(T.matmul(x, T.transpose(w)), b))
    return x
