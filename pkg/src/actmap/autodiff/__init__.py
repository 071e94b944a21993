"""Minimal reverse-mode differentiation and optimizer support for small dense nets."""

from . import tape
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .net import (
    ACTIVATIONS,
    ConfigurationError,
    NetworkParams,
    forward,
    forward_tape,
    init_params,
    layer_offsets,
    param_count,
)
from .optim import Adam, AdamState, GradientError, adam_step
from .tape import Node, Tape, gradient

__all__ = [
    "ACTIVATIONS",
    "Adam",
    "AdamState",
    "CheckpointError",
    "ConfigurationError",
    "GradientError",
    "NetworkParams",
    "Node",
    "Tape",
    "adam_step",
    "forward",
    "forward_tape",
    "gradient",
    "init_params",
    "layer_offsets",
    "load_checkpoint",
    "param_count",
    "save_checkpoint",
    "tape",
]
