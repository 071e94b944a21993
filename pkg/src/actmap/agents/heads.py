"""Squashed-Gaussian policy heads.

The head emits mean and log-std per latent dimension; samples are squashed
through tanh into (-1, 1)^d and the density picks up the change-of-variables
correction sum_k log(1 - z_k^2), floored for numerical safety. The same
arithmetic exists three times: sampling (numpy), re-evaluating a stored
latent (numpy), and on the tape for policy gradients.
"""

from __future__ import annotations

import numpy as np

from ..autodiff import tape as T

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
SQUASH_FLOOR = 1e-6
_LOG_2PI = np.log(2.0 * np.pi)
# strictly inside (-1, 1) so atanh of a stored latent stays finite
_ATANH_GUARD = 1.0 - 1e-12


def split_head(out: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(…, 2d) trunk output to (mean, clamped log-std)."""
    d = out.shape[-1] // 2
    mean = out[..., :d]
    log_std = np.clip(out[..., d:], LOG_STD_MIN, LOG_STD_MAX)
    return mean, log_std


def squash(mean: np.ndarray, log_std: np.ndarray, x: np.ndarray):
    """Squash pre-activation samples x; returns (z, log-density of z)."""
    z = np.tanh(x)
    std = np.exp(log_std)
    gauss = -0.5 * ((x - mean) / std) ** 2 - log_std - 0.5 * _LOG_2PI
    correction = np.log(np.maximum(1.0 - z**2, SQUASH_FLOOR))
    return z, (gauss - correction).sum(axis=-1)


def squashed_sample(mean: np.ndarray, log_std: np.ndarray, rng: np.random.Generator):
    """Draw z = tanh(x), x ~ Normal(mean, exp(log_std)); returns (z, logpi)."""
    x = mean + np.exp(log_std) * rng.standard_normal(size=np.shape(mean))
    return squash(mean, log_std, x)


def squashed_logpdf(mean: np.ndarray, log_std: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Log-density of an already-squashed latent under the head."""
    x = np.arctanh(np.clip(z, -_ATANH_GUARD, _ATANH_GUARD))
    return squash(mean, log_std, x)[1]


def select_columns(tape: T.Tape, node: T.Node, start: int, stop: int) -> T.Node:
    """Column slice of a 2D node via a constant 0/1 selector (exact)."""
    n = node.value.shape[-1]
    sel = np.zeros((n, stop - start))
    sel[start:stop] = np.eye(stop - start)
    return T.matmul(node, tape.constant(sel))


def head_nodes(tape: T.Tape, out_node: T.Node) -> tuple[T.Node, T.Node]:
    """Tape version of split_head."""
    d = out_node.value.shape[-1] // 2
    mean = select_columns(tape, out_node, 0, d)
    log_std = T.clip(select_columns(tape, out_node, d, 2 * d), LOG_STD_MIN, LOG_STD_MAX)
    return mean, log_std


def reparam_sample_nodes(tape: T.Tape, mean: T.Node, log_std: T.Node, xi: np.ndarray):
    """Reparameterized z and logpi nodes from constant standard-normal draws xi."""
    std = T.exp(log_std)
    x = T.add(mean, T.mul(std, tape.constant(xi)))
    z = T.tanh(x)
    gauss = T.sub(tape.constant(-0.5 * xi**2 - 0.5 * _LOG_2PI), log_std)
    corr = T.log(T.maximum(T.sub(tape.constant(1.0), T.square(z)), SQUASH_FLOOR))
    logp = T.sum_(T.sub(gauss, corr), axis=-1)
    return z, logp


def logpdf_nodes(tape: T.Tape, mean: T.Node, log_std: T.Node, z: np.ndarray) -> T.Node:
    """Tape version of squashed_logpdf for a fixed stored latent z."""
    x = np.arctanh(np.clip(z, -_ATANH_GUARD, _ATANH_GUARD))
    inv_std = T.exp(T.neg(log_std))
    u = T.mul(T.sub(tape.constant(x), mean), inv_std)
    gauss = T.sub(T.mul(T.square(u), -0.5), T.add(log_std, 0.5 * _LOG_2PI))
    corr = np.log(np.maximum(1.0 - z**2, SQUASH_FLOOR))
    return T.sum_(T.sub(gauss, tape.constant(corr)), axis=-1)
