"""Gaussian kernel density estimation over action batches.

Evaluation runs in the log domain (log-sum-exp) so batches of 1024 support
points in up to 7 dimensions survive kernel underflow.
"""

from __future__ import annotations

import numpy as np

from .. import _kernels


def kde_logpdf(support: np.ndarray, queries: np.ndarray, sigma: float) -> np.ndarray:
    """Log density of the isotropic-Gaussian mixture with one component per support row."""
    if sigma <= 0:
        raise ValueError("bandwidth must be positive")
    support = np.ascontiguousarray(np.atleast_2d(support), dtype=np.float64)
    queries = np.ascontiguousarray(np.atleast_2d(queries), dtype=np.float64)
    return _kernels.kde_logpdf(support, queries, float(sigma))


def kde_eval(support: np.ndarray, query: np.ndarray, sigma: float):
    """Mixture density at one query point or a batch of queries."""
    query = np.asarray(query, dtype=np.float64)
    single = query.ndim == 1
    out = np.exp(kde_logpdf(support, query, sigma))
    return float(out[0]) if single else out


def sample_proposal(actions: np.ndarray, sigma_prime: float, rng: np.random.Generator) -> np.ndarray:
    """One noisy sample per support action: a*_j = a_j + eps, eps ~ N(0, sigma'^2 I).

    Equivalent to drawing from the sigma'-KDE at its own support.
    """
    if sigma_prime <= 0:
        raise ValueError("proposal bandwidth must be positive")
    actions = np.asarray(actions, dtype=np.float64)
    return actions + rng.normal(0.0, sigma_prime, size=actions.shape)
