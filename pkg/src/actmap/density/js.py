"""Importance-sampled Jensen-Shannon gradient for feasibility-policy training.

Per state: generated actions a_i form the sigma-KDE support; their noisy
copies a*_j are importance samples from the sigma'-KDE. The feasibility bits
r_j yield the partition estimate Z and the target density p_j = r_j / Z. The
divergence gradient then weights each sample by

    c_j = (1 / 2N) * (q_sigma / q_sigma')(a*_j) * log(2 q_sigma / (p + q_sigma))(a*_j)

and flows d/d theta only through log q_sigma(a*_j), i.e. through the support
actions. All ratios are assembled in the log domain; samples whose weight
comes out non-finite are dropped and counted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..autodiff import tape as T
from .kde import kde_logpdf

LOG2 = float(np.log(2.0))


@dataclass
class SampleBatch:
    """Per-state sample set for one divergence gradient estimate."""

    actions: np.ndarray  # (N, d) generated support actions a_i
    noisy: np.ndarray  # (N, d) proposal samples a*_j
    sigma: float  # support KDE bandwidth
    sigma_prime: float  # proposal KDE bandwidth
    log_q: np.ndarray  # log q_sigma(a*_j)
    log_qp: np.ndarray  # log q_sigma'(a*_j)
    feasible: np.ndarray  # r_j in {0, 1}
    partition: float = 0.0  # Z estimate; 0 flags "no feasible sample"
    p_hat: np.ndarray | None = None  # r_j / Z, None until estimated
    log_p: np.ndarray | None = None  # log p_hat, -inf on infeasible rows

    def __post_init__(self):
        n = len(self.actions)
        for name in ("noisy", "log_q", "log_qp", "feasible"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length does not match actions ({n})")
        r = np.asarray(self.feasible)
        if not np.all((r == 0) | (r == 1)):
            raise ValueError("feasibility bits must be 0 or 1")

    @property
    def degenerate(self) -> bool:
        """True when no proposal sample was feasible (partition estimate 0)."""
        return self.partition == 0.0


def make_sample_batch(
    actions: np.ndarray,
    noisy: np.ndarray,
    sigma: float,
    sigma_prime: float,
    feasible: np.ndarray,
) -> SampleBatch:
    """Evaluate both KDEs at the proposal points and estimate the partition."""
    actions = np.asarray(actions, dtype=np.float64)
    noisy = np.asarray(noisy, dtype=np.float64)
    batch = SampleBatch(
        actions=actions,
        noisy=noisy,
        sigma=float(sigma),
        sigma_prime=float(sigma_prime),
        log_q=kde_logpdf(actions, noisy, sigma),
        log_qp=kde_logpdf(actions, noisy, sigma_prime),
        feasible=np.asarray(feasible, dtype=np.float64),
    )
    estimate_partition(batch)
    return batch


def estimate_partition(batch: SampleBatch) -> float:
    """Z = (1/N) sum_j r_j / q'(a*_j); fills p_hat = r_j / Z. Z = 0 flags degeneracy."""
    inv_qp = np.exp(-batch.log_qp)
    z = float(np.mean(batch.feasible * inv_qp))
    batch.partition = z
    feasible = batch.feasible > 0
    if z > 0:
        batch.p_hat = np.where(feasible, 1.0 / z, 0.0)
        batch.log_p = np.where(feasible, -np.log(z), -np.inf)
    else:
        batch.p_hat = np.zeros_like(batch.feasible)
        batch.log_p = np.full(len(batch.feasible), -np.inf)
    return z


def js_weights(
    log_q: np.ndarray, log_qp: np.ndarray, log_p: np.ndarray
) -> tuple[np.ndarray, int]:
    """Per-sample gradient weights c_j and the count of dropped (non-finite) samples.

    The log term log(2q / (p + q)) is written as log 2 - softplus(log p - log q)
    so it is exactly 0 when p matches q, exactly log 2 on infeasible samples
    (log p = -inf), and never overflows for any finite ratio.
    """
    n = len(log_q)
    x = log_p - log_q
    with np.errstate(invalid="ignore", over="ignore"):
        softplus = np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))
        c = (0.5 / n) * np.exp(log_q - log_qp) * (LOG2 - softplus)
    bad = ~np.isfinite(c)
    if bad.any():
        c = np.where(bad, 0.0, c)
    return c, int(bad.sum())


def canonical_sample_order(latents: np.ndarray) -> np.ndarray:
    """Index order sorting rows lexicographically.

    Sorting the per-sample arrays by content before any summation makes the
    whole gradient bitwise independent of the order samples were drawn in.
    """
    return np.lexsort(np.asarray(latents).T[::-1])


def weighted_logscore(tape: T.Tape, actions_node: T.Node, batch: SampleBatch) -> tuple[T.Node, int]:
    """Scalar node sum_j c_j log q_sigma(a*_j) whose gradient is the divergence estimate.

    The weights c_j are held constant; backward routes through the KDE support
    (the generated actions) only, via the fused support-gradient kernel.
    Returns the node and the dropped-sample count.
    """
    if batch.log_p is None:
        raise ValueError("estimate the partition before taking gradients")
    c, dropped = js_weights(batch.log_q, batch.log_qp, batch.log_p)
    sigma = batch.sigma
    noisy = np.ascontiguousarray(batch.noisy, dtype=np.float64)
    weights = np.ascontiguousarray(c, dtype=np.float64)
    value = float(np.dot(weights, batch.log_q))

    def back(g):
        grad = _kernels.kde_support_grad(
            np.ascontiguousarray(actions_node.value, dtype=np.float64),
            noisy,
            sigma,
            weights,
        )
        return (float(g) * grad,)

    node = tape._push(value, (actions_node,), back)
    return node, dropped
