"""Adam with bias correction, operating on flat parameter vectors."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GradientError(ValueError):
    """Raised when a step is rejected because of a non-finite gradient."""


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n))


@dataclass
class Adam:
    """Stateful convenience wrapper around ``adam_step``."""

    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    state: AdamState | None = field(default=None, repr=False)

    def step(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        if self.state is None:
            self.state = AdamState.zeros(params.shape[0])
        params, self.state = adam_step(
            params, grads, self.state, self.lr, self.beta1, self.beta2, self.eps
        )
        return params


def adam_step(
    params: np.ndarray,
    grads: np.ndarray,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[np.ndarray, AdamState]:
    """One Adam update. Rejects non-finite gradients, naming the first bad index."""
    grads = np.asarray(grads, dtype=np.float64)
    if grads.shape != params.shape or state.m.shape != params.shape:
        raise GradientError(
            f"shape mismatch: params {params.shape}, grads {grads.shape}, state {state.m.shape}"
        )
    bad = ~np.isfinite(grads)
    if bad.any():
        idx = int(np.argmax(bad))
        raise GradientError(f"non-finite gradient at parameter index {idx}")
    t = state.t + 1
    m = beta1 * state.m + (1.0 - beta1) * grads
    v = beta2 * state.v + (1.0 - beta2) * grads * grads
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    new_params = params - lr * m_hat / (np.sqrt(v_hat) + eps)
    return new_params, AdamState(m, v, t)
