"""Feasibility-policy pretraining loop.

Each step draws a small batch of partial states. Per state: sample latents
uniformly from the cube, map them through the current policy, perturb the
mapped actions with Gaussian noise, query the feasibility model at the
perturbed points, and form the divergence gradient between the generator's
kernel density and the (self-normalized) feasible target density. Gradients
are averaged over the state batch and applied with Adam.

Per-sample quantities are processed in canonical (sorted) order, so the
result is bitwise independent of draw order and reruns with the same config
and seed reproduce checkpoints exactly.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from ..autodiff import Adam, NetworkParams, Tape, forward_tape, gradient, save_checkpoint
from ..density import canonical_sample_order, make_sample_batch, sample_proposal, weighted_logscore
from .evaluate import evaluate
from .policy import build_policy_params, latent_inputs

log = logging.getLogger(__name__)


@dataclass
class FeasTrainConfig:
    n_samples: int = 1024  # latent draws per state
    states_per_batch: int = 16
    sigma: float = 0.1
    sigma_prime_factor: float = 2.0
    steps: int = 500_000
    learning_rate: float = 1e-4
    eval_interval: int = 1000
    eval_states: int = 8
    eval_samples: int = 1024
    hidden: tuple = (256, 256)

    def __post_init__(self):
        if self.n_samples < 1 or self.states_per_batch < 1:
            raise ValueError("sample and state batch sizes must be at least 1")
        if self.sigma <= 0.0 or self.sigma_prime_factor <= 0.0:
            raise ValueError("bandwidths must be positive")
        if self.steps < 0 or self.eval_interval < 1:
            raise ValueError("steps must be non-negative, eval interval positive")
        self.hidden = tuple(int(h) for h in self.hidden)

    @property
    def sigma_prime(self) -> float:
        return self.sigma_prime_factor * self.sigma


@dataclass
class PretrainRecord:
    """One evaluation-checkpoint row, mirroring the CSV columns."""

    step: int
    precision: float
    coverage: float | None
    dropped: int


def _state_gradient(params, env, model, partial, config, rng):
    """JS gradient for one partial state, or None when the state is degenerate."""
    feats = env.partial_features(partial)
    z = rng.uniform(-1.0, 1.0, size=(config.n_samples, env.action_dim))
    z = z[canonical_sample_order(z)]
    tape = Tape()
    values_node = tape.param(params.values)
    actions_node = forward_tape(tape, values_node, params, latent_inputs(feats, z))
    actions = actions_node.value
    noisy = sample_proposal(actions, config.sigma_prime, rng)
    feasible = model.g_batch(partial, noisy).astype(np.float64)
    batch = make_sample_batch(actions, noisy, config.sigma, config.sigma_prime, feasible)
    if batch.degenerate:
        return None, 0
    loss, dropped = weighted_logscore(tape, actions_node, batch)
    return gradient(tape, loss, wrt=values_node), dropped


def pretrain(
    config: FeasTrainConfig,
    env,
    model,
    rng: np.random.Generator,
    log_path=None,
    checkpoint_dir=None,
    params: NetworkParams | None = None,
    mode_fn=None,
    history: list | None = None,
) -> NetworkParams:
    """Train the feasibility policy against a feasibility model.

    ``env`` is the state source: it provides generate_partial_state,
    partial_features and action_dim. A state whose perturbed samples are all
    infeasible gives no usable target density and is skipped; a step where
    every state is skipped applies no update. Evaluation checkpoints land
    every ``eval_interval`` steps on held-out states, using a dedicated
    random stream so the training draw sequence does not depend on them.
    """
    eval_rng = rng.spawn(1)[0]
    held_out = [env.generate_partial_state(eval_rng) for _ in range(config.eval_states)]
    if params is None:
        feature_dim = env.partial_features(held_out[0]).size
        params = build_policy_params(feature_dim, env.action_dim, config.hidden, rng)

    opt = Adam(config.learning_rate)
    dropped_total = 0
    skipped_states = 0
    writer = None
    fh = None
    if log_path is not None:
        fh = open(log_path, "w", newline="")
        writer = csv.writer(fh)
        writer.writerow(["step", "precision", "coverage", "dropped"])

    try:
        for step in range(config.steps):
            grad_sum = np.zeros_like(params.values)
            used = 0
            for _ in range(config.states_per_batch):
                partial = env.generate_partial_state(rng)
                g, dropped = _state_gradient(params, env, model, partial, config, rng)
                dropped_total += dropped
                if g is None:
                    skipped_states += 1
                    log.debug("step %d: degenerate state skipped", step)
                    continue
                grad_sum += g
                used += 1
            if used:
                params.values = opt.step(params.values, grad_sum / used)

            last = step + 1 == config.steps
            if (step + 1) % config.eval_interval == 0 or last:
                report = evaluate(
                    params, env, held_out, config.eval_samples, model, eval_rng, mode_fn
                )
                record = PretrainRecord(step + 1, report.precision, report.coverage, dropped_total)
                if history is not None:
                    history.append(record)
                if writer is not None:
                    cov = "" if record.coverage is None else repr(record.coverage)
                    writer.writerow([record.step, repr(record.precision), cov, record.dropped])
                    fh.flush()
                if checkpoint_dir is not None:
                    name = "feas_final.ckpt" if last else f"feas_{step + 1:07d}.ckpt"
                    save_checkpoint(f"{checkpoint_dir}/{name}", {"feasibility": params})
    finally:
        if fh is not None:
            fh.close()
    if skipped_states:
        log.info("pretraining skipped %d degenerate states", skipped_states)
    return params
