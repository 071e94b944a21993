"""Safety-layer baselines: post-hoc filters on proposed actions.

Each filter checks the proposed action against a feasibility model at the
current partial state and intervenes only on violations. All filters share
one call signature (action, rng, sampler) so the rollout loop does not care
which is active; replacement and projection ignore the sampler.
"""

from __future__ import annotations

import numpy as np

from ..envs.base import Env
from ..feasibility.models import FeasibilityModel

RESAMPLE_BUDGET = 100
PROJECTION_STEP = 0.05
PROJECTION_MAX_ITERS = 50
BISECTION_ITERS = 30
FD_EPS = 1e-5


class ActionFilter:
    """Feasibility gate around the agent's proposals, with intervention counters."""

    def __init__(self, env: Env, model: FeasibilityModel):
        self.env = env
        self.model = model
        self.decisions = 0
        self.interventions = 0

    def __call__(self, action, rng=None, sampler=None, partial=None) -> np.ndarray:
        self.decisions += 1
        action = np.asarray(action, dtype=np.float64)
        if partial is None:
            partial = self.env.partial_state()
        if self.model.g(partial, action):
            return action
        self.interventions += 1
        return self._intervene(partial, action, rng, sampler)

    def _intervene(self, partial, action, rng, sampler) -> np.ndarray:
        raise NotImplementedError

    def counters(self) -> dict:
        return {"decisions": self.decisions, "interventions": self.interventions}


class ReplacementFilter(ActionFilter):
    """Swap any infeasible proposal for the environment's known safe action."""

    def __init__(self, env: Env, model: FeasibilityModel):
        super().__init__(env, model)
        if type(env).safe_action is Env.safe_action:
            raise ValueError(
                f"{type(env).__name__} has no known safe action; replacement cannot run"
            )

    def _intervene(self, partial, action, rng, sampler) -> np.ndarray:
        return np.asarray(self.env.safe_action(), dtype=np.float64)


class ResamplingFilter(ActionFilter):
    """Redraw from the policy until feasible; after the budget, keep the last draw."""

    def __init__(self, env: Env, model: FeasibilityModel, budget: int = RESAMPLE_BUDGET):
        super().__init__(env, model)
        self.budget = int(budget)
        self.redraws = 0
        self.exhausted = 0

    def _intervene(self, partial, action, rng, sampler) -> np.ndarray:
        if sampler is None:
            raise ValueError("resampling needs a sampler to redraw from")
        draw = action
        for _ in range(self.budget):
            draw = np.asarray(sampler(rng), dtype=np.float64)
            self.redraws += 1
            if self.model.g(partial, draw):
                return draw
        # budget exhausted: execute the final draw even though it violates
        self.exhausted += 1
        return draw

    def counters(self) -> dict:
        out = super().counters()
        out.update({"redraws": self.redraws, "exhausted": self.exhausted})
        return out


class ProjectionFilter(ActionFilter):
    """Descend the continuous violation measure until the proposal turns feasible.

    Steps are fixed-length along the finite-difference gradient of G; once a
    feasible iterate appears, bisection between the last infeasible and first
    feasible iterates pulls the result back to the constraint boundary. If no
    feasible point is found within the iteration budget the last iterate is
    returned and the failure counted.
    """

    def __init__(self, env: Env, model: FeasibilityModel,
                 step: float = PROJECTION_STEP, max_iters: int = PROJECTION_MAX_ITERS):
        super().__init__(env, model)
        self.step = float(step)
        self.max_iters = int(max_iters)
        self.iterations = 0
        self.failures = 0

    def _gradient(self, partial, action: np.ndarray) -> np.ndarray:
        d = len(action)
        probes = np.repeat(action[None, :], 2 * d, axis=0)
        probes[np.arange(d), np.arange(d)] += FD_EPS
        probes[np.arange(d, 2 * d), np.arange(d)] -= FD_EPS
        g = self.model.violation_batch(partial, probes)
        return (g[:d] - g[d:]) / (2.0 * FD_EPS)

    def _intervene(self, partial, action, rng, sampler) -> np.ndarray:
        current = action.copy()
        last_infeasible = None
        feasible = False
        for _ in range(self.max_iters):
            self.iterations += 1
            grad = self._gradient(partial, current)
            norm = float(np.linalg.norm(grad))
            if norm < 1e-12:
                break  # flat: either numerically feasible already or stuck
            last_infeasible = current
            current = current - (self.step / norm) * grad
            if self.model.g(partial, current):
                feasible = True
                break
        if not feasible:
            self.failures += 1
            return current
        if last_infeasible is not None:
            lo, hi = last_infeasible, current
            for _ in range(BISECTION_ITERS):
                mid = 0.5 * (lo + hi)
                if self.model.g(partial, mid):
                    hi = mid
                else:
                    lo = mid
            current = hi
        return current

    def counters(self) -> dict:
        out = super().counters()
        out.update({"projection_iterations": self.iterations, "failures": self.failures})
        return out


FILTERS = {
    "replacement": ReplacementFilter,
    "resampling": ResamplingFilter,
    "projection": ProjectionFilter,
}


def make_filter(name: str, env: Env, model: FeasibilityModel) -> ActionFilter:
    if name not in FILTERS:
        raise ValueError(f"unknown safety filter {name!r}")
    return FILTERS[name](env, model)
