"""Non-holonomic 2D path planning over spline segments.

The agent moves at constant speed through a unit-square arena with 30
rectangular obstacles and 10 circular targets. Each action plans a cubic
spline anchored at the agent's position and heading (5 free parameters);
the agent then advances one step distance along it. A transition is
constraint-free when the whole planned spline stays inside the arena, clear
of the rectangles, under the curvature bound, and within the allowed length
band - the lower bound is what forces a lookahead beyond the traveled arc.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import CubicBezier, polyline_length, rect_signed_distance
from .base import Env, StepResult, plain_result, violation_result

N_RECTS = 30
N_TARGETS = 10
D_STEP = 0.05  # arena units traveled per step
LENGTH_BAND = (2.5, 3.5)  # spline length bounds in units of D_STEP
KAPPA_MAX = 1.0 / (3.0 * D_STEP)
TARGET_REWARD = 0.1
ALL_TARGETS_BONUS = 1.0
RECT_SIDES = (0.03, 0.15)
TARGET_RADII = (0.02, 0.05)

# spline decode scale: leg lengths relative to D = 3 * D_STEP
_D = 3.0 * D_STEP


@dataclass
class PathState:
    position: np.ndarray  # (2,)
    heading: float  # radians
    rect_lo: np.ndarray  # (30, 2)
    rect_hi: np.ndarray  # (30, 2)
    target_centers: np.ndarray  # (10, 2)
    target_radii: np.ndarray  # (10,)
    collected: np.ndarray  # (10,) bool
    steps: int = 0


@dataclass
class PathPartialState:
    """Feasibility-relevant fields: pose and obstacles, no targets."""

    position: np.ndarray
    heading: float
    rect_lo: np.ndarray
    rect_hi: np.ndarray


def decode_spline(position: np.ndarray, heading: float, action: np.ndarray) -> CubicBezier:
    """5 normalized parameters to a cubic spline anchored at (position, heading)."""
    control = decode_control_batch(position, heading, np.asarray(action)[None, :])[0]
    return CubicBezier(control)


def decode_control_batch(position: np.ndarray, heading: float, actions: np.ndarray) -> np.ndarray:
    """(B, 5) actions to (B, 4, 2) control points.

    P1 sits ahead along the heading (the non-holonomic anchor fixes the
    initial tangent); P2 and P3 are placed leg by leg in the heading frame.
    The reachable lengths straddle the allowed band on both sides.
    """
    a = np.clip(np.asarray(actions, dtype=np.float64), -1.0, 1.0)
    c, s = np.cos(heading), np.sin(heading)
    fwd = np.array([c, s])
    left = np.array([-s, c])
    p0 = np.asarray(position, dtype=np.float64)
    ctrl = np.empty((len(a), 4, 2))
    ctrl[:, 0] = p0
    ctrl[:, 1] = ctrl[:, 0] + fwd * (_D * (0.3 + 0.2 * a[:, 0, None]))
    ctrl[:, 2] = (
        ctrl[:, 1]
        + fwd * (_D * (0.3 + 0.2 * a[:, 1, None]))
        + left * (_D * 0.5 * a[:, 2, None])
    )
    ctrl[:, 3] = (
        ctrl[:, 2]
        + fwd * (_D * (0.3 + 0.2 * a[:, 3, None]))
        + left * (_D * 0.5 * a[:, 4, None])
    )
    return ctrl


def _bernstein(ts: np.ndarray):
    u = 1.0 - ts
    basis = np.stack([u**3, 3 * u**2 * ts, 3 * u * ts**2, ts**3], axis=-1)
    d1 = np.stack([3 * u**2, 6 * u * ts, 3 * ts**2], axis=-1)
    d2 = np.stack([6 * u, 6 * ts], axis=-1)
    return basis, d1, d2


def spline_violation_batch(
    partial: PathPartialState, actions: np.ndarray, s_points: int = 64
) -> tuple[np.ndarray, list]:
    """Continuous violation measure over each planned spline, with worst reasons.

    Per spline: sums clipped per-point violations (arena exit, rectangle
    penetration depth, curvature excess) plus the length-band breach, all at
    s_points equidistant parameter values. Zero means feasible. The second
    return lists the first violated category per sample (None when feasible).
    """
    if s_points < 2:
        raise ValueError("need at least 2 evaluation points")
    actions = np.atleast_2d(np.asarray(actions, dtype=np.float64))
    ctrl = decode_control_batch(partial.position, partial.heading, actions)
    legs1 = np.diff(ctrl, axis=1)  # (B, 3, 2)
    legs2 = np.diff(ctrl, axis=1, n=2)  # (B, 2, 2)
    ts = np.linspace(0.0, 1.0, s_points)
    basis, b1, b2 = _bernstein(ts)
    pts = np.einsum("sk,bkd->bsd", basis, ctrl)
    d1 = np.einsum("sk,bkd->bsd", b1, legs1)
    d2 = np.einsum("sk,bkd->bsd", b2, legs2)

    arena = np.maximum(np.maximum(-pts, pts - 1.0), 0.0).sum(axis=(1, 2))

    flat = pts.reshape(-1, 2)
    per_rect = np.zeros((len(actions), max(len(partial.rect_lo), 1)))
    for k in range(len(partial.rect_lo)):
        d = rect_signed_distance(flat, partial.rect_lo[k], partial.rect_hi[k])
        per_rect[:, k] = np.maximum(-d, 0.0).reshape(len(actions), s_points).sum(axis=1)
    # sorted accumulation makes G exactly independent of obstacle ordering
    depth = np.sort(per_rect, axis=1).sum(axis=1)

    cross = np.abs(d1[:, :, 0] * d2[:, :, 1] - d1[:, :, 1] * d2[:, :, 0])
    speed_sq = np.einsum("bsd,bsd->bs", d1, d1)
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = cross / speed_sq**1.5
    excess = np.where(speed_sq > 0.0, np.maximum(kappa - KAPPA_MAX, 0.0), KAPPA_MAX)
    curv = excess.sum(axis=1) / KAPPA_MAX  # normalized so scales stay comparable

    lengths = np.linalg.norm(np.diff(pts, axis=1), axis=2).sum(axis=1)
    lo, hi = LENGTH_BAND[0] * D_STEP, LENGTH_BAND[1] * D_STEP
    band = (np.maximum(lo - lengths, 0.0) + np.maximum(lengths - hi, 0.0)) / D_STEP

    total = arena + depth + curv + band
    reasons = []
    for i in range(len(actions)):
        if total[i] == 0.0:
            reasons.append(None)
        elif arena[i] > 0:
            reasons.append("arena")
        elif depth[i] > 0:
            reasons.append("collision")
        elif curv[i] > 0:
            reasons.append("curvature")
        else:
            reasons.append("length-band")
    return total, reasons


def spline_violation(
    partial: PathPartialState, action: np.ndarray, s_points: int = 64
) -> tuple[float, str | None]:
    """Single-action violation measure; exactly the batch evaluation of size 1."""
    total, reasons = spline_violation_batch(partial, np.asarray(action)[None, :], s_points)
    return float(total[0]), reasons[0]


class PathPlanEnv(Env):
    action_dim = 5
    latent_dim = 5
    ego_dim = 4  # position + heading direction
    item_dim = 5  # rect lo+hi+flag or target center+radius+collected, tagged
    max_items = N_RECTS + N_TARGETS

    def __init__(self, timeout=200, s_points=64, reject_attempts=1000):
        self.timeout = timeout
        self.s_points = s_points
        self.reject_attempts = reject_attempts
        self.state: PathState | None = None

    def _point_free(self, p, rect_lo, rect_hi):
        if len(rect_lo) == 0:
            return True
        d = np.min(
            [rect_signed_distance(p[None, :], lo, hi)[0] for lo, hi in zip(rect_lo, rect_hi)]
        )
        return d > 0

    def reset(self, seed: int) -> PathState:
        rng = np.random.default_rng(seed)
        sides = rng.uniform(*RECT_SIDES, size=(N_RECTS, 2))
        lo = rng.uniform(0.0, 1.0 - sides)
        hi = lo + sides
        centers = np.empty((N_TARGETS, 2))
        radii = rng.uniform(*TARGET_RADII, size=N_TARGETS)
        for i in range(N_TARGETS):
            for _ in range(self.reject_attempts):
                c = rng.uniform(0.05, 0.95, size=2)
                if self._point_free(c, lo, hi):
                    centers[i] = c
                    break
            else:  # pragma: no cover - extremely dense scenes only
                centers[i] = rng.uniform(0.05, 0.95, size=2)
        for _ in range(self.reject_attempts):
            pos = rng.uniform(0.1, 0.9, size=2)
            if self._point_free(pos, lo, hi):
                break
        heading = rng.uniform(-np.pi, np.pi)
        self.state = PathState(
            position=pos,
            heading=float(heading),
            rect_lo=lo,
            rect_hi=hi,
            target_centers=centers,
            target_radii=radii,
            collected=np.zeros(N_TARGETS, dtype=bool),
        )
        return self.state

    def step(self, action: np.ndarray) -> StepResult:
        s = self.state
        partial = self.partial_state(s)
        measure, reason = spline_violation(partial, action, self.s_points)
        if measure > 0.0:
            return violation_result(s, reason)

        curve = decode_spline(s.position, s.heading, action)
        ts = np.linspace(0.0, 1.0, self.s_points)
        pts = curve.point(ts)
        # advance one step distance along the sampled polyline
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        idx = int(np.searchsorted(cum, D_STEP))
        idx = min(idx, len(pts) - 1)
        frac = (D_STEP - cum[idx - 1]) / max(cum[idx] - cum[idx - 1], 1e-12)
        new_pos = pts[idx - 1] + frac * (pts[idx] - pts[idx - 1])
        walked = np.vstack([pts[:idx], new_pos])
        t_arr = ts[idx - 1] + frac * (ts[idx] - ts[idx - 1])
        tangent = curve.first_derivative(t_arr)
        new_heading = float(np.arctan2(tangent[1], tangent[0]))

        reward = 0.0
        for i in range(N_TARGETS):
            if s.collected[i]:
                continue
            d = np.linalg.norm(walked - s.target_centers[i], axis=1).min()
            if d <= s.target_radii[i]:
                s.collected[i] = True
                reward += TARGET_REWARD
        s.position = new_pos
        s.heading = new_heading
        s.steps += 1
        if s.collected.all():
            return plain_result(s, reward + ALL_TARGETS_BONUS, True, success=True)
        if s.steps >= self.timeout:
            return plain_result(s, reward, True, timeout=True)
        return plain_result(s, reward, False)

    # feasibility-side interface

    def partial_state(self, state: PathState | None = None) -> PathPartialState:
        s = state or self.state
        return PathPartialState(
            position=s.position.copy(),
            heading=s.heading,
            rect_lo=s.rect_lo.copy(),
            rect_hi=s.rect_hi.copy(),
        )

    def generate_partial_state(
        self, rng: np.random.Generator, candidates: int = N_RECTS
    ) -> PathPartialState:
        """Random pose and rectangles; rectangles covering the pose are removed."""
        sides = rng.uniform(*RECT_SIDES, size=(candidates, 2))
        lo = rng.uniform(0.0, 1.0 - sides)
        hi = lo + sides
        pos = rng.uniform(0.05, 0.95, size=2)
        heading = float(rng.uniform(-np.pi, np.pi))
        keep = np.array(
            [rect_signed_distance(pos[None, :], lo[k], hi[k])[0] > 0 for k in range(candidates)]
        )
        return PathPartialState(pos, heading, lo[keep], hi[keep])

    def partial_features(self, partial: PathPartialState) -> np.ndarray:
        """Pose plus a zero-padded rectangle block with per-slot presence flags."""
        items = np.zeros((N_RECTS, 5))
        m = len(partial.rect_lo)
        if m:
            items[:m, 0:2] = partial.rect_lo
            items[:m, 2:4] = partial.rect_hi
            items[:m, 4] = 1.0
        pose = np.array(
            [partial.position[0], partial.position[1], np.cos(partial.heading), np.sin(partial.heading)]
        )
        return np.concatenate([pose, items.ravel()])

    # observation encoding

    def obs_parts(self, state: PathState | None = None):
        s = state or self.state
        ego = np.array([s.position[0], s.position[1], np.cos(s.heading), np.sin(s.heading)])
        n = N_RECTS + N_TARGETS
        items = np.zeros((n, self.item_dim))
        mask = np.ones(n)
        items[:N_RECTS, 0:2] = s.rect_lo
        items[:N_RECTS, 2:4] = s.rect_hi
        items[:N_RECTS, 4] = -1.0  # obstacle tag
        items[N_RECTS:, 0:2] = s.target_centers
        items[N_RECTS:, 2] = s.target_radii
        items[N_RECTS:, 3] = s.collected.astype(float)
        items[N_RECTS:, 4] = 1.0  # target tag
        return ego, items, mask
