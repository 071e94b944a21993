"""Planar cubic Bezier curves: evaluation, curvature, chord-length."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CubicBezier:
    """Four 2D control points, rows P0..P3."""

    control: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.control, dtype=np.float64)
        if c.shape != (4, 2):
            raise ValueError(f"control points must be (4, 2), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("control points must be finite")
        object.__setattr__(self, "control", c)

    def point(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        u = 1.0 - t
        b = np.stack([u**3, 3 * u**2 * t, 3 * u * t**2, t**3], axis=-1)
        return b @ self.control

    def first_derivative(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        u = 1.0 - t
        d = np.diff(self.control, axis=0)  # P1-P0, P2-P1, P3-P2
        b = np.stack([3 * u**2, 6 * u * t, 3 * t**2], axis=-1)
        return b @ d

    def second_derivative(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        d2 = np.diff(self.control, axis=0, n=2)  # P2-2P1+P0, P3-2P2+P1
        b = np.stack([6 * (1.0 - t), 6 * t], axis=-1)
        return b @ d2

    def curvature(self, t) -> np.ndarray:
        """|x'y'' - y'x''| / |B'|^3; +inf where the speed vanishes (cusp)."""
        d1 = np.atleast_2d(self.first_derivative(t))
        d2 = np.atleast_2d(self.second_derivative(t))
        cross = np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
        speed_sq = np.einsum("ij,ij->i", d1, d1)
        out = np.full(len(d1), np.inf)
        ok = speed_sq > 0.0
        out[ok] = cross[ok] / speed_sq[ok] ** 1.5
        scalar = np.isscalar(t) or np.ndim(t) == 0
        return float(out[0]) if scalar else out

    def sample(self, s: int) -> np.ndarray:
        """(s, 2) points at equidistant parameter values including both endpoints."""
        if s < 2:
            raise ValueError("need at least 2 sample points")
        return self.point(np.linspace(0.0, 1.0, s))


def polyline_length(curve: CubicBezier, s: int) -> float:
    """Chord-length approximation from s equidistant parameter samples."""
    pts = curve.sample(s)
    return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))
