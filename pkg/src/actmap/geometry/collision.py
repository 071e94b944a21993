"""Clearance primitives: capsules vs spheres, points vs axis-aligned rectangles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels


@dataclass(frozen=True)
class Sphere:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=np.float64))
        if not (self.radius > 0):
            raise ValueError("sphere radius must be positive")


@dataclass(frozen=True)
class Capsule:
    """Segment with radius; degenerate endpoints give a sphere."""

    endpoint_a: np.ndarray
    endpoint_b: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "endpoint_a", np.asarray(self.endpoint_a, dtype=np.float64))
        object.__setattr__(self, "endpoint_b", np.asarray(self.endpoint_b, dtype=np.float64))
        if not (self.radius > 0):
            raise ValueError("capsule radius must be positive")


def capsule_sphere_clearance(c: Capsule, s: Sphere) -> float:
    """Signed clearance: segment-to-center distance minus both radii; < 0 is collision."""
    out = _kernels.segment_sphere_clearances(
        c.endpoint_a[None, :],
        c.endpoint_b[None, :],
        np.array([c.radius]),
        s.center[None, :],
        np.array([s.radius]),
    )
    return float(out[0, 0])


def chain_sphere_clearances(
    seg_a: np.ndarray,
    seg_b: np.ndarray,
    seg_radius: np.ndarray,
    centers: np.ndarray,
    radii: np.ndarray,
) -> np.ndarray:
    """(L, O) signed clearances between L capsule segments and O spheres."""
    if len(centers) == 0:
        return np.zeros((len(seg_a), 0))
    return _kernels.segment_sphere_clearances(
        np.ascontiguousarray(seg_a, dtype=np.float64),
        np.ascontiguousarray(seg_b, dtype=np.float64),
        np.ascontiguousarray(seg_radius, dtype=np.float64),
        np.ascontiguousarray(centers, dtype=np.float64),
        np.ascontiguousarray(radii, dtype=np.float64),
    )


def rect_signed_distance(points: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Signed distance from 2D points to an axis-aligned rectangle [lo, hi].

    Positive outside, negative inside (penetration depth).
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    center = (np.asarray(lo) + np.asarray(hi)) / 2.0
    half = (np.asarray(hi) - np.asarray(lo)) / 2.0
    q = np.abs(points - center) - half
    outside = np.linalg.norm(np.maximum(q, 0.0), axis=1)
    inside = np.minimum(np.max(q, axis=1), 0.0)
    return outside + inside
