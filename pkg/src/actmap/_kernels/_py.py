"""Numpy fallback for the hot kernels.

Same contracts as the compiled backend in ``_speedups.pyx``; everything here
is plain vectorized numpy so the package works without a C compiler.
"""

import numpy as np

BACKEND = "python"


def kde_logpdf(support, queries, sigma):
    """Log-density of an isotropic-Gaussian KDE at each query point.

    support: (N, d) kernel centers, queries: (M, d). Returns (M,) log-densities
    log[(1/N) sum_i k_sigma(query - support_i)], evaluated with a log-sum-exp
    so N ~ 1000, d <= 7 does not underflow.
    """
    support = np.ascontiguousarray(support, dtype=np.float64)
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    n, d = support.shape
    # pairwise squared distances via the gemm expansion to avoid (M,N,d) temporaries
    sq = (
        np.sum(queries**2, axis=1)[:, None]
        + np.sum(support**2, axis=1)[None, :]
        - 2.0 * (queries @ support.T)
    )
    np.maximum(sq, 0.0, out=sq)
    z = sq / (-2.0 * sigma * sigma)
    zmax = z.max(axis=1)
    lse = zmax + np.log(np.sum(np.exp(z - zmax[:, None]), axis=1))
    return lse - np.log(n) - 0.5 * d * np.log(2.0 * np.pi * sigma * sigma)


def kde_support_grad(support, queries, sigma, weights):
    """Gradient wrt the support points of sum_j weights[j] * log kde(queries[j]).

    d log q(y_j) / d a_i = softmax_i(-|y_j - a_i|^2 / 2s^2) * (y_j - a_i) / s^2,
    accumulated over queries with the given per-query weights. Returns (N, d).
    """
    support = np.ascontiguousarray(support, dtype=np.float64)
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    sq = (
        np.sum(queries**2, axis=1)[:, None]
        + np.sum(support**2, axis=1)[None, :]
        - 2.0 * (queries @ support.T)
    )
    np.maximum(sq, 0.0, out=sq)
    z = sq / (-2.0 * sigma * sigma)
    z -= z.max(axis=1)[:, None]
    w = np.exp(z)
    w /= w.sum(axis=1)[:, None]
    w *= weights[:, None]  # (M, N) combined weights
    colsum = w.sum(axis=0)
    grad = (w.T @ queries - colsum[:, None] * support) / (sigma * sigma)
    return grad


def segment_sphere_clearances(seg_a, seg_b, seg_radius, centers, sphere_radius):
    """Signed clearance between capsules and spheres.

    seg_a, seg_b: (L, 3) capsule segment endpoints, seg_radius: (L,);
    centers: (O, 3), sphere_radius: (O,). Returns (L, O) distances
    (segment to center) minus the radius sums; negative means collision.
    """
    seg_a = np.asarray(seg_a, dtype=np.float64)
    seg_b = np.asarray(seg_b, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    d = seg_b - seg_a  # (L, 3)
    dd = np.sum(d * d, axis=1)  # (L,)
    rel = centers[None, :, :] - seg_a[:, None, :]  # (L, O, 3)
    t = np.einsum("loc,lc->lo", rel, d)
    safe = np.where(dd > 0.0, dd, 1.0)
    t = np.clip(t / safe[:, None], 0.0, 1.0)
    t[dd == 0.0] = 0.0
    closest = seg_a[:, None, :] + t[:, :, None] * d[:, None, :]
    dist = np.linalg.norm(centers[None, :, :] - closest, axis=2)
    return dist - np.asarray(seg_radius)[:, None] - np.asarray(sphere_radius)[None, :]
