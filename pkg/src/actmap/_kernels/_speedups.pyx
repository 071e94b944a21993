# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled fast path for the hot kernels (pairwise KDE work, capsule clearances).

Contracts match ``actmap._kernels._py``; the loops here fuse the pairwise
distance, log-sum-exp and gradient accumulation passes to avoid the (M, N)
temporaries of the numpy backend.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, sqrt

cnp.import_array()

BACKEND = "compiled"


def kde_logpdf(support, queries, double sigma):
    cdef double[:, ::1] a = np.ascontiguousarray(support, dtype=np.float64)
    cdef double[:, ::1] q = np.ascontiguousarray(queries, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], d = a.shape[1], m = q.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double inv2s2 = 1.0 / (2.0 * sigma * sigma)
    cdef double norm = log(<double> n) + 0.5 * d * log(2.0 * np.pi * sigma * sigma)
    cdef Py_ssize_t i, j, k
    cdef double sq, diff, zmax, acc
    # two passes per row: max, then exp-sum; z values stashed in one scratch row
    scratch = np.empty(n, dtype=np.float64)
    cdef double[::1] zrow = scratch
    for j in range(m):
        zmax = -1e300
        for i in range(n):
            sq = 0.0
            for k in range(d):
                diff = q[j, k] - a[i, k]
                sq += diff * diff
            zrow[i] = -sq * inv2s2
            if zrow[i] > zmax:
                zmax = zrow[i]
        acc = 0.0
        for i in range(n):
            acc += exp(zrow[i] - zmax)
        out[j] = zmax + log(acc) - norm
    return out_arr


def kde_support_grad(support, queries, double sigma, weights):
    cdef double[:, ::1] a = np.ascontiguousarray(support, dtype=np.float64)
    cdef double[:, ::1] q = np.ascontiguousarray(queries, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], d = a.shape[1], m = q.shape[0]
    grad_arr = np.zeros((n, d), dtype=np.float64)
    cdef double[:, ::1] grad = grad_arr
    cdef double inv2s2 = 1.0 / (2.0 * sigma * sigma)
    cdef double invs2 = 1.0 / (sigma * sigma)
    cdef Py_ssize_t i, j, k
    cdef double sq, diff, zmax, acc, c
    scratch = np.empty(n, dtype=np.float64)
    cdef double[::1] zrow = scratch
    for j in range(m):
        zmax = -1e300
        for i in range(n):
            sq = 0.0
            for k in range(d):
                diff = q[j, k] - a[i, k]
                sq += diff * diff
            zrow[i] = -sq * inv2s2
            if zrow[i] > zmax:
                zmax = zrow[i]
        acc = 0.0
        for i in range(n):
            zrow[i] = exp(zrow[i] - zmax)
            acc += zrow[i]
        c = w[j] / acc
        for i in range(n):
            for k in range(d):
                grad[i, k] += c * zrow[i] * (q[j, k] - a[i, k]) * invs2
    return grad_arr


def segment_sphere_clearances(seg_a, seg_b, seg_radius, centers, sphere_radius):
    cdef double[:, ::1] pa = np.ascontiguousarray(seg_a, dtype=np.float64)
    cdef double[:, ::1] pb = np.ascontiguousarray(seg_b, dtype=np.float64)
    cdef double[::1] cr = np.ascontiguousarray(seg_radius, dtype=np.float64)
    cdef double[:, ::1] cs = np.ascontiguousarray(centers, dtype=np.float64)
    cdef double[::1] sr = np.ascontiguousarray(sphere_radius, dtype=np.float64)
    cdef Py_ssize_t nl = pa.shape[0], no = cs.shape[0]
    out_arr = np.empty((nl, no), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t l, o, k
    cdef double dx, dy, dz, dd, t, px, py, pz, dist
    for l in range(nl):
        dx = pb[l, 0] - pa[l, 0]
        dy = pb[l, 1] - pa[l, 1]
        dz = pb[l, 2] - pa[l, 2]
        dd = dx * dx + dy * dy + dz * dz
        for o in range(no):
            if dd > 0.0:
                t = ((cs[o, 0] - pa[l, 0]) * dx
                     + (cs[o, 1] - pa[l, 1]) * dy
                     + (cs[o, 2] - pa[l, 2]) * dz) / dd
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
            else:
                t = 0.0
            px = cs[o, 0] - (pa[l, 0] + t * dx)
            py = cs[o, 1] - (pa[l, 1] + t * dy)
            pz = cs[o, 2] - (pa[l, 2] + t * dz)
            dist = sqrt(px * px + py * py + pz * pz)
            out[l, o] = dist - cr[l] - sr[o]
    return out_arr
