# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython kernels: fused loops for piece-membership multiplicity sums.

Same contracts as tflat._kernels_py (the pure-numpy fallback); see there
for conventions.  These fuse the point x shift x piece loops into one pass.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def multiplicity_1d(pts, inv_scales, offs):
    cdef double[::1] p = np.ascontiguousarray(pts, dtype=np.float64)
    cdef double[::1] inv = np.ascontiguousarray(inv_scales, dtype=np.float64)
    cdef double[::1] off = np.ascontiguousarray(offs, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], m = inv.shape[0]
    out_arr = np.zeros(n, dtype=np.int32)
    cdef int[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double u
    for i in range(n):
        for j in range(m):
            u = (p[i] - off[j]) * inv[j]
            if -1e-9 <= u < 1.0 - 1e-9:
                out[i] += 1
    return out_arr


def multiplicity_2d(pts, inv_mats, offs):
    cdef double[:, ::1] p = np.ascontiguousarray(pts, dtype=np.float64)
    cdef double[:, :, ::1] inv = np.ascontiguousarray(inv_mats, dtype=np.float64)
    cdef double[:, ::1] off = np.ascontiguousarray(offs, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], m = inv.shape[0]
    out_arr = np.zeros(n, dtype=np.int32)
    cdef int[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double dx, dy, u, v
    for i in range(n):
        for j in range(m):
            dx = p[i, 0] - off[j, 0]
            dy = p[i, 1] - off[j, 1]
            u = inv[j, 0, 0] * dx + inv[j, 0, 1] * dy
            if u < -1e-9 or u >= 1.0 - 1e-9:
                continue
            v = inv[j, 1, 0] * dx + inv[j, 1, 1] * dy
            if -1e-9 <= v < 1.0 - 1e-9:
                out[i] += 1
    return out_arr


def shift_multiplicity_sum_1d(pts, shifts, weights, inv_scales, offs):
    cdef double[::1] p = np.ascontiguousarray(pts, dtype=np.float64)
    cdef double[::1] sh = np.ascontiguousarray(shifts, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] inv = np.ascontiguousarray(inv_scales, dtype=np.float64)
    cdef double[::1] off = np.ascontiguousarray(offs, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], k = sh.shape[0], m = inv.shape[0]
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, s, j
    cdef double x, u, acc
    for i in range(n):
        acc = 0.0
        for s in range(k):
            x = p[i] - sh[s]
            for j in range(m):
                u = (x - off[j]) * inv[j]
                if -1e-9 <= u < 1.0 - 1e-9:
                    acc += w[s]
        out[i] = acc
    return out_arr


def shift_multiplicity_sum_2d(pts, shifts, weights, inv_mats, offs):
    cdef double[:, ::1] p = np.ascontiguousarray(pts, dtype=np.float64)
    cdef double[:, ::1] sh = np.ascontiguousarray(shifts, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[:, :, ::1] inv = np.ascontiguousarray(inv_mats, dtype=np.float64)
    cdef double[:, ::1] off = np.ascontiguousarray(offs, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], k = sh.shape[0], m = inv.shape[0]
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, s, j
    cdef double x, y, dx, dy, u, v, acc
    for i in range(n):
        acc = 0.0
        for s in range(k):
            x = p[i, 0] - sh[s, 0]
            y = p[i, 1] - sh[s, 1]
            for j in range(m):
                dx = x - off[j, 0]
                dy = y - off[j, 1]
                u = inv[j, 0, 0] * dx + inv[j, 0, 1] * dy
                if u < -1e-9 or u >= 1.0 - 1e-9:
                    continue
                v = inv[j, 1, 0] * dx + inv[j, 1, 1] * dy
                if -1e-9 <= v < 1.0 - 1e-9:
                    acc += w[s]
        out[i] = acc
    return out_arr
