"""Pure-numpy kernels.

Reference implementations of the hot loops.  The Cython module
``tflat._kernels`` exposes the same signatures; ``tflat.kernels`` picks
whichever is importable.  Keep the two in lockstep — tests/test_kernels.py
checks parity on random inputs.

Conventions: a piece is the half-open parallelepiped off + M*[0,1)^d and is
passed here as (inv_mat = M^-1, off).  Membership tests -1e-9 <= u < 1-1e-9:
the half-open boundary is shifted by a fixed 1e-9 so that float jitter at
piece boundaries classifies consistently on both sides of a seam (a point
dropped from one translate is picked up by its neighbor).  Exactly
representable boundary values (0.0 and 1.0 at grid-aligned inputs) still
classify exactly as half-open.
"""

import numpy as np

BACKEND = "python"


def multiplicity_1d(pts, inv_scales, offs):
    """Count, for each point, how many pieces contain it."""
    pts = np.asarray(pts, dtype=np.float64)
    acc = np.zeros(pts.shape[0], dtype=np.int32)
    for inv, off in zip(inv_scales, offs):
        u = (pts - off) * inv
        acc += ((u >= -1e-9) & (u < 1.0 - 1e-9)).astype(np.int32)
    return acc


def multiplicity_2d(pts, inv_mats, offs):
    pts = np.asarray(pts, dtype=np.float64)
    acc = np.zeros(pts.shape[0], dtype=np.int32)
    for inv, off in zip(inv_mats, offs):
        dx = pts[:, 0] - off[0]
        dy = pts[:, 1] - off[1]
        u = inv[0, 0] * dx + inv[0, 1] * dy
        v = inv[1, 0] * dx + inv[1, 1] * dy
        acc += ((u >= -1e-9) & (u < 1.0 - 1e-9)
                & (v >= -1e-9) & (v < 1.0 - 1e-9)).astype(np.int32)
    return acc


def shift_multiplicity_sum_1d(pts, shifts, weights, inv_scales, offs):
    """out[p] = sum_i weights[i] * multiplicity(pts[p] - shifts[i])."""
    pts = np.asarray(pts, dtype=np.float64)
    out = np.zeros(pts.shape[0], dtype=np.float64)
    for s, w in zip(shifts, weights):
        out += w * multiplicity_1d(pts - s, inv_scales, offs)
    return out


def shift_multiplicity_sum_2d(pts, shifts, weights, inv_mats, offs):
    pts = np.asarray(pts, dtype=np.float64)
    out = np.zeros(pts.shape[0], dtype=np.float64)
    for s, w in zip(shifts, weights):
        out += w * multiplicity_2d(pts - s, inv_mats, offs)
    return out
