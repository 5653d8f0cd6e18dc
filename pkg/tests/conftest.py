"""Shared fixtures and small independent oracles."""

import numpy as np
import pytest

from tflat import (
    GeneratorMatrix,
    Region,
    SampledWindow,
    SeparableTFLattice,
    diag_pipeline,
    execute_pipeline,
    indicator_window,
)


def lat_1d(a, b) -> SeparableTFLattice:
    return SeparableTFLattice(GeneratorMatrix([[a]]), GeneratorMatrix([[b]]))


def cone_window(h=1.0 / 128.0) -> SampledWindow:
    """Continuous pyramid profile supported exactly on [0,1)^2, vanishing
    on the boundary (the negative-control window of the frame tests)."""
    n = round(1.0 / h)

    def profile(p):
        p2 = np.atleast_2d(np.asarray(p, dtype=float))
        return np.maximum(0.0, 1.0 - 2.0 * np.maximum(np.abs(p2[:, 0] - 0.5),
                                                      np.abs(p2[:, 1] - 0.5)))

    lo = -2 * h
    counts = n + 4
    ax = lo + h * np.arange(counts + 1)
    xx, yy = np.meshgrid(ax, ax, indexing="ij")
    vals = profile(np.stack([xx.ravel(), yy.ravel()], axis=1)).reshape(xx.shape)
    box = np.array([[lo, lo + counts * h]] * 2)
    return SampledWindow(box, h, vals, {"recipe": "cone"}, profile)


def two_piece_region(shift) -> Region:
    """W union (W + shift) with W = [0,1/2) x [0,1)."""
    w = Region.box([0, 0], ["1/2", 1])
    return Region(2, w.pieces + w.translate(shift).pieces)


@pytest.fixture(scope="session")
def tight_case2_system():
    """The smooth tight system of the (1.2, 0.3, 1, 1) diagonal pipeline
    at h = 1/256 (shared by several acceptance criteria)."""
    desc = diag_pipeline(1.2, 0.3, 1.0, 1.0, grid_h=1.0 / 256.0)
    result = execute_pipeline(desc)
    return result


@pytest.fixture(scope="session")
def onb_system():
    """(chi_[0,1)^2, Z^4): the orthonormal-basis baseline."""
    g = indicator_window(Region.box([0, 0], [1, 1]), 1.0 / 128.0)
    lat = SeparableTFLattice(GeneratorMatrix.identity(2),
                             GeneratorMatrix.identity(2))
    return g, lat


# ----------------------------------------------------------------------
# independent oracles (used by tests only)

def fraction_inverse(rows):
    """Plain Gauss-Jordan inverse over Fractions, independent of the
    package's rational helpers."""
    from fractions import Fraction
    n = len(rows)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(rows)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def brute_force_lattice_points(mat, box, k_range=20):
    """Enumerate M k over the full integer sweep |k_i| <= k_range and keep
    points inside the closed box."""
    mat = np.asarray(mat, dtype=float)
    d = mat.shape[0]
    ks = np.array(np.meshgrid(*[np.arange(-k_range, k_range + 1)] * d,
                              indexing="ij")).reshape(d, -1).T
    pts = ks @ mat.T
    box = np.asarray(box, dtype=float)
    keep = np.all((pts >= box[:, 0] - 1e-12) & (pts <= box[:, 1] + 1e-12), axis=1)
    return pts[keep]


def sorted_points(pts):
    return np.array(sorted(map(tuple, np.round(np.asarray(pts), 9)))).reshape(
        -1, np.asarray(pts).shape[1] if len(pts) else 1)
