"""Lattice arithmetic: generators, density, dual/adjoint lattices,
symplectic predicate, point enumeration.

A generator matrix M (full rank, d x d) represents the lattice M*Z^d.
Matrices carry a float view always and an exact Fraction view when every
entry was given exactly (ints, Fractions, or strings like "1/3" / "1.2").
Conversion between the views is explicit, never silent: floats are never
rationalized unless .rationalize() is called, and exact inputs keep
exactness through dual/adjoint/product operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import config
from ._rational import (
    common_denominator,
    fmat,
    fmat_det,
    fmat_float,
    fmat_inv,
    fmat_mul,
    fmat_transpose,
    hnf_column,
    to_fraction,
)
from .errors import ResourceLimitError, SingularMatrixError

_EXACT_TYPES = (int, Fraction, str)


class GeneratorMatrix:
    """Full-rank d x d generator of the lattice M*Z^d."""

    def __init__(self, entries):
        if isinstance(entries, GeneratorMatrix):
            self.mat = entries.mat.copy()
            self.exact = entries.exact
        else:
            rows = [list(r) for r in entries] if not isinstance(entries, np.ndarray) \
                else [list(r) for r in entries.tolist()]
            all_exact = all(isinstance(x, _EXACT_TYPES) for row in rows for x in row)
            if all_exact:
                self.exact = fmat(rows)
                self.mat = np.array(fmat_float(self.exact), dtype=float)
            else:
                self.exact = None
                self.mat = np.array([[float(x) for x in row] for row in rows],
                                    dtype=float)
        d = self.mat.shape[0]
        if self.mat.shape != (d, d):
            raise ValueError(f"generator matrix must be square, got {self.mat.shape}")
        self.dim = d
        if self.exact is not None:
            if fmat_det(self.exact) == 0:
                raise SingularMatrixError("generator matrix is singular")
            if np.max(np.abs(self.mat - np.array(fmat_float(self.exact)))) > 1e-12:
                raise ValueError("float and exact views disagree beyond 1e-12")
        elif abs(np.linalg.det(self.mat)) < 1e-300:
            raise SingularMatrixError("generator matrix is singular")

    # ------------------------------------------------------------------
    @classmethod
    def identity(cls, d: int) -> "GeneratorMatrix":
        return cls([[int(i == j) for j in range(d)] for i in range(d)])

    @classmethod
    def diagonal(cls, *entries) -> "GeneratorMatrix":
        d = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(d)]
                    for i in range(d)])

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def det(self) -> float:
        if self.exact is not None:
            return float(fmat_det(self.exact))
        return float(np.linalg.det(self.mat))

    def exact_det(self) -> Fraction:
        if self.exact is None:
            raise ValueError("no exact view available")
        return fmat_det(self.exact)

    def inv(self) -> "GeneratorMatrix":
        if self.exact is not None:
            return GeneratorMatrix(fmat_inv(self.exact))
        return GeneratorMatrix(np.linalg.inv(self.mat))

    def transpose(self) -> "GeneratorMatrix":
        if self.exact is not None:
            return GeneratorMatrix(fmat_transpose(self.exact))
        return GeneratorMatrix(self.mat.T)

    def matmul(self, other: "GeneratorMatrix") -> "GeneratorMatrix":
        if self.exact is not None and other.exact is not None:
            return GeneratorMatrix(fmat_mul(self.exact, other.exact))
        return GeneratorMatrix(self.mat @ other.mat)

    def rationalize(self, max_den: int = config.RATIONALIZE_DENOMINATOR_BOUND
                    ) -> "GeneratorMatrix":
        """Explicit float->rational conversion (denominator-bounded)."""
        if self.exact is not None:
            return self
        rows = [[Fraction(x).limit_denominator(max_den) for x in row]
                for row in self.mat.tolist()]
        return GeneratorMatrix(rows)

    # ------------------------------------------------------------------
    def canonical_form(self):
        """Hermite-normal-form canonical representative of the lattice.

        Returns (hnf_rows, approximate_flag): two generators span the same
        lattice iff their canonical forms coincide.  Float-only matrices
        are rationalized first (denominator bound from config) and flagged.
        """
        approx = self.exact is None
        m = self if not approx else self.rationalize()
        den = common_denominator(m.exact)
        ints = [[int(x * den) for x in row] for row in m.exact]
        h = hnf_column(ints)
        canon = tuple(tuple(Fraction(v, den) for v in row) for row in h)
        return canon, approx

    def same_lattice(self, other: "GeneratorMatrix") -> bool:
        c1, a1 = self.canonical_form()
        c2, a2 = other.canonical_form()
        return c1 == c2

    def __repr__(self):
        tag = "exact" if self.is_exact else "float"
        return f"GeneratorMatrix({self.mat.tolist()}, {tag})"


@dataclass(frozen=True)
class SeparableTFLattice:
    """Separable time-frequency lattice A*Z^d x B*Z^d in R^(2d)."""

    A: GeneratorMatrix
    B: GeneratorMatrix

    def __post_init__(self):
        if self.A.dim != self.B.dim:
            raise ValueError("time and frequency blocks must share the dimension")

    @property
    def dim(self) -> int:
        return self.A.dim

    def density(self) -> float:
        return 1.0 / abs(self.A.det() * self.B.det())

    def adjoint(self) -> "SeparableTFLattice":
        return SeparableTFLattice(dual(self.B), dual(self.A))

    def block_matrix(self) -> np.ndarray:
        d = self.dim
        m = np.zeros((2 * d, 2 * d))
        m[:d, :d] = self.A.mat
        m[d:, d:] = self.B.mat
        return m


# ----------------------------------------------------------------------
# operations

def _as_generator(m) -> GeneratorMatrix:
    return m if isinstance(m, GeneratorMatrix) else GeneratorMatrix(m)


def density(obj) -> float:
    """Reciprocal cell volume 1/|det M|; for separable lattices
    1/|det A * det B|."""
    if isinstance(obj, SeparableTFLattice):
        return obj.density()
    m = _as_generator(obj)
    return 1.0 / abs(m.det())


def dual(m) -> GeneratorMatrix:
    """Dual lattice generator M^-T."""
    m = _as_generator(m)
    return m.inv().transpose()


def adjoint_separable(lat: SeparableTFLattice) -> SeparableTFLattice:
    """Adjoint of A*Z^d x B*Z^d, i.e. (B^-T)*Z^d x (A^-T)*Z^d."""
    return lat.adjoint()


def is_symplectic(m, tol: float = 1e-10) -> bool:
    """Whether the even-dimensional matrix preserves the symplectic form
    (checked as M^T J M = J, equivalently the three block conditions)."""
    m = _as_generator(m)
    n = m.dim
    if n % 2:
        raise ValueError("symplectic matrices have even dimension")
    d = n // 2
    if m.exact is not None:
        e = m.exact
        j = tuple(
            tuple(
                Fraction(1) if c == r + d else (Fraction(-1) if c == r - d else Fraction(0))
                for c in range(n))
            for r in range(n))
        lhs = fmat_mul(fmat_mul(fmat_transpose(e), j), e)
        return lhs == j
    j = np.zeros((n, n))
    j[:d, d:] = np.eye(d)
    j[d:, :d] = -np.eye(d)
    return bool(np.max(np.abs(m.mat.T @ j @ m.mat - j)) <= tol)


def symplectic_block_residuals(m) -> dict:
    """Residuals of the three block conditions for a matrix partitioned as
    [[A, C], [D, B]]: A^T D symmetric, C^T B symmetric, A^T B - D^T C = I."""
    m = _as_generator(m).mat
    d = m.shape[0] // 2
    a, c = m[:d, :d], m[:d, d:]
    dd, b = m[d:, :d], m[d:, d:]
    return {
        "ad_symmetry": float(np.max(np.abs(a.T @ dd - dd.T @ a))),
        "cb_symmetry": float(np.max(np.abs(c.T @ b - b.T @ c))),
        "unit_block": float(np.max(np.abs(a.T @ b - dd.T @ c - np.eye(d)))),
    }


def enumerate_points(m, box, cap: int | None = None) -> np.ndarray:
    """All lattice points M*k inside the closed axis-aligned box.

    box: (d, 2) array of [lo, hi] per axis.  Raises ResourceLimitError if
    the integer search region exceeds the cap.
    """
    m = _as_generator(m)
    box = np.asarray(box, dtype=float)
    d = m.dim
    if box.shape != (d, 2):
        raise ValueError(f"box must be ({d}, 2)")
    cap = cap if cap is not None else config.POINT_ENUMERATION_CAP
    inv = np.linalg.inv(m.mat)
    corners = np.array(np.meshgrid(*[box[i] for i in range(d)],
                                   indexing="ij")).reshape(d, -1).T
    k_img = corners @ inv.T
    lo = np.floor(k_img.min(axis=0)).astype(int) - 1
    hi = np.ceil(k_img.max(axis=0)).astype(int) + 1
    total = np.prod((hi - lo + 1).astype(float))
    if total > cap:
        raise ResourceLimitError(
            f"enumeration region has {total:.3g} candidates (cap {cap})")
    grids = np.meshgrid(*[np.arange(lo[i], hi[i] + 1) for i in range(d)],
                        indexing="ij")
    ks = np.stack([g.ravel() for g in grids], axis=1)
    pts = ks @ m.mat.T
    inside = np.all((pts >= box[:, 0] - 1e-12) & (pts <= box[:, 1] + 1e-12), axis=1)
    return pts[inside]


# ----------------------------------------------------------------------
# text parsing (external interface)

def parse_matrix(text: str) -> GeneratorMatrix:
    """Parse a row-major matrix like "[[1/3,2],[0,3]]"; entries may be
    decimals or fractions p/q.  Exactness is preserved (decimal strings
    parse to exact rationals)."""
    s = "".join(text.split())
    if not (s.startswith("[[") and s.endswith("]]")):
        raise ValueError(f"matrix must look like [[a,b],[c,d]]: {text!r}")
    body = s[2:-2]
    rows = [r for r in body.split("],[")]
    entries = [[to_fraction(x) for x in row.split(",")] for row in rows]
    return GeneratorMatrix(entries)


def parse_lattice(text: str) -> SeparableTFLattice:
    """Parse a separable lattice: either "a,b" (d=1: A=(a), B=(b)),
    "a,b,c,d" (d=2: A=diag(a,b), B=diag(c,d)), or two matrices joined by
    " x " like "[[..]] x [[..]]"."""
    s = text.strip()
    if " x " in s:
        left, right = s.split(" x ", 1)
        return SeparableTFLattice(parse_matrix(left), parse_matrix(right))
    parts = [to_fraction(p) for p in s.split(",")]
    if len(parts) == 2:
        return SeparableTFLattice(GeneratorMatrix([[parts[0]]]),
                                  GeneratorMatrix([[parts[1]]]))
    if len(parts) == 4:
        return SeparableTFLattice(GeneratorMatrix.diagonal(parts[0], parts[1]),
                                  GeneratorMatrix.diagonal(parts[2], parts[3]))
    raise ValueError(f"cannot parse separable lattice from {text!r}")
