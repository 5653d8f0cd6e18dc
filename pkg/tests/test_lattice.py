"""Lattice arithmetic: determinants, density, dual/adjoint, symplectic
predicate, point enumeration, canonical forms."""

from fractions import Fraction

import numpy as np
import pytest

from conftest import brute_force_lattice_points, fraction_inverse, sorted_points
from tflat import (
    GeneratorMatrix,
    SeparableTFLattice,
    SingularMatrixError,
    adjoint_separable,
    density,
    dual,
    enumerate_points,
    is_symplectic,
    parse_lattice,
    parse_matrix,
)
from tflat.errors import ResourceLimitError
from tflat.lattice import symplectic_block_residuals


def rand_rational_matrix(rng, d=2, den=6):
    while True:
        num = rng.integers(-8, 9, size=(d, d))
        dens = rng.integers(1, den, size=(d, d))
        rows = [[Fraction(int(num[i, j]), int(dens[i, j])) for j in range(d)]
                for i in range(d)]
        m = np.array([[float(x) for x in row] for row in rows])
        if abs(np.linalg.det(m)) > 1e-3:
            return GeneratorMatrix(rows)


class TestDensity:
    def test_identity(self):
        assert density(GeneratorMatrix.identity(2)) == 1.0

    def test_separable_half(self):
        lat = SeparableTFLattice(GeneratorMatrix.diagonal("1/2", 1),
                                 GeneratorMatrix.identity(2))
        assert lat.density() == pytest.approx(2.0, abs=1e-15)

    def test_rational_cross_check(self):
        # 1/(1.2*0.3) checked against the exact rational value 25/9
        lat = SeparableTFLattice(GeneratorMatrix.diagonal("1.2", "0.3"),
                                 GeneratorMatrix.identity(2))
        exact = Fraction(1) / (Fraction("1.2") * Fraction("0.3"))
        assert exact == Fraction(25, 9)
        assert lat.density() == pytest.approx(float(exact), rel=1e-14)

    def test_singular_rejected(self):
        with pytest.raises(SingularMatrixError):
            GeneratorMatrix([[1, 2], [2, 4]])


class TestDual:
    def test_identity(self):
        assert np.allclose(dual(GeneratorMatrix.identity(2)).mat, np.eye(2))

    def test_diagonal(self):
        d = dual(GeneratorMatrix.diagonal(2, "1/2"))
        assert np.allclose(d.mat, np.diag([0.5, 2.0]))

    def test_shear_against_fraction_oracle(self):
        rows = [[Fraction(1, 3), 2], [0, 3]]
        expected = fraction_inverse(list(zip(*rows)))  # (M^T)^-1
        d = dual(GeneratorMatrix(rows))
        assert d.exact == tuple(tuple(r) for r in expected)

    def test_double_dual_same_lattice(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            m = rand_rational_matrix(rng)
            assert dual(dual(m)).same_lattice(m)

    def test_density_inversion(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            m = rand_rational_matrix(rng)
            assert density(dual(m)) == pytest.approx(1.0 / density(m), rel=1e-9)


class TestAdjoint:
    def test_identity(self):
        lat = SeparableTFLattice(GeneratorMatrix.identity(2),
                                 GeneratorMatrix.identity(2))
        adj = adjoint_separable(lat)
        assert np.allclose(adj.A.mat, np.eye(2))
        assert np.allclose(adj.B.mat, np.eye(2))

    def test_diagonal(self):
        lat = SeparableTFLattice(GeneratorMatrix.diagonal("1/2", "1/2"),
                                 GeneratorMatrix.identity(2))
        adj = adjoint_separable(lat)
        assert np.allclose(adj.A.mat, np.eye(2))
        assert np.allclose(adj.B.mat, np.diag([2.0, 2.0]))

    def test_shear(self):
        lat = SeparableTFLattice(GeneratorMatrix([[1, 0], [1, 1]]),
                                 GeneratorMatrix.identity(2))
        adj = adjoint_separable(lat)
        assert np.allclose(adj.A.mat, np.eye(2))
        assert adj.B.exact == ((Fraction(1), Fraction(-1)),
                               (Fraction(0), Fraction(1)))

    def test_involution_on_point_sets(self):
        rng = np.random.default_rng(5)
        box = np.array([[-2.5, 2.5], [-2.5, 2.5]])
        for _ in range(8):
            lat = SeparableTFLattice(rand_rational_matrix(rng),
                                     rand_rational_matrix(rng))
            back = adjoint_separable(adjoint_separable(lat))
            for m1, m2 in ((lat.A, back.A), (lat.B, back.B)):
                p1 = sorted_points(enumerate_points(m1, box))
                p2 = sorted_points(enumerate_points(m2, box))
                assert np.allclose(p1, p2, atol=1e-9)

    def test_adjoint_density_inversion(self):
        lat = SeparableTFLattice(GeneratorMatrix.diagonal("1/2", 1),
                                 GeneratorMatrix.identity(2))
        assert adjoint_separable(lat).density() == pytest.approx(
            1.0 / lat.density(), rel=1e-12)


class TestSymplectic:
    def test_identity(self):
        assert is_symplectic(GeneratorMatrix.identity(4))

    def test_diag_cd(self):
        # diag(c, d, 1/c, 1/d) with c=2, d=3
        m = GeneratorMatrix.diagonal(2, 3, "1/2", "1/3")
        assert is_symplectic(m)

    def test_volume_violation(self):
        assert not is_symplectic(GeneratorMatrix.diagonal(2, 1, 1, 1))

    def test_generators(self):
        j = GeneratorMatrix([[0, 0, 1, 0], [0, 0, 0, 1],
                             [-1, 0, 0, 0], [0, -1, 0, 0]])
        assert is_symplectic(j)
        chirp = np.eye(4)
        chirp[2:, :2] = np.array([[1.0, 2.0], [2.0, -1.0]])
        assert is_symplectic(GeneratorMatrix(chirp))

    def test_det_one_property(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            c1, c2 = rng.uniform(0.5, 2.0, size=2)
            m = np.diag([c1, c2, 1 / c1, 1 / c2])
            assert is_symplectic(GeneratorMatrix(m))
            assert abs(abs(np.linalg.det(m)) - 1) < 1e-10

    def test_block_residuals_zero_for_symplectic(self):
        res = symplectic_block_residuals(GeneratorMatrix.identity(4))
        assert all(v <= 1e-15 for v in res.values())

    def test_odd_dimension_rejected(self):
        with pytest.raises(ValueError):
            is_symplectic(GeneratorMatrix.identity(3))


class TestEnumerate:
    def test_unit_lattice(self):
        pts = enumerate_points(GeneratorMatrix.identity(2),
                               [[-1.5, 1.5], [-1.5, 1.5]])
        assert len(pts) == 9

    def test_sparse_lattice(self):
        pts = enumerate_points(GeneratorMatrix.diagonal(2, 2),
                               [[-1, 1], [-1, 1]])
        assert len(pts) == 1
        assert np.allclose(pts[0], 0)

    def test_shear_against_brute_force(self):
        m = GeneratorMatrix([["1/3", 2], [0, 3]])
        box = [[0, 3 - 1e-9], [0, 3 - 1e-9]]
        pts = sorted_points(enumerate_points(m, box))
        ref = sorted_points(brute_force_lattice_points(m.mat, box))
        assert pts.shape == ref.shape
        assert np.allclose(pts, ref, atol=1e-9)

    def test_random_against_brute_force(self):
        rng = np.random.default_rng(7)
        box = [[-2, 2], [-2, 2]]
        for _ in range(20):
            m = rand_rational_matrix(rng)
            pts = sorted_points(enumerate_points(m, box))
            ref = sorted_points(brute_force_lattice_points(m.mat, box, 40))
            assert pts.shape == ref.shape
            assert np.allclose(pts, ref, atol=1e-9)

    def test_cap(self):
        with pytest.raises(ResourceLimitError):
            enumerate_points(GeneratorMatrix.diagonal("1/1000", "1/1000"),
                             [[-100, 100], [-100, 100]], cap=10**6)


class TestCanonical:
    def test_same_lattice_under_unimodular(self):
        m = GeneratorMatrix([["1/3", 2], [0, 3]])
        # column operation: add first column to second
        m2 = GeneratorMatrix([["1/3", Fraction(7, 3)], [0, 3]])
        assert m.same_lattice(m2)

    def test_different_lattices(self):
        assert not GeneratorMatrix.identity(2).same_lattice(
            GeneratorMatrix.diagonal(2, 1))

    def test_float_lattice_flagged_approximate(self):
        m = GeneratorMatrix(np.diag([0.5, 2.0]))
        canon, approx = m.canonical_form()
        assert approx
        exact, flag = GeneratorMatrix.diagonal("1/2", 2).canonical_form()
        assert not flag
        assert canon == exact

    def test_shear_absorbed(self):
        # [[1/3, 2], [0, 3]] spans the same lattice as diag(1/3, 3)
        assert GeneratorMatrix([["1/3", 2], [0, 3]]).same_lattice(
            GeneratorMatrix.diagonal("1/3", 3))

    def test_unimodular_invariance_random(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            m = rand_rational_matrix(rng)
            # random unimodular: product of elementary shears and swaps
            u = np.eye(2, dtype=int)
            for _ in range(4):
                shear = np.eye(2, dtype=int)
                i = int(rng.integers(0, 2))
                shear[i, 1 - i] = rng.integers(-3, 4)
                u = u @ shear
            assert abs(round(np.linalg.det(u))) == 1
            rows = [[sum(m.exact[i][k] * int(u[k][j]) for k in range(2))
                     for j in range(2)] for i in range(2)]
            assert m.same_lattice(GeneratorMatrix(rows))
            assert not m.same_lattice(
                GeneratorMatrix([[m.exact[0][0] * 2, m.exact[0][1]],
                                 [m.exact[1][0] * 2, m.exact[1][1]]]))


class TestParsing:
    def test_matrix_fractions(self):
        m = parse_matrix("[[1/3,2],[0,3]]")
        assert m.exact == ((Fraction(1, 3), Fraction(2)),
                           (Fraction(0), Fraction(3)))

    def test_matrix_decimals_exact(self):
        m = parse_matrix("[[1.2,0],[0,0.3]]")
        assert m.exact[0][0] == Fraction(6, 5)

    def test_separable_1d(self):
        lat = parse_lattice("0.5,1")
        assert lat.dim == 1
        assert lat.density() == pytest.approx(2.0)

    def test_separable_2d(self):
        lat = parse_lattice("1.2,0.3,1,1")
        assert np.allclose(lat.A.mat, np.diag([1.2, 0.3]))

    def test_whitespace_tolerated(self):
        m = parse_matrix("[[1, 0], [0, 1]]")
        assert np.allclose(m.mat, np.eye(2))

    def test_reject_garbage(self):
        with pytest.raises(ValueError):
            parse_matrix("not a matrix")
