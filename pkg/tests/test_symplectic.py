"""Metaplectic transports and the constructive pipelines."""

import numpy as np
import pytest

from tflat import (
    GeneratorMatrix,
    NotReducibleError,
    Region,
    SeparableTFLattice,
    UnclassifiedLatticeError,
    apply_chirp,
    apply_dilation,
    apply_fourier,
    block_triangular_reduce,
    diag_pipeline,
    execute_pipeline,
    frame_bounds,
    indicator_window,
    separable_reduce,
    smooth_window,
    tight_residual,
)
from tflat.symplectic import MetaplecticOp, PipelineDescriptor, match_product_form

I2 = GeneratorMatrix.identity(2)


class TestDilation:
    def test_identity_is_noop(self):
        g = indicator_window(Region.box([0, 0], [1, 1]), 1 / 64)
        assert apply_dilation(g, np.eye(2)) is g

    def test_doubling_indicator(self):
        g = indicator_window(Region.box([0, 0], [1, 1]), 1 / 64)
        out = apply_dilation(g, np.diag([2.0, 2.0]))
        pts = np.array([[0.5, 0.5], [1.5, 1.9], [2.5, 0.5], [-0.1, 0.2]])
        assert np.allclose(out.eval(pts), [0.5, 0.5, 0.0, 0.0], atol=1e-12)
        assert out.norm_sq() == pytest.approx(g.norm_sq(), rel=1e-12)

    def test_random_shear_preserves_norm(self):
        g = smooth_window(Region.box([0, 0], [1, 1]), 0.1, 1 / 128)
        out = apply_dilation(g, np.array([[2.0, 1.0], [0.0, 1.0]]))
        assert out.norm_sq() == pytest.approx(g.norm_sq(), rel=1e-12)
        assert out.riemann_norm_sq() == pytest.approx(g.riemann_norm_sq(),
                                                      rel=1e-3)


class TestChirp:
    def test_zero_chirp_identity(self):
        g = indicator_window(Region.box([0], [1]), 1 / 64)
        out = apply_chirp(g, np.array([[0.0]]))
        assert np.allclose(out.values, g.values)

    def test_modulus_preserved(self):
        g = smooth_window(Region.box([0, 0], [1, 1]), 0.1, 1 / 128)
        out = apply_chirp(g, np.array([[1.0, 2.0], [2.0, -3.0]]))
        assert np.allclose(np.abs(out.values), np.abs(g.values), atol=1e-14)
        assert np.allclose(out.box, g.box)

    def test_1d_phase_value(self):
        g = indicator_window(Region.box([0], [1]), 1 / 64)
        out = apply_chirp(g, np.array([[1.0]]))
        val = out.eval(np.array([0.5]))[0]
        assert val == pytest.approx(np.exp(1j * np.pi / 4), abs=1e-12)

    def test_asymmetric_rejected(self):
        g = indicator_window(Region.box([0, 0], [1, 1]), 1 / 64)
        with pytest.raises(ValueError):
            apply_chirp(g, np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_op_validation(self):
        with pytest.raises(ValueError):
            MetaplecticOp("chirp", np.array([[0.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(ValueError):
            MetaplecticOp("warp", np.eye(2))


class TestFourier:
    def test_unitary_at_grid_resolution(self):
        g = smooth_window(Region.box([0], [1]), 0.1, 1 / 256)
        out = apply_fourier(g)
        assert out.riemann_norm_sq() == pytest.approx(g.riemann_norm_sq(),
                                                      rel=1e-6)
        assert out.meta.get("compact_support") is False


class TestBlockTriangular:
    def test_zero_d_is_trivial(self):
        sep, op = block_triangular_reduce(I2, np.zeros((2, 2)), I2)
        assert np.allclose(op.matrix, 0)

    def test_symmetric_da_inv(self):
        d = np.array([[1.0, 2.0], [2.0, 0.0]])
        sep, op = block_triangular_reduce(I2, d, I2)
        assert np.allclose(op.matrix, -d)
        assert np.allclose(sep.A.mat, np.eye(2))

    def test_asymmetric_rejected(self):
        with pytest.raises(NotReducibleError):
            block_triangular_reduce(I2, np.array([[0.0, 1.0], [2.0, 0.0]]), I2)

    def test_chirp_transfers_tight_system(self, tight_case2_system):
        # chirping the window of (g, A x B) by D A^-1 gives the window of
        # the block-triangular lattice; undoing it reproduces the bounds
        res = tight_case2_system
        g, lat = res.window, res.lattice
        d_block = np.array([[0.5, 0.0], [0.0, 2.0]]) @ lat.A.mat
        sep, op = block_triangular_reduce(lat.A, d_block, lat.B)
        g_bt = apply_chirp(g, -op.matrix)
        g_back = op.apply(g_bt)
        r1 = tight_residual(g, lat, n_samples=6)
        r2 = tight_residual(g_back, lat, n_samples=6)
        assert abs(r1 - r2) <= 1e-10


class TestFormMatching:
    def test_form1(self):
        form, m, n, alpha = match_product_form(0.5 * np.eye(2))
        assert (form, m, n) == (1, 1, 1)
        assert alpha == pytest.approx(0.5)

    def test_form2_spec_example(self):
        form, m, n, alpha = match_product_form(np.diag([0.4, 0.9]))
        assert (form, m, n) == (2, 2, 3)
        assert alpha == pytest.approx(0.1)
        assert abs(alpha) < 1 / (m * n)

    def test_form3(self):
        alpha = 0.2
        s = np.array([[alpha, 3 * 2 * alpha], [0.0, 4 * alpha]])
        form, m, n, a = match_product_form(s)
        assert (form, m, n) == (3, 3, 2)
        assert a == pytest.approx(alpha)

    def test_form4(self):
        alpha = 0.2
        s = np.array([[4 * alpha, 0.0], [3 * 2 * alpha, alpha]])
        form, m, n, a = match_product_form(s)
        assert (form, m, n) == (4, 3, 2)

    def test_sqrt2_unclassified(self):
        s = 0.5 * np.diag([np.sqrt(2.0), 1.0 / np.sqrt(2.0)])
        with pytest.raises(UnclassifiedLatticeError):
            match_product_form(s)

    def test_alpha_bound_enforced(self):
        with pytest.raises(UnclassifiedLatticeError):
            match_product_form(np.diag([4 * 0.3, 9 * 0.3]))  # |alpha| >= 1/6


class TestDiagPipeline:
    def test_case_selection(self):
        assert diag_pipeline(0.9, 0.9, 0.9, 0.9).params["case"] == 1
        d2 = diag_pipeline(1.2, 0.3, 1.0, 1.0)
        assert d2.params["case"] == 2
        assert d2.params["eps"] == pytest.approx(7.0 / 120.0, abs=1e-15)
        assert diag_pipeline(1.2, 0.6, 1.2, 0.6).params["case"] == 3

    def test_density_precondition(self):
        with pytest.raises(UnclassifiedLatticeError):
            diag_pipeline(2.0, 2.0, 1.0, 1.0)

    def test_case1_executes_to_frame(self):
        desc = diag_pipeline(0.9, 0.9, 0.9, 0.9, grid_h=1 / 256)
        assert desc.cert == "frame"
        res = execute_pipeline(desc)
        rep = frame_bounds(res.window, res.lattice, n_samples=6)
        assert rep.a_est > 0.05
        assert rep.b_est < 20.0
        assert res.window.compact_support_certified()

    def test_case2_swapped_axes(self):
        # bd > 1 forces the swapped construction
        desc = diag_pipeline(0.3, 1.2, 1.0, 1.0, grid_h=1 / 256)
        assert desc.params["case"] == 2 and desc.params["swap"]
        res = execute_pipeline(desc)
        assert tight_residual(res.window, res.lattice, n_samples=6) <= 5e-3

    def test_case3_executes_tight(self):
        desc = diag_pipeline(1.2, 0.6, 1.2, 0.6, grid_h=1 / 256)
        res = execute_pipeline(desc)
        assert tight_residual(res.window, res.lattice, n_samples=6) <= 5e-3

    def test_descriptor_json_round_trip(self):
        desc = diag_pipeline(1.2, 0.3, 1.0, 1.0)
        back = PipelineDescriptor.from_json(desc.to_json())
        assert back.kind == desc.kind and back.params == desc.params


class TestSeparableReduce:
    def test_form2_pipeline_tight(self):
        desc = separable_reduce(GeneratorMatrix.diagonal(0.4, 0.9), I2,
                                grid_h=1 / 256)
        assert desc.params["form"] == 2
        res = execute_pipeline(desc)
        assert res.eps > 0
        assert tight_residual(res.window, res.lattice, n_samples=6) <= 5e-3

    def test_form1_pipeline(self):
        desc = separable_reduce(GeneratorMatrix.diagonal(0.5, 0.5), I2,
                                grid_h=1 / 256)
        assert desc.params["form"] == 1
        res = execute_pipeline(desc)
        assert tight_residual(res.window, res.lattice, n_samples=6) <= 5e-3

    def test_triangular_forms_pipeline_tight(self):
        # upper (form 3) and lower (form 4) triangular products both route
        # through the corresponding common-domain variants
        for s in (np.array([[0.2, 1.2], [0.0, 0.8]]),
                  np.array([[0.8, 0.0], [1.2, 0.2]])):
            desc = separable_reduce(GeneratorMatrix(s), I2, grid_h=1 / 256)
            assert desc.params["form"] in (3, 4)
            res = execute_pipeline(desc)
            assert tight_residual(res.window, res.lattice, n_samples=6) <= 5e-3

    def test_needs_d2(self):
        with pytest.raises(ValueError):
            separable_reduce(GeneratorMatrix([[0.5]]), GeneratorMatrix([[1]]))


class TestMetaplecticInvariance:
    def test_dilation_transport(self, tight_case2_system):
        res = tight_case2_system
        g, lat = res.window, res.lattice
        base = frame_bounds(g, lat, n_samples=6)
        b0 = np.array([[1.3, 0.4], [0.0, 0.8]])
        g2 = apply_dilation(g, b0)
        lat2 = SeparableTFLattice(GeneratorMatrix(b0 @ lat.A.mat),
                                  GeneratorMatrix(np.linalg.inv(b0).T @ lat.B.mat))
        rep = frame_bounds(g2, lat2, n_samples=6)
        assert rep.a_est == pytest.approx(base.a_est, abs=1e-2)
        assert rep.b_est == pytest.approx(base.b_est, abs=1e-2)

    def test_lattice_preserving_chirp(self, tight_case2_system):
        res = tight_case2_system
        g, lat = res.window, res.lattice
        base = frame_bounds(g, lat, n_samples=6)
        c = np.diag([1.0 / 1.2, 2.0 / 0.3])  # B k A^-1 with integer k
        g2 = apply_chirp(g, c)
        rep = frame_bounds(g2, lat, n_samples=6)
        assert rep.a_est == pytest.approx(base.a_est, abs=1e-2)
        assert rep.b_est == pytest.approx(base.b_est, abs=1e-2)
