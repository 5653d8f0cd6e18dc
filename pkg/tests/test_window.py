"""Window synthesis: mollifiers, smooth/indicator/tensor/plateau windows
and their certified properties."""

import numpy as np
import pytest

from tflat import (
    Region,
    ResolutionError,
    indicator_window,
    load_window,
    mollifier,
    plateau_window_1d,
    save_window,
    smooth_window,
    tensor_window,
    thicken,
)
from tflat.window import bump_profile, window_to_csv


def conv_oracle_1d(points, lo, hi, eps, n_quad=4000):
    """Independent dense quadrature of (chi_[lo,hi) * phi_eps)(x)."""
    s = (np.arange(n_quad) + 0.5) / n_quad * (2 * eps) - eps
    w = np.exp(-1.0 / (1.0 - (s / eps) ** 2))
    w /= w.sum()
    out = []
    for x in points:
        inside = ((x - s) >= lo) & ((x - s) < hi)
        out.append(np.sum(w[inside]))
    return np.array(out)


class TestMollifier:
    def test_unit_mass_1d(self):
        mol = mollifier(1, 1.0, 1.0 / 256.0)
        assert mol.mass() == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.abs(mol.offsets) < 1.0)

    def test_2d_support_and_peak(self):
        mol = mollifier(2, 0.05, 1.0 / 2048.0)
        assert np.all(np.linalg.norm(mol.offsets, axis=1) < 0.05)
        center = np.argmin(np.linalg.norm(mol.offsets, axis=1))
        assert mol.weights[center] == mol.weights.max()

    def test_first_moment_below_radius(self):
        for eps in (0.1, 0.5):
            mol = mollifier(1, eps, eps / 64)
            assert mol.first_moment() <= eps

    def test_resolution_error(self):
        with pytest.raises(ResolutionError):
            mollifier(1, 0.01, 0.009)


class TestSmoothWindow:
    def test_unit_square_norm_and_support(self):
        g = smooth_window(Region.box([0, 0], [1, 1]), 0.1, 1.0 / 256.0)
        assert g.norm_sq() == pytest.approx(1.0, abs=1e-3)
        assert g.riemann_norm_sq() == pytest.approx(1.0, abs=5e-3)
        bb = g.box
        assert bb[0, 0] >= -0.1 - 3 / 256 and bb[0, 1] <= 1.1 + 3 / 256
        assert g.compact_support_certified()

    def test_too_coarse_grid_rejected(self):
        with pytest.raises(ResolutionError):
            smooth_window(Region.box([0, 0], [1, 1]), 0.001, 1.0 / 256.0)

    def test_1d_profile_against_conv_oracle(self):
        g = smooth_window(Region.box([0], [1]), 0.25, 1.0 / 512.0)
        pts = np.array([-0.25, -0.1, 0.0, 0.1, 0.25, 0.5])
        vals = g.eval(pts)
        ref = np.sqrt(conv_oracle_1d(pts, 0.0, 1.0, 0.25))
        assert vals[0] == 0.0
        assert vals[-1] == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(vals, ref, atol=2e-2)
        # monotone on the rising edge
        rise = g.eval(np.linspace(-0.25, 0.25, 40))
        assert np.all(np.diff(rise) >= -1e-12)

    def test_squeeze_between_indicators(self):
        reg = Region.box([0, 0], [1, 1])
        eps, h = 0.1, 1.0 / 128.0
        g = smooth_window(reg, eps, h)
        axes = g.axes()
        xx, yy = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
        gsq = g.values.ravel() ** 2
        thick = thicken(reg, eps, h=h)
        outside = ~thick.contains(pts)
        assert np.all(gsq[outside] == 0.0)
        # eroded interior: distance > eps from the complement
        d = np.minimum.reduce([pts[:, 0], pts[:, 1],
                               1 - pts[:, 0], 1 - pts[:, 1]])
        eroded = d > eps
        assert np.allclose(gsq[eroded], 1.0, atol=1e-12)

    def test_norm_independent_of_eps(self):
        reg = Region.box([0, 0], [1, 1])
        norms = [smooth_window(reg, e, 1 / 256).norm_sq() for e in (0.05, 0.1)]
        assert abs(norms[0] - norms[1]) <= 1e-4

    def test_gradient_bound_and_h_stability(self):
        reg = Region.box([0], [1])
        eps = 0.1
        g1 = smooth_window(reg, eps, 1.0 / 512.0)
        g2 = smooth_window(reg, eps, 1.0 / 1024.0)
        m1, m2 = g1.max_gradient(), g2.max_gradient()
        assert m1 <= 20.0 / eps
        assert abs(m2 - m1) / m1 < 0.05


class TestIndicatorWindow:
    def test_unit_square(self):
        g = indicator_window(Region.box([0, 0], [1, 1]), 1.0 / 128.0)
        assert g.norm_sq() == pytest.approx(1.0, abs=1e-12)
        assert g.riemann_norm_sq() == pytest.approx(1.0, abs=1e-12)
        assert g.compact_support_certified()

    def test_shear_domain_unit_norm(self):
        reg, _ = __import__("tflat").common_fd_rational(2, 3)
        g = indicator_window(reg, 1.0 / 128.0)
        assert g.norm_sq() == pytest.approx(1.0, abs=1e-12)
        assert g.riemann_norm_sq() == pytest.approx(1.0, abs=2 * 2 * (1 / 128) * 9)

    def test_two_disjoint_squares(self):
        w = Region.box([0, 0], [1, 1])
        reg = Region(2, w.pieces + w.translate((2, 0)).pieces)
        g = indicator_window(reg, 1.0 / 64.0)
        assert g.norm_sq() == pytest.approx(2.0, abs=1e-12)


class TestTensorWindow:
    def test_indicator_tensor(self):
        g1 = indicator_window(Region.box([0], [1]), 1.0 / 64.0)
        g2 = indicator_window(Region.box([0], [1]), 1.0 / 64.0)
        g = tensor_window(g1, g2)
        ref = indicator_window(Region.box([0, 0], [1, 1]), 1.0 / 64.0)
        pts = np.random.default_rng(0).uniform(-0.5, 1.5, size=(200, 2))
        assert np.allclose(g.eval(pts), ref.eval(pts))

    def test_norms_multiply(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            a, b = sorted(rng.uniform(0.2, 1.5, size=2))
            e1 = rng.uniform(0.05, 0.12)
            g1 = smooth_window(Region.box([0], [a]), e1, 1 / 512)
            g2 = smooth_window(Region.box([0], [b]), 0.08, 1 / 512)
            g = tensor_window(g1, g2)
            assert g.norm_sq() == pytest.approx(g1.norm_sq() * g2.norm_sq(),
                                                rel=1e-10)
            assert g.riemann_norm_sq() == pytest.approx(
                g1.riemann_norm_sq() * g2.riemann_norm_sq(), rel=1e-10)

    def test_support_product(self):
        g1 = smooth_window(Region.box([0], [1]), 0.1, 1 / 256)
        g2 = smooth_window(Region.box([2], [3]), 0.1, 1 / 256)
        g = tensor_window(g1, g2)
        assert np.allclose(g.box[0], g1.box[0])
        assert np.allclose(g.box[1], g2.box[0])

    def test_step_mismatch_rejected(self):
        g1 = indicator_window(Region.box([0], [1]), 1 / 64)
        g2 = indicator_window(Region.box([0], [1]), 1 / 128)
        with pytest.raises(ValueError):
            tensor_window(g1, g2)


class TestPlateau:
    def test_plateau_shape(self):
        g = plateau_window_1d((0.0, 0.5), (-0.25, 0.75), 1.0 / 512.0)
        inner = np.linspace(0.0, 0.5, 21)
        assert np.allclose(g.eval(inner), 1.0, atol=1e-12)
        outside = np.array([-0.26, -0.3, 0.76, 1.0])
        assert np.allclose(g.eval(outside), 0.0)

    def test_no_margin_rejected(self):
        with pytest.raises(ResolutionError):
            plateau_window_1d((0.0, 0.5), (0.0, 0.5), 1.0 / 512.0)

    def test_monotone_transition_bands(self):
        g = plateau_window_1d((0.0, 0.5), (-0.25, 0.75), 1.0 / 512.0)
        left = g.eval(np.linspace(-0.25, 0.0, 60))
        right = g.eval(np.linspace(0.5, 0.75, 60))
        assert np.all(np.diff(left) >= -1e-12)
        assert np.all(np.diff(right) <= 1e-12)


class TestIO:
    def test_save_load_round_trip_recipe(self, tmp_path):
        # constructive windows save their recipe and reload with the exact
        # evaluator (values and off-grid evaluations both reproduce)
        g = smooth_window(Region.box([0], [1]), 0.1, 1.0 / 128.0)
        path = tmp_path / "win.json"
        save_window(g, path)
        back = load_window(path)
        assert back.h == g.h
        assert np.allclose(back.values, g.values)
        pts = np.linspace(-0.2, 1.2, 37)
        assert np.allclose(back.eval(pts), g.eval(pts), atol=0)
        assert back.norm_sq() == g.norm_sq()

    def test_save_load_round_trip_sampled(self, tmp_path):
        vals = np.zeros(17)
        vals[6:10] = 0.7
        raw = __import__("tflat").SampledWindow(np.array([[0.0, 2.0]]),
                                                0.125, vals)
        path = tmp_path / "raw.json"
        save_window(raw, path)
        back = load_window(path)
        assert np.allclose(back.values, raw.values)
        assert back.meta.get("interpolated")

    def test_descriptor_load(self, tmp_path):
        import json
        path = tmp_path / "desc.json"
        path.write_text(json.dumps({
            "kind": "indicator", "h": 1.0 / 128.0,
            "region": {"dim": 1, "pieces": [
                {"offset": ["0"], "matrix": [["3/2"]]}]},
        }))
        g = load_window(path)
        assert g.norm_sq() == pytest.approx(1.5, abs=1e-12)

    def test_csv_dump(self, tmp_path):
        g = indicator_window(Region.box([0], [1]), 1.0 / 32.0)
        window_to_csv(g, tmp_path / "w.csv")
        lines = (tmp_path / "w.csv").read_text().splitlines()
        assert lines[0] == "x,value"
        assert len(lines) == len(g.values) + 1

    def test_transport_chain_recipe_round_trip(self, tmp_path):
        # scaled/chirped/dilated/swapped chains keep a serializable recipe
        import numpy as np
        from tflat import apply_chirp, apply_dilation
        from tflat.symplectic import _swap_axes
        base = smooth_window(Region.box([0, 0], [1, "1/2"]), 0.08, 1 / 128)
        g = apply_chirp(apply_dilation(base, np.array([[1.5, 0.3], [0.0, 0.8]])),
                        np.array([[1.0, 0.5], [0.5, -2.0]]))
        g = _swap_axes(g).scaled(0.7)
        path = tmp_path / "chain.json"
        save_window(g, path)
        back = load_window(path)
        pts = np.random.default_rng(5).uniform(-1, 2, size=(50, 2))
        assert np.allclose(back.eval(pts), g.eval(pts), atol=0)
        assert back.norm_sq() == pytest.approx(g.norm_sq(), rel=1e-14)
        assert np.allclose(back.support_box, g.support_box)

    def test_interpolation_fallback(self):
        vals = np.zeros(9)
        vals[4] = 1.0
        g = __import__("tflat").SampledWindow(np.array([[0.0, 1.0]]), 0.125, vals)
        assert g.eval(np.array([0.5]))[0] == pytest.approx(1.0)
        assert g.eval(np.array([0.5 + 0.0625]))[0] == pytest.approx(0.5)
        assert g.eval(np.array([5.0]))[0] == 0.0


def test_profile_is_plugin():
    def triangle(r2):
        r = np.sqrt(np.asarray(r2))
        return np.maximum(0.0, 1.0 - r)

    g = smooth_window(Region.box([0], [1]), 0.1, 1.0 / 256.0, profile=triangle)
    assert g.norm_sq() == pytest.approx(1.0, abs=1e-3)
    assert bump_profile(np.array([1.5]))[0] == 0.0
