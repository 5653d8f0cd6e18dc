"""Window synthesis on uniform grids.

Windows are sampled on a node grid (step h, first node at box[:,0]) but
carry their construction recipe, so they can be evaluated at arbitrary
points through the same quadrature that built them.  That keeps the
frame-analysis code free of interpolation error on every certifying path:
an indicator window evaluates by exact membership, a mollified window by
the exact stencil sum, tensor/dilated/chirped windows by chaining.

The mollifier is the standard exponential bump, normalized discretely so
its stencil mass is exactly 1 (the profile is a plug-in point; any
nonnegative smooth bump supported in the unit ball works).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ResolutionError, TflatError
from .region import Region, region_from_json

__all__ = [
    "Mollifier", "SampledWindow", "mollifier", "smooth_window",
    "indicator_window", "tensor_window", "plateau_window_1d",
    "save_window", "load_window", "window_from_recipe", "window_to_csv",
]


def bump_profile(r2):
    """exp(-1/(1-r^2)) on r^2 < 1, 0 outside (unnormalized)."""
    r2 = np.asarray(r2, dtype=float)
    out = np.zeros_like(r2)
    inside = r2 < 1.0 - 1e-12
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


@dataclass
class Mollifier:
    """Discrete mollifier: stencil offsets within the open eps-ball and
    quadrature weights summing to exactly 1."""

    dim: int
    eps: float
    h: float
    offsets: np.ndarray   # (k, d)
    weights: np.ndarray   # (k,)
    profile: str = "exp_bump"

    def mass(self) -> float:
        return float(self.weights.sum())

    def first_moment(self) -> float:
        return float(np.sum(self.weights * np.linalg.norm(self.offsets, axis=1)))

    def peak(self) -> float:
        return float(self.weights.max() / self.h ** self.dim)


def mollifier(dim: int, eps: float, h: float, profile=bump_profile) -> Mollifier:
    if eps <= 2 * h:
        raise ResolutionError(f"mollifier radius {eps:g} needs eps > 2h (h={h:g})")
    r = int(math.ceil(eps / h))
    axes = [np.arange(-r, r + 1) * h] * dim
    mesh = np.meshgrid(*axes, indexing="ij")
    offs = np.stack([g.ravel() for g in mesh], axis=1)
    r2 = np.sum(offs ** 2, axis=1) / eps ** 2
    vals = profile(r2)
    keep = vals > 0.0
    offs, vals = offs[keep], vals[keep]
    w = vals * h ** dim
    w /= w.sum()
    return Mollifier(dim, float(eps), float(h), offs, w)


class SampledWindow:
    """Compactly supported function sampled on a uniform node grid."""

    def __init__(self, box, h, values, meta=None, eval_fn=None,
                 exact_norm_sq=None, support_box=None, recipe=None):
        self.box = np.asarray(box, dtype=float)
        self.h = float(h)
        self.values = np.asarray(values)
        self.dim = self.box.shape[0]
        self.meta = dict(meta or {})
        self._eval_fn = eval_fn
        self._exact_norm_sq = exact_norm_sq
        # serializable construction recipe; windows that carry one
        # round-trip through save/load with their exact evaluator
        self.recipe = recipe
        # tight support box when the recipe knows it (half-open semantics);
        # the padded grid box is the conservative default
        self.support_box = self.box if support_box is None \
            else np.asarray(support_box, dtype=float)
        if self.values.ndim != self.dim:
            raise ValueError("values rank must equal dim")

    # ------------------------------------------------------------------
    def axes(self):
        return [self.box[i, 0] + self.h * np.arange(self.values.shape[i])
                for i in range(self.dim)]

    def riemann_norm_sq(self) -> float:
        """||g||^2 by the plain grid Riemann sum."""
        return float(np.sum(np.abs(self.values) ** 2) * self.h ** self.dim)

    def norm_sq(self) -> float:
        """||g||^2: the exact recipe integral when the construction admits
        one (mollified windows integrate their indicator combination
        exactly; transports preserve or scale it), grid Riemann otherwise.
        """
        if self._exact_norm_sq is not None:
            return self._exact_norm_sq
        return self.riemann_norm_sq()

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def compact_support_certified(self) -> bool:
        v = self.values
        for ax in range(self.dim):
            first = np.take(v, 0, axis=ax)
            last = np.take(v, -1, axis=ax)
            if np.any(first != 0) or np.any(last != 0):
                return False
        return True

    def support_span(self) -> np.ndarray:
        return self.support_box[:, 1] - self.support_box[:, 0]

    # ------------------------------------------------------------------
    def eval(self, pts):
        """Window values at arbitrary points (recipe evaluator when the
        window has one, multilinear interpolation otherwise; exact zero
        outside the declared box)."""
        pts = np.asarray(pts, dtype=float)
        if self.dim == 1 and pts.ndim == 2:
            pts = pts[:, 0]
        if self._eval_fn is not None:
            return self._eval_fn(pts)
        return self._interpolate(pts)

    def _interpolate(self, pts):
        pts2 = np.atleast_2d(pts if self.dim > 1 else np.asarray(pts)[..., None])
        rel = (pts2 - self.box[:, 0]) / self.h
        n = np.array(self.values.shape)
        i0 = np.floor(rel).astype(int)
        frac = rel - i0
        out = np.zeros(pts2.shape[0], dtype=self.values.dtype)
        for corner in range(2 ** self.dim):
            bits = [(corner >> k) & 1 for k in range(self.dim)]
            idx = i0 + np.array(bits)
            w = np.ones(pts2.shape[0])
            for k in range(self.dim):
                w = w * (frac[:, k] if bits[k] else 1.0 - frac[:, k])
            ok = np.all((idx >= 0) & (idx < n), axis=1)
            if ok.any():
                vals = self.values[tuple(idx[ok].T)] if self.dim > 1 \
                    else self.values[idx[ok, 0]]
                out[ok] += w[ok] * vals
        return out if np.asarray(pts).ndim else out[0]

    # ------------------------------------------------------------------
    def scaled(self, s) -> "SampledWindow":
        base_eval = self._eval_fn
        fn = (lambda pts: s * base_eval(pts)) if base_eval is not None else None
        meta = dict(self.meta, scaled_by=abs(s))
        exact = None if self._exact_norm_sq is None \
            else abs(s) ** 2 * self._exact_norm_sq
        recipe = None
        if self.recipe is not None and not isinstance(s, complex):
            recipe = {"kind": "scaled", "s": float(s), "base": self.recipe}
        return SampledWindow(self.box, self.h, s * self.values, meta, fn,
                             exact, self.support_box, recipe)

    def normalized(self) -> "SampledWindow":
        n = math.sqrt(self.norm_sq())
        if n == 0:
            raise TflatError("cannot normalize the zero window")
        return self.scaled(1.0 / n)

    def max_gradient(self) -> float:
        grads = np.gradient(self.values.real, self.h)
        if self.dim == 1:
            grads = [grads]
        return float(np.max(np.sqrt(sum(g ** 2 for g in grads))))


def _snapped_box(lo, hi, h, margin_cells=2):
    lo = np.floor(np.asarray(lo, dtype=float) / h).astype(int) - margin_cells
    hi = np.ceil(np.asarray(hi, dtype=float) / h).astype(int) + margin_cells
    return lo * h, (hi - lo)


def _node_points(box_lo, counts, h):
    axes = [box_lo[i] + h * np.arange(counts[i] + 1) for i in range(len(counts))]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1), \
        tuple(c + 1 for c in counts)


# ----------------------------------------------------------------------
# constructors

def indicator_window(region: Region, h: float) -> SampledWindow:
    """Sample chi_Omega on a node grid covering the region."""
    bb = region.bounding_box()
    lo, counts = _snapped_box(bb[:, 0], bb[:, 1], h)
    pts, shape = _node_points(lo, counts, h)
    vals = np.minimum(region.multiplicity(pts), 1).astype(float).reshape(shape)
    box = np.stack([lo, lo + h * (np.array(shape) - 1)], axis=1)

    def eval_fn(p):
        p2 = np.atleast_2d(np.asarray(p, dtype=float) if region.dim > 1
                           else np.asarray(p, dtype=float)[..., None])
        return np.minimum(region.multiplicity(p2), 1).astype(float)

    meta = {"recipe": "indicator", "h": h}
    recipe = None
    if region.pieces and region.grid is None:
        recipe = {"kind": "indicator", "h": h, "region": region.to_jsonable()}
    return SampledWindow(box, h, vals, meta, eval_fn,
                         exact_norm_sq=float(region.measure()),
                         support_box=bb, recipe=recipe)


def _mollified_field(region: Region, mol: Mollifier, pts):
    """(chi_Omega * phi_eps)(pts) via the stencil quadrature."""
    if region.pieces and region.grid is None and region.dim <= 2:
        invs, offs = region._kernel_args()
        if region.dim == 1:
            w = kernels.shift_multiplicity_sum_1d(
                pts[:, 0] if pts.ndim == 2 else pts,
                mol.offsets[:, 0], mol.weights, invs[:, 0, 0], offs[:, 0])
        else:
            w = kernels.shift_multiplicity_sum_2d(
                pts, mol.offsets, mol.weights, invs, offs)
        return w
    acc = np.zeros(pts.shape[0])
    for s, wt in zip(mol.offsets, mol.weights):
        acc += wt * region.multiplicity(pts - s)
    return acc


def smooth_window(region: Region, eps: float, h: float,
                  profile=bump_profile) -> SampledWindow:
    """g = sqrt(chi_Omega * phi_eps), sampled over the eps-fattened box.

    g equals 1 on the eps-eroded interior, 0 outside Omega_eps, and
    ||g||^2 approximates the region measure to quadrature accuracy.
    """
    mol = mollifier(region.dim, eps, h, profile)
    bb = region.bounding_box()
    lo, counts = _snapped_box(bb[:, 0] - eps, bb[:, 1] + eps, h)
    pts, shape = _node_points(lo, counts, h)
    w = _mollified_field(region, mol, pts)
    vals = np.sqrt(np.clip(w, 0.0, None)).reshape(shape)
    box = np.stack([lo, lo + h * (np.array(shape) - 1)], axis=1)

    def eval_fn(p):
        p2 = np.atleast_2d(np.asarray(p, dtype=float) if region.dim > 1
                           else np.asarray(p, dtype=float)[..., None])
        if region.dim == 1:
            p2 = p2.reshape(-1, 1)
        f = _mollified_field(region, mol, p2 if region.dim > 1 else p2)
        return np.sqrt(np.clip(f, 0.0, None))

    meta = {"recipe": "smooth_window", "eps": eps, "h": h,
            "region_measure": float(region.measure()),
            "mollifier_mass": mol.mass()}
    # g^2 is exactly sum_s w_s chi_{Omega+s}, so its integral is exactly
    # m(Omega) * sum_s w_s
    exact = float(region.measure()) * mol.mass()
    support = np.stack([bb[:, 0] - eps, bb[:, 1] + eps], axis=1)
    recipe = None
    if profile is bump_profile and region.grid is None:
        recipe = {"kind": "smooth", "eps": eps, "h": h,
                  "region": region.to_jsonable()}
    return SampledWindow(box, h, vals, meta, eval_fn, exact_norm_sq=exact,
                         support_box=support, recipe=recipe)


def tensor_window(g1: SampledWindow, g2: SampledWindow) -> SampledWindow:
    """(g1 (x) g2)(x, y) = g1(x) g2(y) for two 1-d windows."""
    if g1.dim != 1 or g2.dim != 1:
        raise ValueError("tensor_window expects two 1-d windows")
    if abs(g1.h - g2.h) > 1e-12 * max(g1.h, g2.h):
        raise ValueError("incompatible grid steps")
    vals = np.multiply.outer(g1.values, g2.values)
    box = np.array([[g1.box[0, 0], g1.box[0, 1]],
                    [g2.box[0, 0], g2.box[0, 1]]])

    def eval_fn(p):
        p2 = np.atleast_2d(np.asarray(p, dtype=float))
        return g1.eval(p2[:, 0]) * g2.eval(p2[:, 1])

    meta = {"recipe": "tensor", "h": g1.h}
    exact = None
    if g1._exact_norm_sq is not None and g2._exact_norm_sq is not None:
        exact = g1._exact_norm_sq * g2._exact_norm_sq
    support = np.array([[g1.support_box[0, 0], g1.support_box[0, 1]],
                        [g2.support_box[0, 0], g2.support_box[0, 1]]])
    recipe = None
    if g1.recipe is not None and g2.recipe is not None:
        recipe = {"kind": "tensor", "f1": g1.recipe, "f2": g2.recipe}
    return SampledWindow(box, g1.h, vals, meta, eval_fn, exact_norm_sq=exact,
                         support_box=support, recipe=recipe)


def plateau_window_1d(inner, outer, h: float) -> SampledWindow:
    """Smooth 1-d window with chi_inner <= g <= chi_outer: the square root
    of the mollified indicator of the midpoint enlargement of inner."""
    a0, a1 = float(inner[0]), float(inner[1])
    b0, b1 = float(outer[0]), float(outer[1])
    if not (b0 <= a0 < a1 <= b1):
        raise ValueError("need inner contained in outer")
    dl, dr = a0 - b0, b1 - a1
    if min(dl, dr) <= 0:
        raise ResolutionError("plateau window needs positive margins")
    eps = min(dl, dr) / 2.0
    if eps <= 2 * h:
        raise ResolutionError(
            f"plateau margin {min(dl, dr):g} too thin for grid step {h:g}")
    enlarged = Region.box([a0 - dl / 2.0], [a1 + dr / 2.0])
    g = smooth_window(enlarged, eps, h)
    g.meta.update(recipe="plateau", inner=[a0, a1], outer=[b0, b1], eps=eps)
    return g


# ----------------------------------------------------------------------
# dumps / loads (external interfaces)

def window_to_csv(win: SampledWindow, path):
    import csv as _csv
    axes = win.axes()
    with open(path, "w", newline="") as f:
        w = _csv.writer(f)
        if win.dim == 1:
            w.writerow(["x", "value"])
            for i, x in enumerate(axes[0]):
                w.writerow([f"{x:.12g}", repr(complex(win.values[i]))
                            if win.is_complex else f"{win.values[i]:.12g}"])
        else:
            w.writerow(["x", "y", "value"])
            for i, x in enumerate(axes[0]):
                for j, y in enumerate(axes[1]):
                    v = win.values[i, j]
                    w.writerow([f"{x:.12g}", f"{y:.12g}",
                                repr(complex(v)) if win.is_complex else f"{v:.12g}"])


def save_window(win: SampledWindow, path):
    """Write a window to `path`: its construction recipe when it carries a
    serializable one (loads back with the exact evaluator), otherwise a
    sampled sidecar with raw row-major values next to it."""
    if win.recipe is not None:
        with open(path, "w") as f:
            json.dump({"kind": "recipe", "recipe": win.recipe},
                      f, indent=2, sort_keys=True)
            f.write("\n")
        return
    data_path = str(path) + ".f64"
    arr = np.ascontiguousarray(win.values)
    arr.tofile(data_path)
    sidecar = {
        "kind": "sampled",
        "dim": win.dim,
        "box": win.box.tolist(),
        "h": win.h,
        "shape": list(win.values.shape),
        "dtype": str(arr.dtype),
        "data": data_path,
        "meta": {k: v for k, v in win.meta.items()
                 if isinstance(v, (int, float, str, list))},
    }
    with open(path, "w") as f:
        json.dump(sidecar, f, indent=2, sort_keys=True)
        f.write("\n")


def window_from_recipe(recipe) -> SampledWindow:
    """Rebuild a window from its serialized construction recipe."""
    kind = recipe["kind"]
    if kind == "indicator":
        return indicator_window(region_from_json(recipe["region"]), recipe["h"])
    if kind == "smooth":
        return smooth_window(region_from_json(recipe["region"]),
                             recipe["eps"], recipe["h"])
    if kind == "tensor":
        return tensor_window(window_from_recipe(recipe["f1"]),
                             window_from_recipe(recipe["f2"]))
    if kind == "scaled":
        return window_from_recipe(recipe["base"]).scaled(recipe["s"])
    if kind in ("dilated", "chirped", "swapped"):
        from .symplectic import apply_chirp, apply_dilation, _swap_axes
        base = window_from_recipe(recipe["base"])
        if kind == "dilated":
            return apply_dilation(base, np.array(recipe["matrix"]))
        if kind == "chirped":
            return apply_chirp(base, np.array(recipe["matrix"]))
        return _swap_axes(base)
    raise ValueError(f"unknown window recipe kind {kind!r}")


def load_window(path) -> SampledWindow:
    """Load a window: either a sampled sidecar (interpolating evaluator,
    flagged in meta) or a constructive descriptor
    {"kind": "indicator"|"smooth", "region": {...}, "h": ..., ["eps": ...]}.
    """
    with open(path) as f:
        obj = json.load(f)
    kind = obj.get("kind")
    if kind == "recipe":
        return window_from_recipe(obj["recipe"])
    if kind == "indicator":
        return indicator_window(region_from_json(obj["region"]), obj["h"])
    if kind == "smooth":
        return smooth_window(region_from_json(obj["region"]), obj["eps"], obj["h"])
    if kind == "sampled":
        vals = np.fromfile(obj["data"], dtype=np.dtype(obj["dtype"]))
        vals = vals.reshape(obj["shape"])
        meta = dict(obj.get("meta", {}), recipe="sampled_file", interpolated=True)
        return SampledWindow(np.array(obj["box"]), obj["h"], vals, meta)
    raise ValueError(f"unknown window kind {kind!r}")
