"""Symplectic lattice transforms, metaplectic window transports, and the
end-to-end construction pipelines for the rational lattice classes.

Transport conventions (all unitary, all preserving compact support):

* dilation   apply_dilation(g, B)(x) = |det B|^(-1/2) g(B^-1 x)
* chirp      apply_chirp(g, C)(x)    = exp(i pi <x, Cx>) g(x), C symmetric

Pipelines return a serializable descriptor first; executing it produces
the window and its lattice, which the frame module then certifies (tight
residual for the tight constructions, frame bounds for the plateau-tensor
route).  Unclassified means the method does not apply, not a disproof.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import config
from .errors import NotReducibleError, UnclassifiedLatticeError
from .lattice import GeneratorMatrix, SeparableTFLattice
from .region import Region, common_fd_rational, scaled_common_domain
from .window import SampledWindow, plateau_window_1d, smooth_window, tensor_window


@dataclass
class MetaplecticOp:
    """One metaplectic generator: dilation(B), chirp(C) or fourier."""

    kind: str
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("dilation", "chirp", "fourier"):
            raise ValueError(f"unknown metaplectic kind {self.kind!r}")
        if self.matrix is not None:
            self.matrix = np.asarray(self.matrix, dtype=float)
        if self.kind == "chirp":
            if np.max(np.abs(self.matrix - self.matrix.T)) > 1e-12:
                raise ValueError("chirp matrix must be symmetric")
        if self.kind == "dilation":
            if abs(np.linalg.det(self.matrix)) < 1e-300:
                raise ValueError("dilation matrix must be invertible")

    def apply(self, g: SampledWindow) -> SampledWindow:
        if self.kind == "dilation":
            return apply_dilation(g, self.matrix)
        if self.kind == "chirp":
            return apply_chirp(g, self.matrix)
        return apply_fourier(g)

    def to_jsonable(self):
        return {"kind": self.kind,
                "matrix": None if self.matrix is None else self.matrix.tolist()}


def apply_dilation(g: SampledWindow, b) -> SampledWindow:
    """Unitary dilation |det B|^(-1/2) g(B^-1 x); support box becomes the
    bounding box of B * (old box)."""
    b = b.mat if isinstance(b, GeneratorMatrix) else np.asarray(b, dtype=float)
    d = g.dim
    det = abs(np.linalg.det(b))
    if det < 1e-300:
        raise ValueError("dilation matrix must be invertible")
    if np.max(np.abs(b - np.eye(d))) < 1e-15:
        return g
    inv = np.linalg.inv(b)
    scale = det ** (-0.5)
    corners = np.array(np.meshgrid(*[g.box[i] for i in range(d)],
                                   indexing="ij")).reshape(d, -1).T
    img = corners @ b.T
    h_new = g.h * det ** (1.0 / d)
    lo = np.floor(img.min(axis=0) / h_new).astype(int) - 2
    hi = np.ceil(img.max(axis=0) / h_new).astype(int) + 2
    counts = hi - lo
    axes = [(lo[i] + np.arange(counts[i] + 1)) * h_new for i in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    vals = scale * g.eval(pts @ inv.T)
    shape = tuple(c + 1 for c in counts)
    box = np.stack([lo * h_new, (lo + counts) * h_new], axis=1)

    def eval_fn(p):
        p2 = np.atleast_2d(np.asarray(p, dtype=float))
        if d == 1 and p2.shape[0] == 1 and p2.shape[1] > 1:
            p2 = p2.T
        return scale * g.eval(p2 @ inv.T)

    meta = dict(g.meta, recipe="dilated", dilation=b.tolist())
    sc = np.array(np.meshgrid(*[g.support_box[i] for i in range(d)],
                              indexing="ij")).reshape(d, -1).T @ b.T
    support = np.stack([sc.min(axis=0), sc.max(axis=0)], axis=1)
    recipe = None if g.recipe is None else \
        {"kind": "dilated", "matrix": b.tolist(), "base": g.recipe}
    return SampledWindow(box, h_new, np.asarray(vals).reshape(shape), meta,
                         eval_fn, exact_norm_sq=g._exact_norm_sq,
                         support_box=support, recipe=recipe)


def apply_chirp(g: SampledWindow, c) -> SampledWindow:
    """Pointwise multiplication by exp(i pi <x, Cx>); modulus and support
    are unchanged."""
    c = c.mat if isinstance(c, GeneratorMatrix) else np.asarray(c, dtype=float)
    if c.shape == ():
        c = c.reshape(1, 1)
    if np.max(np.abs(c - c.T)) > 1e-12:
        raise ValueError("chirp matrix must be symmetric")
    d = g.dim
    axes = g.axes()
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    quad = np.einsum("ni,ij,nj->n", pts, c, pts)
    vals = g.values.ravel() * np.exp(1j * np.pi * quad)

    def eval_fn(p):
        p2 = np.atleast_2d(np.asarray(p, dtype=float) if d > 1
                           else np.asarray(p, dtype=float)[..., None])
        q = np.einsum("ni,ij,nj->n", p2, c, p2)
        return g.eval(p) * np.exp(1j * np.pi * q)

    meta = dict(g.meta, recipe="chirped", chirp=c.tolist())
    recipe = None if g.recipe is None else \
        {"kind": "chirped", "matrix": c.tolist(), "base": g.recipe}
    return SampledWindow(g.box, g.h, vals.reshape(g.values.shape), meta,
                         eval_fn, exact_norm_sq=g._exact_norm_sq,
                         support_box=g.support_box, recipe=recipe)


def apply_fourier(g: SampledWindow) -> SampledWindow:
    """Discrete Fourier transform at grid resolution.  Provided for
    completeness as the third metaplectic generator; it does not preserve
    compact support and is excluded from the smooth-window pipelines."""
    d = g.dim
    n = np.array(g.values.shape)
    vals = np.fft.fftshift(np.fft.fftn(g.values)) * g.h ** d
    freqs = [np.fft.fftshift(np.fft.fftfreq(n[i], d=g.h)) for i in range(d)]
    # phase correction for the box origin
    mesh = np.meshgrid(*freqs, indexing="ij")
    phase = np.ones(vals.shape, dtype=complex)
    for i in range(d):
        phase = phase * np.exp(-2j * np.pi * mesh[i] * g.box[i, 0])
    vals = vals * phase
    box = np.array([[f[0], f[-1]] for f in freqs])
    h_new = float(freqs[0][1] - freqs[0][0])
    meta = dict(g.meta, recipe="fourier", compact_support=False)
    return SampledWindow(box, h_new, vals, meta)


# ----------------------------------------------------------------------
# block-triangular reduction

def block_triangular_reduce(a, dd, b):
    """Reduce the lattice (A 0; D B) Z^(2d) to the separable A x B when
    D A^-1 is symmetric.  Returns (separable lattice, chirp op with
    C = -D A^-1): chirping a window of the block-triangular system by C
    gives the separable-system window, and conversely with -C."""
    a = a if isinstance(a, GeneratorMatrix) else GeneratorMatrix(a)
    b = b if isinstance(b, GeneratorMatrix) else GeneratorMatrix(b)
    dd = np.asarray(dd.mat if isinstance(dd, GeneratorMatrix) else dd, dtype=float)
    da_inv = dd @ np.linalg.inv(a.mat)
    if np.max(np.abs(da_inv - da_inv.T)) > 1e-10:
        raise NotReducibleError("D A^-1 is not symmetric")
    sym = 0.5 * (da_inv + da_inv.T)
    return SeparableTFLattice(a, b), MetaplecticOp("chirp", -sym)


# ----------------------------------------------------------------------
# form matching for B^T A

def _rational_of(x: float):
    fr = Fraction(x).limit_denominator(config.RATIONALITY_MAX_DENOMINATOR)
    if abs(float(fr) - x) <= config.RATIONALITY_RESIDUAL_TOL * max(1.0, abs(x)):
        return fr
    return None


def match_product_form(s: np.ndarray):
    """Match B^T A against the four admissible 2x2 forms.

    Returns (form, m, n, alpha) or raises UnclassifiedLatticeError.
    """
    s = np.asarray(s, dtype=float)
    scale = float(np.max(np.abs(s)))
    tol = 1e-9 * max(1.0, scale)
    s11, s12, s21, s22 = s[0, 0], s[0, 1], s[1, 0], s[1, 1]
    diag = abs(s12) <= tol and abs(s21) <= tol
    if diag and abs(s11 - s22) <= tol:
        alpha = 0.5 * (s11 + s22)
        if abs(alpha) < 1.0:
            return 1, 1, 1, alpha
        raise UnclassifiedLatticeError(f"form 1 needs |alpha| < 1, got {alpha}")
    if diag and s11 * s22 > 0:
        r = math.sqrt(abs(s11 / s22))
        fr = _rational_of(r)
        if fr is not None and fr > 0:
            m, n = fr.numerator, fr.denominator
            alpha = s22 / n ** 2
            if abs(s11 - m * m * alpha) <= tol and abs(alpha) < 1.0 / (m * n):
                return 2, m, n, alpha
        raise UnclassifiedLatticeError(
            "diagonal B^T A with irrational ratio or |alpha| >= 1/(mn)")
    if abs(s21) <= tol and abs(s12) > tol:
        if s11 != 0 and s22 / s11 > 0:
            fr = _rational_of(math.sqrt(s22 / s11))
            if fr is not None and fr.denominator == 1:
                n = fr.numerator
                alpha = s11
                m_f = s12 / (n * alpha)
                m_r = _rational_of(m_f)
                if m_r is not None and m_r.denominator == 1 and \
                        math.gcd(abs(m_r.numerator), n) == 1 and \
                        abs(alpha) < 1.0 / n:
                    return 3, m_r.numerator, n, alpha
        raise UnclassifiedLatticeError("upper-triangular B^T A does not match")
    if abs(s12) <= tol and abs(s21) > tol:
        if s22 != 0 and s11 / s22 > 0:
            fr = _rational_of(math.sqrt(s11 / s22))
            if fr is not None and fr.denominator == 1:
                n = fr.numerator
                alpha = s22
                m_f = s21 / (n * alpha)
                m_r = _rational_of(m_f)
                if m_r is not None and m_r.denominator == 1 and \
                        math.gcd(abs(m_r.numerator), n) == 1 and \
                        abs(alpha) < 1.0 / n:
                    return 4, m_r.numerator, n, alpha
        raise UnclassifiedLatticeError("lower-triangular B^T A does not match")
    raise UnclassifiedLatticeError("B^T A matches none of the four forms")


# ----------------------------------------------------------------------
# pipeline descriptors

@dataclass
class PipelineDescriptor:
    kind: str                      # diag_case1 | diag_case2 | separable
    cert: str                      # tight | frame
    a_matrix: list
    b_matrix: list
    params: dict = field(default_factory=dict)
    grid_h: float = 1.0 / 256.0

    def to_json(self) -> str:
        return json.dumps({
            "kind": self.kind, "cert": self.cert,
            "a_matrix": self.a_matrix, "b_matrix": self.b_matrix,
            "params": self.params, "grid_h": self.grid_h,
        }, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "PipelineDescriptor":
        obj = json.loads(text)
        return cls(kind=obj["kind"], cert=obj["cert"],
                   a_matrix=obj["a_matrix"], b_matrix=obj["b_matrix"],
                   params=obj["params"], grid_h=obj["grid_h"])


@dataclass
class PipelineResult:
    window: SampledWindow
    lattice: SeparableTFLattice
    descriptor: PipelineDescriptor
    region: Region | None = None
    eps: float | None = None


def separable_reduce(a, b, grid_h: float = 1.0 / 256.0) -> PipelineDescriptor:
    """Classify the d=2 separable lattice A Z^2 x B Z^2 via the form of
    B^T A and prepare the common-domain construction transported by the
    dilation block diag(B^-T, B)."""
    a = a if isinstance(a, GeneratorMatrix) else GeneratorMatrix(a)
    b = b if isinstance(b, GeneratorMatrix) else GeneratorMatrix(b)
    if a.dim != 2:
        raise ValueError("separable_reduce handles d=2 only")
    s = b.mat.T @ a.mat
    form, m, n, alpha = match_product_form(s)
    det_s = abs(np.linalg.det(s))
    if det_s >= 1.0:
        raise UnclassifiedLatticeError("|det B^T A| must be < 1")
    return PipelineDescriptor(
        kind="separable", cert="tight",
        a_matrix=a.mat.tolist(), b_matrix=b.mat.tolist(),
        params={"form": form, "m": m, "n": n, "alpha": alpha,
                "s_matrix": s.tolist(), "det_s": det_s},
        grid_h=grid_h)


def diag_pipeline(a: float, b: float, c: float, d: float,
                  grid_h: float = 1.0 / 256.0) -> PipelineDescriptor:
    """Constructive window pipeline for aZ x bZ x cZ x dZ: the first
    applicable of (1) ac<1 and bd<1 (tensor of plateau windows),
    (2) abcd<1/2 (sheared domain with margin (1-2abcd)/(4ac)),
    (3) sqrt(ac/bd) rational (reduction to the common-domain route)."""
    if min(a, b, c, d) <= 0:
        raise ValueError("lattice parameters must be positive")
    if a * b * c * d >= 1.0:
        raise UnclassifiedLatticeError("density < 1; no frame pipeline applies")
    amat = [[a, 0.0], [0.0, b]]
    bmat = [[c, 0.0], [0.0, d]]
    if a * c < 1.0 and b * d < 1.0:
        return PipelineDescriptor(
            kind="diag_case1", cert="frame", a_matrix=amat, b_matrix=bmat,
            params={"case": 1, "a": a, "b": b, "c": c, "d": d},
            grid_h=grid_h)
    if 2.0 * a * b * c * d < 1.0:
        swap = b * d > a * c
        aa, bb, cc, dd = (b, a, d, c) if swap else (a, b, c, d)
        eps = (1.0 - 2.0 * a * b * c * d) / (4.0 * aa * cc)
        return PipelineDescriptor(
            kind="diag_case2", cert="tight", a_matrix=amat, b_matrix=bmat,
            params={"case": 2, "a": a, "b": b, "c": c, "d": d,
                    "swap": swap, "eps": eps},
            grid_h=grid_h)
    ratio = (a * c) / (b * d)
    fr = _rational_of(math.sqrt(ratio))
    if fr is not None:
        desc = separable_reduce(GeneratorMatrix.diagonal(a, b),
                                GeneratorMatrix.diagonal(c, d), grid_h)
        desc.params["case"] = 3
        return desc
    raise UnclassifiedLatticeError(
        "no diagonal case applies (sqrt(ac/bd) not detectably rational)")


# ----------------------------------------------------------------------
# execution

def _swap_axes(g: SampledWindow) -> SampledWindow:
    box = g.box[::-1].copy()
    vals = g.values.T.copy()

    def eval_fn(p):
        p2 = np.atleast_2d(np.asarray(p, dtype=float))
        return g.eval(p2[:, ::-1])

    recipe = None if g.recipe is None else {"kind": "swapped", "base": g.recipe}
    return SampledWindow(box, g.h, vals, dict(g.meta, swapped=True), eval_fn,
                         exact_norm_sq=g._exact_norm_sq,
                         support_box=g.support_box[::-1].copy(),
                         recipe=recipe)


def _execute_case1(desc: PipelineDescriptor) -> PipelineResult:
    p = desc.params
    a, b, c, d = p["a"], p["b"], p["c"], p["d"]
    h = desc.grid_h
    g1 = plateau_window_1d((0.0, a), (((a * c) - 1) / (2 * c), ((a * c) + 1) / (2 * c)), h)
    g2 = plateau_window_1d((0.0, b), (((b * d) - 1) / (2 * d), ((b * d) + 1) / (2 * d)), h)
    g = tensor_window(g1, g2)
    lattice = SeparableTFLattice(GeneratorMatrix(desc.a_matrix),
                                 GeneratorMatrix(desc.b_matrix))
    return PipelineResult(g, lattice, desc)


def _execute_case2(desc: PipelineDescriptor) -> PipelineResult:
    p = desc.params
    a, b, c, d = p["a"], p["b"], p["c"], p["d"]
    if p["swap"]:
        a, b, c, d = b, a, d, c
    ac, bd = a * c, b * d
    eps = p["eps"]
    h = desc.grid_h
    omega = Region.from_pieces([((0.0, 0.0), [[ac, 0.0], [0.5, bd]])])
    g_prime = smooth_window(omega, eps, h)
    if p["swap"]:
        g_prime = _swap_axes(g_prime)
    # transport by diag(c, d, 1/c, 1/d): x -> |cd|^(1/2) g'(c x1, d x2),
    # i.e. apply_dilation with B = diag(1/c, 1/d) in the original axes
    c0, d0 = p["c"], p["d"]
    g = apply_dilation(g_prime, np.diag([1.0 / c0, 1.0 / d0]))
    lattice = SeparableTFLattice(GeneratorMatrix(desc.a_matrix),
                                 GeneratorMatrix(desc.b_matrix))
    return PipelineResult(g, lattice, desc, region=omega, eps=eps)


def _execute_separable(desc: PipelineDescriptor) -> PipelineResult:
    p = desc.params
    form, m, n = p["form"], abs(p["m"]), p["n"]
    s = np.array(p["s_matrix"])
    h = desc.grid_h
    if form == 1:
        omega_prime = Region.box([0, 0], [1, 1])
    else:
        variant = "lower" if form == 4 else "upper"
        omega_prime, _ = common_fd_rational(max(m, 1), n, variant)
    s_gen = GeneratorMatrix(s)
    omega, eps = scaled_common_domain(s_gen, GeneratorMatrix.identity(2),
                                      omega_prime, h=max(h, 1.0 / 512.0))
    g_prime = smooth_window(omega, eps, h)
    b_mat = np.array(desc.b_matrix)
    g = apply_dilation(g_prime, np.linalg.inv(b_mat).T)
    lattice = SeparableTFLattice(GeneratorMatrix(desc.a_matrix),
                                 GeneratorMatrix(desc.b_matrix))
    return PipelineResult(g, lattice, desc, region=omega, eps=eps)


def execute_pipeline(desc: PipelineDescriptor) -> PipelineResult:
    if desc.kind == "diag_case1":
        return _execute_case1(desc)
    if desc.kind == "diag_case2":
        return _execute_case2(desc)
    if desc.kind == "separable":
        return _execute_separable(desc)
    raise ValueError(f"unknown pipeline kind {desc.kind!r}")
