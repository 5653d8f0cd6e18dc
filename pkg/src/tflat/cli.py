"""Command-line driver.

One command produces one JSON report (inputs echoed, every tolerance and
grid parameter embedded).  Exit codes: 0 certification success, 2
certified failure (e.g. not a tiling, residual above tolerance), 1
unexpected error, 64 usage error, 70 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import (
    DegenerateMarginError,
    NotReducibleError,
    PreconditionError,
    ResourceLimitError,
    TflatError,
    UnclassifiedLatticeError,
)
from .frame import frame_bounds, orthonormality_residual, parseval_residual
from .kernels import BACKEND
from .lattice import (
    density,
    dual,
    is_symplectic,
    parse_lattice,
    parse_matrix,
    symplectic_block_residuals,
)
from .region import (
    common_fd_rational,
    cover_classify,
    fourier_tiling_check,
    load_region,
    save_region,
    scaled_common_domain,
)
from .symplectic import (
    block_triangular_reduce,
    diag_pipeline,
    execute_pipeline,
    separable_reduce,
)
from .window import (
    indicator_window,
    load_window,
    plateau_window_1d,
    save_window,
    smooth_window,
    tensor_window,
    window_to_csv,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CERTIFIED_FAIL = 2
EXIT_USAGE = 64
EXIT_RESOURCE = 70


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _write_report(path, payload):
    payload = dict(payload)
    payload["tflat_version"] = __version__
    payload["kernel_backend"] = BACKEND
    text = json.dumps(payload, indent=2, sort_keys=True, default=float)
    if path:
        with open(path, "w") as f:
            f.write(text + "\n")
    print(text)


# ----------------------------------------------------------------------

def _cmd_lattice(args):
    report = {"command": "lattice", "input": args.lattice}
    if args.lattice.strip().startswith("[["):
        m = parse_matrix(args.lattice)
        report["matrix"] = m.mat.tolist()
        report["density"] = density(m)
        report["dual"] = dual(m).mat.tolist()
        if m.dim % 2 == 0:
            report["is_symplectic"] = is_symplectic(m)
            report["symplectic_residuals"] = symplectic_block_residuals(m)
    else:
        lat = parse_lattice(args.lattice)
        adj = lat.adjoint()
        report.update({
            "A": lat.A.mat.tolist(), "B": lat.B.mat.tolist(),
            "density": lat.density(),
            "dual_A": dual(lat.A).mat.tolist(),
            "dual_B": dual(lat.B).mat.tolist(),
            "adjoint_A": adj.A.mat.tolist(), "adjoint_B": adj.B.mat.tolist(),
        })
    _write_report(args.out, report)
    return EXIT_OK


def _cmd_cover(args):
    region = load_region(args.region)
    m = parse_matrix(args.lattice)
    rep = cover_classify(region, m, h=args.h, tol=args.tol, mode=args.mode)
    payload = {
        "command": "cover", "region": args.region,
        "lattice": m.mat.tolist(), "report": rep.to_jsonable(),
        "tol": args.tol,
    }
    if args.fourier:
        payload["fourier_residual"] = fourier_tiling_check(region, m, args.fourier)
        payload["fourier_radius"] = args.fourier
    _write_report(args.out, payload)
    if args.expect == "any":
        return EXIT_OK
    return EXIT_OK if rep.verdict == args.expect else EXIT_CERTIFIED_FAIL


def _cmd_build_domain(args):
    if args.domain_kind == "common":
        region, lattices = common_fd_rational(args.m, args.n, args.variant)
        reports = []
        ok = True
        for lat in lattices:
            rep = cover_classify(region, lat, mode="exact")
            reports.append({"lattice": lat.mat.tolist(),
                            "report": rep.to_jsonable()})
            ok = ok and rep.verdict == "tiling"
        fres = max(fourier_tiling_check(region, lat, args.fourier)
                   for lat in lattices)
        if args.region_out:
            save_region(region, args.region_out)
        _write_report(args.out, {
            "command": "build-domain common", "m": args.m, "n": args.n,
            "variant": args.variant, "region": region.to_jsonable(),
            "covers": reports, "fourier_residual": fres,
            "fourier_radius": args.fourier,
        })
        return EXIT_OK if ok and fres <= 1e-10 else EXIT_CERTIFIED_FAIL
    # scaled
    omega_prime = load_region(args.domain)
    a = parse_matrix(args.a_matrix)
    b = parse_matrix(args.b_matrix)
    center = None
    if args.center:
        center = [float(x) for x in args.center.split(",")]
    omega, eps = scaled_common_domain(a, b, omega_prime, center=center, h=args.h)
    if args.region_out:
        save_region(omega, args.region_out)
    _write_report(args.out, {
        "command": "build-domain scaled", "a": a.mat.tolist(),
        "b": b.mat.tolist(), "eps": eps, "h": args.h,
        "region": omega.to_jsonable(),
    })
    return EXIT_OK


def _cmd_build_window(args):
    if args.window_kind == "smooth":
        win = smooth_window(load_region(args.region), args.eps, args.h)
    elif args.window_kind == "indicator":
        win = indicator_window(load_region(args.region), args.h)
    elif args.window_kind == "plateau":
        inner = [float(x) for x in args.inner.split(",")]
        outer = [float(x) for x in args.outer.split(",")]
        win = plateau_window_1d(inner, outer, args.h)
    else:  # tensor
        win = tensor_window(load_window(args.w1), load_window(args.w2))
    save_window(win, args.window_out)
    if args.csv_out:
        window_to_csv(win, args.csv_out)
    _write_report(args.out, {
        "command": f"build-window {args.window_kind}",
        "window": args.window_out, "h": win.h,
        "norm_sq": win.norm_sq(),
        "box": win.box.tolist(),
        "compact_support_certified": win.compact_support_certified(),
    })
    return EXIT_OK


def _cmd_frame(args):
    win = load_window(args.window)
    lat = parse_lattice(args.lattice)
    payload = {"command": f"frame {args.frame_op}", "window": args.window,
               "lattice": args.lattice, "grid_h": win.h, "tol": args.tol}
    code = EXIT_OK
    if args.frame_op == "bounds":
        rep = frame_bounds(win, lat, n_samples=args.samples)
        payload["report"] = rep.to_jsonable()
        if args.samples_csv:
            rep.samples_to_csv(args.samples_csv)
    elif args.frame_op == "tight":
        rep = frame_bounds(win, lat, n_samples=args.samples)
        payload["report"] = rep.to_jsonable()
        code = EXIT_OK if rep.tight_residual <= args.tol else EXIT_CERTIFIED_FAIL
    elif args.frame_op == "ortho":
        win = win.normalized() if args.normalize else win
        res, details = orthonormality_residual(win, lat, radius=args.radius,
                                               return_details=True)
        payload.update({"residual": res, "details": details})
        code = EXIT_OK if res <= args.tol else EXIT_CERTIFIED_FAIL
    else:  # parseval
        f = load_window(args.signal)
        res, details = parseval_residual(f, win, lat,
                                         truncation=args.truncation,
                                         return_details=True)
        payload.update({"residual": res, "details": details})
        code = EXIT_OK if res <= args.tol else EXIT_CERTIFIED_FAIL
    _write_report(args.out, payload)
    return code


def _cmd_pipeline(args):
    if args.pipe_kind == "diag":
        desc = diag_pipeline(args.a, args.b, args.c, args.d, grid_h=args.h)
    elif args.pipe_kind == "separable":
        desc = separable_reduce(parse_matrix(args.a_matrix),
                                parse_matrix(args.b_matrix), grid_h=args.h)
    else:  # block-tri
        sep, op = block_triangular_reduce(parse_matrix(args.a_matrix),
                                          parse_matrix(args.d_matrix),
                                          parse_matrix(args.b_matrix))
        _write_report(args.out, {
            "command": "pipeline block-tri",
            "separable_A": sep.A.mat.tolist(), "separable_B": sep.B.mat.tolist(),
            "chirp": op.to_jsonable(),
        })
        return EXIT_OK
    result = execute_pipeline(desc)
    payload = {
        "command": f"pipeline {args.pipe_kind}",
        "descriptor": json.loads(desc.to_json()),
        "window_norm_sq": result.window.norm_sq(),
        "eps": result.eps,
        "compact_support_certified": result.window.compact_support_certified(),
    }
    if args.window_out:
        save_window(result.window, args.window_out)
        payload["window"] = args.window_out
    code = EXIT_OK
    if args.certify:
        rep = frame_bounds(result.window, result.lattice, n_samples=args.samples)
        payload["frame_report"] = rep.to_jsonable()
        if desc.cert == "tight":
            code = EXIT_OK if rep.tight_residual <= args.tol else EXIT_CERTIFIED_FAIL
        else:
            code = EXIT_OK if rep.a_est > args.tol else EXIT_CERTIFIED_FAIL
    _write_report(args.out, payload)
    return code


# ----------------------------------------------------------------------

def build_parser() -> Parser:
    p = Parser(prog="tflat", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("lattice", help="density, dual, adjoint, symplectic check")
    q.add_argument("--lattice", required=True,
                   help='matrix "[[a,b],[c,d]]" or separable "a,b[,c,d]"')
    q.add_argument("--out", default=None)
    q.set_defaults(func=_cmd_lattice)

    q = sub.add_parser("cover", help="tiling/packing classification")
    q.add_argument("--region", required=True)
    q.add_argument("--lattice", required=True)
    q.add_argument("--mode", choices=["auto", "exact", "float"], default="auto")
    q.add_argument("--h", type=float, default=None)
    q.add_argument("--tol", type=float, default=1e-6)
    q.add_argument("--expect", default="tiling",
                   choices=["tiling", "packing", "k_fold_tiling", "neither", "any"])
    q.add_argument("--fourier", type=int, default=0,
                   help="also run the Fourier check with this radius")
    q.add_argument("--out", default=None)
    q.set_defaults(func=_cmd_cover)

    q = sub.add_parser("build-domain", help="constructive fundamental domains")
    qs = q.add_subparsers(dest="domain_kind", required=True)
    qc = qs.add_parser("common")
    qc.add_argument("--m", type=int, required=True)
    qc.add_argument("--n", type=int, required=True)
    qc.add_argument("--variant", choices=["upper", "lower"], default="upper")
    qc.add_argument("--fourier", type=int, default=8)
    qc.add_argument("--region-out", default=None)
    qc.add_argument("--out", default=None)
    qc.set_defaults(func=_cmd_build_domain)
    qd = qs.add_parser("scaled")
    qd.add_argument("--a-matrix", required=True)
    qd.add_argument("--b-matrix", required=True)
    qd.add_argument("--domain", required=True)
    qd.add_argument("--center", default=None)
    qd.add_argument("--h", type=float, default=None)
    qd.add_argument("--region-out", default=None)
    qd.add_argument("--out", default=None)
    qd.set_defaults(func=_cmd_build_domain)

    q = sub.add_parser("build-window", help="window synthesis")
    qs = q.add_subparsers(dest="window_kind", required=True)
    for kind in ("smooth", "indicator", "plateau", "tensor"):
        qq = qs.add_parser(kind)
        if kind in ("smooth", "indicator"):
            qq.add_argument("--region", required=True)
        if kind == "smooth":
            qq.add_argument("--eps", type=float, required=True)
        if kind == "plateau":
            qq.add_argument("--inner", required=True, help="a,b")
            qq.add_argument("--outer", required=True, help="a,b")
        if kind == "tensor":
            qq.add_argument("--w1", required=True)
            qq.add_argument("--w2", required=True)
        qq.add_argument("--h", type=float, default=1.0 / 256.0)
        qq.add_argument("--window-out", required=True)
        qq.add_argument("--csv-out", default=None)
        qq.add_argument("--out", default=None)
        qq.set_defaults(func=_cmd_build_window)

    q = sub.add_parser("frame", help="frame-bound and duality analysis")
    qs = q.add_subparsers(dest="frame_op", required=True)
    for op in ("bounds", "tight", "ortho", "parseval"):
        qq = qs.add_parser(op)
        qq.add_argument("--window", required=True)
        qq.add_argument("--lattice", required=True)
        qq.add_argument("--samples", type=int, default=16)
        qq.add_argument("--tol", type=float, default=5e-3)
        if op == "bounds":
            qq.add_argument("--samples-csv", default=None)
        if op == "ortho":
            qq.add_argument("--radius", type=int, default=3)
            qq.add_argument("--normalize", action="store_true")
        if op == "parseval":
            qq.add_argument("--signal", required=True)
            qq.add_argument("--truncation", type=int, default=24)
        qq.add_argument("--out", default=None)
        qq.set_defaults(func=_cmd_frame)

    q = sub.add_parser("pipeline", help="constructive frame pipelines")
    qs = q.add_subparsers(dest="pipe_kind", required=True)
    qd = qs.add_parser("diag")
    for name in "abcd":
        qd.add_argument(f"--{name}", type=float, required=True)
    qp = qs.add_parser("separable")
    qp.add_argument("--a-matrix", required=True)
    qp.add_argument("--b-matrix", required=True)
    qb = qs.add_parser("block-tri")
    qb.add_argument("--a-matrix", required=True)
    qb.add_argument("--d-matrix", required=True)
    qb.add_argument("--b-matrix", required=True)
    qb.add_argument("--out", default=None)
    qb.set_defaults(func=_cmd_pipeline)
    for qq in (qd, qp):
        qq.add_argument("--h", type=float, default=1.0 / 256.0)
        qq.add_argument("--samples", type=int, default=12)
        qq.add_argument("--tol", type=float, default=5e-3)
        qq.add_argument("--certify", action=argparse.BooleanOptionalAction,
                        default=True)
        qq.add_argument("--window-out", default=None)
        qq.add_argument("--out", default=None)
        qq.set_defaults(func=_cmd_pipeline)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, ValueError, json.JSONDecodeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (PreconditionError, NotReducibleError, UnclassifiedLatticeError,
            DegenerateMarginError) as exc:
        print(f"certified failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFIED_FAIL
    except TflatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
