"""Command-line interface.

Exit codes: 0 success, 2 domain or configuration error, 3 verdict differs
from ``--expect``.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np

from . import closure, oracle, ranges, reproductions
from .config import load_config, shipped_config
from .errors import DomainError
from .serial import atomic_write, dumps
from .seq import as_positive

EXIT_OK, EXIT_DOMAIN, EXIT_EXPECT = 0, 2, 3


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    return obj


def _emit(out, obj):
    out.write(dumps(_jsonable(obj)))


def _csv_text(rows):
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _spectrum(cfg):
    return as_positive(cfg.spectrum, "spectrum")


def cmd_support(args, out):
    cfg = load_config(args.config)
    sv = ranges.support(cfg.operator, _spectrum(cfg), args.theta, args.tol or cfg.options.tol)
    _emit(out, sv.to_dict())


def _write_region_outputs(args, R, title):
    if args.out:
        atomic_write(args.out, dumps(_jsonable(R.to_dict())))
    if args.csv:
        atomic_write(args.csv, _csv_text(R.csv_rows()))
    if args.svg:
        from .plotting import write_region_svg

        write_region_svg(R, args.svg, title)


def cmd_region(args, out):
    cfg = load_config(args.config)
    grid = args.grid or cfg.options.grid
    R = ranges.region(cfg.operator, _spectrum(cfg), grid, cfg.options.tol)
    _write_region_outputs(args, R, "region")
    _emit(out, {"grid": grid, "hausdorff": R.hausdorff, "hausdorff_bound": R.hausdorff_bound(),
                "max_truncation_error": R.max_error, "outer_vertices": len(R.outer_polygon),
                "inner_vertices": len(R.inner_polygon),
                "attained_everywhere": bool(R.attainment.all())})


def cmd_interval(args, out):
    cfg = load_config(args.config)
    iv = ranges.selfadjoint_interval(cfg.operator, _spectrum(cfg), cfg.options.tol)
    _emit(out, iv._asdict())


def cmd_closure_check(args, out):
    cfg = load_config(args.config)
    rep = closure.verify_main_theorem(cfg.operator, _spectrum(cfg), cfg.options.tol,
                                      args.grid or cfg.options.grid)
    _emit(out, rep.to_dict())
    return EXIT_OK


def cmd_is_closed(args, out):
    cfg = load_config(args.config)
    rep = closure.chain_check(cfg.operator, _spectrum(cfg), cfg.options.tol,
                              args.grid or cfg.options.grid)
    _emit(out, rep.to_dict())
    if args.expect and rep.verdict != args.expect:
        return EXIT_EXPECT
    return EXIT_OK


def _parse_point(text):
    try:
        re_, im_ = (float(p) for p in text.split(","))
    except ValueError as exc:
        raise DomainError(f"--point expects RE,IM, got {text!r}") from exc
    return complex(re_, im_)


def cmd_decompose(args, out):
    cfg = load_config(args.config)
    w = closure.decompose_point(cfg.operator, _spectrum(cfg), _parse_point(args.point),
                                cfg.options.tol, args.grid or cfg.options.grid)
    _emit(out, w.to_dict())


def cmd_oracle(args, out):
    cfg = load_config(args.config)
    c = _spectrum(cfg)
    if c.rank > args.dim:
        raise DomainError(f"rank(c) = {c.rank} exceeds --dim {args.dim}")
    A = cfg.operator
    A_fin = A.dense(max(args.dim, A.dim))
    c_fin = c.values(A_fin.shape[0])
    inst = oracle.FiniteInstance(A_fin, c_fin)
    cloud = oracle.haar_orbit_cloud(inst, args.samples, args.seed if args.seed is not None
                                    else cfg.options.seed)
    thetas = 2 * np.pi * np.arange(16) / 16
    rows = []
    for t in thetas:
        mx = oracle.boundary_maximizer(inst, t)
        cloud_max = float((np.exp(-1j * t) * cloud).real.max())
        rows.append({"theta": float(t), "maximizer": mx.value, "cloud_max": cloud_max})
    if args.csv:
        atomic_write(args.csv, _csv_text([("re", "im")] + [(repr(z.real), repr(z.imag)) for z in cloud]))
    _emit(out, {"dim": inst.dim, "samples": args.samples, "directions": rows})


def cmd_example(args, out):
    if args.which == "3.1":
        rep = reproductions.example_3_1()
        lines = []
        for comp in rep.components:
            sups = ", ".join(f"{v:.6g}" for v in comp.sup_by_n)
            lines.append(f"{comp.label}: {comp.render()}  sup_N=[{sups}]  "
                         f"err@N={comp.errors[-1]:.2e}  attained={'yes' if comp.attained else 'no'}")
        lo, hi = rep.union
        state = "closed" if rep.union_closed else "not closed"
        br = "[]" if rep.union_closed else "()"
        lines.append(f"union = {br[0]}{lo:g},{hi:g}{br[1]}, {state}")
        out.write("\n".join(lines) + "\n")
        if args.out:
            atomic_write(args.out, dumps(_jsonable(rep.to_dict())))
    elif args.which == "3.2":
        cfg = shipped_config("example_3_2")
        c = _spectrum(cfg)
        iv = ranges.selfadjoint_interval(cfg.operator, c, 1e-10)
        rhs = closure.closure_rhs(cfg.operator, c, 1e-10, 72)
        xs = rhs.outer_polygon.real
        out.write(
            f"sup = {iv.hi!r}\n"
            f"inf = {iv.lo!r}\n"
            f"certified_error = {iv.error:.3e}\n"
            f"attained_in_unitary_orbit = {iv.hi_unitary} (theta=0), {iv.lo_unitary} (theta=pi)\n"
            f"attained_in_orbit = {str(iv.hi_attained).lower()} (theta=0), "
            f"{str(iv.lo_attained).lower()} (theta=pi); closure hull = [{xs.min():.12f}, {xs.max():.12f}]\n")
    else:
        cfg = shipped_config("k_range")
        c = _spectrum(cfg)
        R = ranges.region(cfg.operator, c, 360, cfg.options.tol)
        up = R.support[0]
        out.write(f"k = {c.rank}\nsup = {up.value!r}\nattained = {str(up.attained).lower()}\n"
                  f"hausdorff = {R.hausdorff:.3e}\n")
        if args.svg:
            from .plotting import write_region_svg

            write_region_svg(R, args.svg, "k-numerical range")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="orbitrange",
                                description="Orbit-closed C-numerical ranges of operator models.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("support", help="support value in one direction")
    s.add_argument("--config", required=True)
    s.add_argument("--theta", type=float, default=0.0)
    s.add_argument("--tol", type=float)
    s.set_defaults(func=cmd_support)

    s = sub.add_parser("region", help="outer/inner polygons of the closure")
    s.add_argument("--config", required=True)
    s.add_argument("--grid", type=int)
    s.add_argument("--out")
    s.add_argument("--svg")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_region)

    s = sub.add_parser("interval", help="endpoints for a selfadjoint model")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_interval)

    s = sub.add_parser("closure-check", help="compare the range with the hull of truncations")
    s.add_argument("--config", required=True)
    s.add_argument("--grid", type=int)
    s.set_defaults(func=cmd_closure_check)

    s = sub.add_parser("is-closed", help="closedness verdict from the truncation chain")
    s.add_argument("--config", required=True)
    s.add_argument("--grid", type=int)
    s.add_argument("--expect", choices=("closed", "not_closed", "unknown"))
    s.set_defaults(func=cmd_is_closed)

    s = sub.add_parser("decompose", help="witness for a point of the closure")
    s.add_argument("--config", required=True)
    s.add_argument("--point", required=True)
    s.add_argument("--grid", type=int)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("oracle", help="Haar orbit samples of a finite compression")
    s.add_argument("--config", required=True)
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--samples", type=int, default=10000)
    s.add_argument("--seed", type=int)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("example", help="worked examples")
    s.add_argument("which", choices=("3.1", "3.2", "k-range"))
    s.add_argument("--out")
    s.add_argument("--svg")
    s.set_defaults(func=cmd_example)
    return p


def run(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args, out)
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    return EXIT_OK if code is None else code


def main():  # pragma: no cover - console entry point
    sys.exit(run())
