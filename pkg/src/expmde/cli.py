"""``expmde`` command-line tool.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .autoquad import AutoQuadConfig, expm_auto
from .errors import ExpmDEError, InvalidTolerance, MatrixMarketError
from .experiments import (
    DEFAULT_COMPARE_H,
    DEFAULT_TALBOT_M,
    ScalarMapConfig,
    compare_methods,
    run_autoquad,
    scalar_map,
    shift_sweep,
)
from .matgen import ConvDiffSpec, RandSvdSpec, convection_diffusion, randsvd, test_matrix
from .mmio import read_matrix, write_array, write_coordinate
from .quadrature import DEFAULT_EPS, DEFAULT_H, DEFAULT_SIGMA, expm_de

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

LEFT_WINDOW = ((-30.0, 10.0), (-20.0, 20.0))
RIGHT_WINDOW = ((-5000.0, 0.0), (-2500.0, 2500.0))


class InputError(Exception):
    pass


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    return str(v)


def write_csv(path, rows, columns):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])


def _jsonable(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Path):
        return str(v)
    return v


def write_manifest(out_path, args, extra=None):
    params = {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k != "func"}
    manifest = {
        "subcommand": args.command,
        "parameters": params,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        manifest.update(extra)
    path = Path(str(out_path) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from exc


def _pair(text):
    vals = _float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return tuple(vals)


def _load_matrix(spec, seed):
    if spec in ("a1", "a2"):
        return test_matrix(int(spec[1]), n=50, seed=seed)
    return read_matrix(spec)


def _sigma_grid(lo, hi, step):
    n = int(round((hi - lo) / step))
    return [lo + i * step for i in range(n + 1)]


def cmd_expm(args):
    A = read_matrix(args.input)
    record = {"input": str(args.input), "n": int(A.shape[0])}
    if args.auto:
        cfg = AutoQuadConfig(eps=args.eps, sigma=args.sigma, eta=args.eta,
                             h_min=args.h_min, h1=args.h1)
        res, rep = expm_auto(A, cfg, mode=args.mode, threads=args.threads, shift=args.shift)
        record.update({
            "outcome": rep.outcome.value,
            "final_h": rep.final_h,
            "rounds": [
                {"h1": r.h1, "h2": r.h2, "h3": r.h3, "eps1": r.eps1, "eps2": r.eps2,
                 "rho": r.rho, "gamma": r.gamma, "eps3_pred": r.eps3_pred,
                 "action": r.action}
                for r in rep.rounds
            ],
            "h4": rep.h4,
            "refine_change": rep.refine_change,
            "eta_eps": args.eta * args.eps,
        })
    else:
        res = expm_de(A, h=args.h, eps=args.eps, sigma=args.sigma, mode=args.mode,
                      threads=args.threads, shift=args.shift)
    iv = res.interval
    record.update({
        "h": res.params.h,
        "interval": [iv.l, iv.r],
        "truncation_bound": iv.left_bound + iv.right_bound,
        "nodes": res.nodes_evaluated,
        "mode": res.mode.value,
        "lambda_right": _jsonable(res.lambda_right),
        "shift_applied": _jsonable(res.shift_applied),
        "scaled": res.scaled,
    })
    write_array(args.out, res.X)
    line = json.dumps(record, sort_keys=True)
    meta = Path(args.meta) if args.meta else Path(str(args.out) + ".jsonl")
    with open(meta, "a", encoding="utf-8") as fh:
        fh.write(line + "\n")
    print(line)
    write_manifest(args.out, args)
    return EXIT_OK


def cmd_scalar_map(args):
    if args.re_range is None and args.im_range is None:
        windows = [("left",) + LEFT_WINDOW, ("right",) + RIGHT_WINDOW]
    else:
        re_r = args.re_range or LEFT_WINDOW[0]
        im_r = args.im_range or LEFT_WINDOW[1]
        windows = [("custom", re_r, im_r)]
    rows = []
    for name, re_r, im_r in windows:
        try:
            cfg = ScalarMapConfig(hs=tuple(args.h), re_range=re_r, im_range=im_r,
                                  grid=args.grid, eps=args.eps)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        for r in scalar_map(cfg):
            r["window"] = name
            rows.append(r)
    write_csv(args.out, rows, ["window", "re", "im", "h", "abs_error", "valid"])
    write_manifest(args.out, args)
    return EXIT_OK


def cmd_shift_sweep(args):
    A = _load_matrix(args.matrix, args.seed)
    sigmas = args.sigmas if args.sigmas else _sigma_grid(-10.0, 5.0, 0.5)
    rows = shift_sweep(A, sigmas, h=args.h, eps=args.eps, mode=args.mode, shift=args.shift)
    write_csv(args.out, rows, ["sigma", "rel_error_2norm", "sigma_nonneg", "status"])
    write_manifest(args.out, args)
    return EXIT_OK


def cmd_autoquad(args):
    A = _load_matrix(args.matrix, args.seed)
    run = run_autoquad(A, args.eps_list, mode=args.mode, sigma=args.sigma,
                       eta=args.eta, shift=args.shift)
    write_csv(args.out, run.rows, ["eps_target", "eps_measured", "final_h", "rounds",
                                   "outcome", "eps3_pred", "nodes"])
    trace = args.trace_out or Path(args.out).with_suffix(".trace.csv")
    write_csv(trace, run.trace, ["eps_target", "h", "inv_h", "error"])
    write_manifest(args.out, args, {"trace_file": str(trace)})
    return EXIT_OK


def cmd_compare(args):
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    bad = set(methods) - {"de", "talbot"}
    if bad or not methods:
        raise InputError(f"unknown method(s): {', '.join(sorted(bad)) or '(none)'}")
    rows = compare_methods(args.d, c=args.c, grid_n=args.grid_n, methods=methods,
                           hs=args.hs, ms=[int(m) for m in args.ms], sigma=args.sigma,
                           eps=args.eps, mode=args.mode, shift=args.shift)
    write_csv(args.out, rows, ["method", "param", "nodes", "rel_error"])
    write_manifest(args.out, args)
    return EXIT_OK


def cmd_gen_matrix(args):
    if args.kind in ("a1", "a2"):
        A = test_matrix(int(args.kind[1]), n=args.n, seed=args.seed, kappa=args.kappa)
        write_array(args.out, A)
    elif args.kind == "randsvd":
        A = randsvd(RandSvdSpec(n=args.n, kappa=args.kappa, seed=args.seed))
        write_array(args.out, A)
    else:
        A = convection_diffusion(ConvDiffSpec(grid_n=args.grid_n, d=args.d, c=args.c))
        write_coordinate(args.out, A)
    write_manifest(args.out, args)
    return EXIT_OK


def _add_common(p, mode_default="direct"):
    p.add_argument("--sigma", type=float, default=DEFAULT_SIGMA,
                   help="target real part of the shifted rightmost eigenvalue (default -2.5)")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS,
                   help="truncation tolerance (default machine epsilon)")
    p.add_argument("--mode", choices=("direct", "split"), default=mode_default)
    p.add_argument("--shift", choices=("eigenvalue", "real"), default="eigenvalue",
                   help="subtract the rightmost eigenvalue or only its real part")
    p.add_argument("--threads", type=int, default=1,
                   help="node-level worker threads; results do not depend on it")


def build_parser():
    ap = argparse.ArgumentParser(prog="expmde",
                                 description="Matrix exponential by double-exponential quadrature.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expm", help="compute e^A for a Matrix Market file")
    p.add_argument("input")
    p.add_argument("--h", type=float, default=DEFAULT_H)
    p.add_argument("--auto", action="store_true", help="choose h automatically")
    p.add_argument("--eta", type=float, default=10.0)
    p.add_argument("--h-min", type=float, default=1e-3)
    p.add_argument("--h1", type=float, default=0.4)
    p.add_argument("--out", required=True)
    p.add_argument("--meta", help="JSON-lines metadata file (default OUT.jsonl)")
    _add_common(p)
    p.set_defaults(func=cmd_expm)

    p = sub.add_parser("scalar-map", help="error of the scalar formula over a window")
    p.add_argument("--h", type=_float_list, default=[0.2, 0.1, 0.05])
    p.add_argument("--re-range", type=_pair)
    p.add_argument("--im-range", type=_pair)
    p.add_argument("--grid", type=int, default=41)
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scalar_map)

    p = sub.add_parser("shift-sweep", help="error against the shift parameter")
    p.add_argument("--matrix", default="a1", help="a1, a2 or a Matrix Market path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigmas", type=_float_list)
    p.add_argument("--h", type=float, default=DEFAULT_H)
    p.add_argument("--out", required=True)
    _add_common(p, mode_default="split")
    p.set_defaults(func=cmd_shift_sweep)

    p = sub.add_parser("autoquad", help="automatic mesh selection against target tolerance")
    p.add_argument("--matrix", default="a1", help="a1, a2 or a Matrix Market path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps-list", type=_float_list, default=[1e-4, 1e-6, 1e-8, 1e-10, 1e-12])
    p.add_argument("--eta", type=float, default=10.0)
    p.add_argument("--out", required=True)
    p.add_argument("--trace-out")
    _add_common(p, mode_default="split")
    p.set_defaults(func=cmd_autoquad)

    p = sub.add_parser("compare", help="DE against Talbot on a convection-diffusion matrix")
    p.add_argument("--d", type=float, default=0.001)
    p.add_argument("--c", type=_pair, default=(0.2, 0.2))
    p.add_argument("--grid-n", type=int, default=15)
    p.add_argument("--methods", default="de,talbot")
    p.add_argument("--hs", type=_float_list, default=list(DEFAULT_COMPARE_H))
    p.add_argument("--ms", type=_float_list, default=list(DEFAULT_TALBOT_M))
    p.add_argument("--out", required=True)
    _add_common(p, mode_default="split")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen-matrix", help="write a test matrix")
    p.add_argument("--kind", choices=("a1", "a2", "convdiff", "randsvd"), required=True)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kappa", type=float, default=100.0)
    p.add_argument("--grid-n", type=int, default=20)
    p.add_argument("--d", type=float, default=0.01)
    p.add_argument("--c", type=_pair, default=(0.2, 0.2))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_matrix)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, MatrixMarketError, InvalidTolerance, OSError) as exc:
        print(f"expmde: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ExpmDEError as exc:
        print(f"expmde: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"expmde: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
