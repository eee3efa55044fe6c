"""Command-line entry point.

Exit status: 0 when every checked flag passes, 1 on a verification
failure, 2 on usage or input errors, 3 on numerical failure (eigensolver
or quadrature).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .algebra import BlockAlgebra
from .ensembles import gen_hermitian, gen_invertible_hermitian, gen_psd, gen_unitary
from .errors import LpflowError, NumericalFailure
from .fredholm import ModuleSpec, check_corollary04, summability_profile
from .harness import load_config, run_suite
from .inequalities import derived_constants
from .io import element_to_json
from .quadrature import QuadratureSpec
from .schur import estimate_Kp
from .specflow import OperatorPath, crossing_sf, integral_sf_bounded, integral_sf_unbounded, linear_path, shift_path

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


def parse_blocks(text):
    """``"4@1+2@0.5"`` -> ``BlockAlgebra([(4, 1.0), (2, 0.5)])``; weight defaults to 1."""
    blocks = []
    for part in text.split("+"):
        size, _, weight = part.partition("@")
        blocks.append((int(size), float(weight) if weight else 1.0))
    return BlockAlgebra(blocks)


def _resolve(path):
    """A user path, falling back to a data file shipped with the package."""
    p = Path(path)
    if p.exists():
        return p
    shipped = resources.files("lpflow.data").joinpath(p.name)
    if shipped.is_file():
        return Path(str(shipped))
    raise FileNotFoundError(path)


def _emit(args, obj, text):
    print(json.dumps(obj, indent=1, sort_keys=True) if args.json else text)


def cmd_verify(args):
    config = load_config(_resolve(args.config))
    bundle = run_suite(config, args.output)
    summary = bundle.summary()
    lines = [f"{r['suite']:<15} {r['name']:<22} p={str(r['p']):<5} {r['algebra']:<16} "
             f"trials={r['trials']:<4} pass_rate={r['pass_rate']:.3f} worst_margin={r['worst_margin']:.3e}"
             + ("  (informational)" if r["informational"] else "")
             for r in summary]
    lines.append(f"{bundle.meta['reports']} reports, {bundle.meta['failures']} failures: "
                 + ("PASS" if bundle.all_pass else "FAIL"))
    _emit(args, {"summary": summary, "meta": bundle.meta}, "\n".join(lines))
    return EXIT_OK if bundle.all_pass else EXIT_FAIL


def cmd_constants(args):
    out = []
    for p in args.p:
        est = estimate_Kp(p, args.dims, args.trials, args.seed)
        out.append(est)
        out.extend(derived_constants(est))
    text = "\n".join(f"{c.name:<8} p={c.p:<6g} {c.value:.12g}" for c in out)
    _emit(args, [c.to_json() for c in out], text)
    return EXIT_OK


def cmd_specflow(args):
    path = OperatorPath.load(_resolve(args.path))
    if args.method == "crossing":
        sf = crossing_sf(path, args.zero_tol)
        _emit(args, {"crossing_sf": sf}, f"{sf:g}")
        return EXIT_OK
    quad = QuadratureSpec(args.tol)
    if args.q is not None:
        res = integral_sf_bounded(path, args.q, quad, zero_tol=args.zero_tol)
    else:
        res = integral_sf_unbounded(path, args.m, quad, zero_tol=args.zero_tol)
    _emit(args, res.to_json(), f"{res.integral_sf:.12g}  (crossing {res.crossing_sf:g}, "
                               f"quadrature error {res.quad_error_estimate:.2e})")
    return EXIT_OK


def cmd_module_check(args):
    spec = ModuleSpec.load(_resolve(args.spec))
    kp = args.kp if args.kp is not None else estimate_Kp(spec.p, (8,), 200, 7).value
    prof = summability_profile(spec)
    reports = check_corollary04(spec, kp)
    ok = prof["equal"] and all(r.passed for r in reports)
    lines = [f"summability: unbounded={prof['unbounded']:.12g} bounded={prof['bounded']:.12g} "
             f"diff={prof['diff']:.2e}"]
    lines += [f"{r.name:<20} lhs={r.lhs:.6e} rhs={r.rhs:.6e} {'pass' if r.passed else 'FAIL'}"
              for r in reports]
    _emit(args, {"summability": prof, "Kp": kp, "reports": [r.to_json() for r in reports], "pass": ok},
          "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_gen(args):
    alg = parse_blocks(args.blocks)
    if args.kind == "hermitian":
        obj = element_to_json(gen_hermitian(alg, args.scale, args.seed))
    elif args.kind == "unitary":
        obj = element_to_json(gen_unitary(alg, args.seed))
    elif args.kind == "psd":
        obj = element_to_json(gen_psd(alg, args.scale, args.seed))
    elif args.kind == "module":
        rng = np.random.default_rng(args.seed)
        D0 = gen_invertible_hermitian(alg, args.scale, rng)
        us = [gen_unitary(alg, rng) for _ in range(args.unitaries)]
        obj = ModuleSpec(alg, D0, args.p, us).to_json()
    elif args.shift is not None:
        obj = shift_path(args.shift, grid=args.grid).to_json()
    else:
        rng = np.random.default_rng(args.seed)
        obj = linear_path(gen_hermitian(alg, args.scale, rng), gen_hermitian(alg, args.scale, rng),
                          args.grid).to_json()
    text = json.dumps(obj)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="lpflow", description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command")

    def add(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        p.set_defaults(fn=fn)
        return p

    p = add("verify", cmd_verify, "run a verification campaign")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="directory for reports, summary and failure archive")

    p = add("constants", cmd_constants, "estimate K_p and the constants derived from it")
    p.add_argument("--p", type=float, action="append", required=True)
    p.add_argument("--dims", type=lambda s: [int(v) for v in s.split(",")], default=[8])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    p = add("specflow", cmd_specflow, "spectral flow of a path file")
    p.add_argument("--path", required=True)
    p.add_argument("--method", choices=["crossing", "integral"], default="crossing")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--m", type=float, default=2.0)
    g.add_argument("--q", type=float)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--zero-tol", type=float, default=1e-10)

    p = add("module-check", cmd_module_check, "check a Fredholm module spec file")
    p.add_argument("--spec", required=True)
    p.add_argument("--kp", type=float, help="K_p to use (estimated when omitted)")

    p = add("gen", cmd_gen, "generate a random element or path file")
    p.add_argument("--kind", choices=["hermitian", "unitary", "psd", "path", "module"], required=True)
    p.add_argument("--blocks", default="4", help='block layout, e.g. "4@1+2@0.5"')
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", type=int, default=65)
    p.add_argument("--shift", type=int, help="truncated shift path with this K (kind=path)")
    p.add_argument("--p", type=float, default=4.0, help="module exponent (kind=module)")
    p.add_argument("--unitaries", type=int, default=3, help="number of unitaries (kind=module)")
    p.add_argument("--out")
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command is None:
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR)
    try:
        return args.fn(args)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (LpflowError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
