"""Command line interface.

Three subcommands: `geometry` prints the derived dilation report,
`criterion` evaluates the measure criterion sums, `verify` runs the named
experiment suites. All output is deterministic JSON on stdout (or --out).

Exit codes: 0 success, 1 a verification or threshold check failed,
2 invalid input or usage.
"""

import argparse
import inspect
import json
import math
import os
import sys

import numpy as np

from .geometry import GeometryError, build_geometry, geometry_report
from .measure import (MeasureError, PointMeasure, annulus_sup, criterion_sup)
from .suites import SUITES, SuiteError, run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _emit(obj, out_path):
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(err_type, message, out_path=None):
    _emit({"error": {"type": err_type, "message": str(message)}}, out_path)
    return EXIT_USAGE


def _envelope(command, result, passed=True, warnings=()):
    return {
        "command": command,
        "env": {"ANISO_THREADS": os.environ.get("ANISO_THREADS", "")},
        "passed": bool(passed),
        "warnings": list(warnings),
        "result": result,
    }


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _load_matrix(path):
    obj = _load_json(path)
    if isinstance(obj, dict):
        obj = obj.get("matrix")
    mat = np.asarray(obj, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise GeometryError(f"matrix must be square, got shape {mat.shape}")
    return mat


def _load_measure(path):
    return PointMeasure.from_dict(_load_json(path))


def cmd_geometry(args):
    try:
        mat = _load_matrix(args.matrix)
        geo = build_geometry(mat)
    except (OSError, ValueError, KeyError, GeometryError) as e:
        return _fail(type(e).__name__, e, args.out)
    _emit(_envelope("geometry", geometry_report(geo)), args.out)
    return EXIT_OK


def cmd_criterion(args):
    try:
        mat = _load_matrix(args.matrix)
        geo = build_geometry(mat)
        mu = _load_measure(args.measure)
        if mu.points.shape[0] and mu.points.shape[1] != mat.shape[0]:
            raise MeasureError("measure dimension does not match the matrix")
        if args.k_min > args.k_max:
            raise MeasureError(f"empty scale range [{args.k_min}, {args.k_max}]")
        if args.p >= 2.0 or math.isinf(args.p):
            report = annulus_sup(mu, geo.adjoint_qnorm,
                                 (args.k_min, args.k_max))
        else:
            report = criterion_sup(mu, geo, (args.k_min, args.k_max), args.p)
    except (OSError, ValueError, KeyError, GeometryError, MeasureError) as e:
        return _fail(type(e).__name__, e, args.out)
    warnings = []
    if report.sup_at_endpoint:
        warnings.append("supremum attained at an endpoint of the scanned "
                        "scale range; widen --k-min/--k-max")
    result = report.to_dict()
    result["requested_p"] = args.p
    passed = True
    if args.threshold is not None:
        result["threshold"] = args.threshold
        passed = report.sup_value <= args.threshold
    _emit(_envelope("criterion", result, passed=passed, warnings=warnings),
          args.out)
    return EXIT_OK if passed else EXIT_FAILED


def cmd_verify(args):
    names = [args.suite] if args.suite else sorted(SUITES)
    reports = []
    try:
        for name in names:
            fn = SUITES.get(name)
            if fn is None:
                raise SuiteError(f"unknown suite {name!r}; "
                                 f"known: {sorted(SUITES)}")
            kwargs = {"seed": args.seed}
            if args.resolution is not None and \
                    "resolution" in inspect.signature(fn).parameters:
                kwargs["resolution"] = args.resolution
            reports.append(fn(**kwargs))
    except SuiteError as e:
        return _fail(type(e).__name__, e, args.out)
    passed = all(r.passed for r in reports)
    result = {"suites": [r.to_dict() for r in reports]}
    _emit(_envelope("verify", result, passed=passed), args.out)
    return EXIT_OK if passed else EXIT_FAILED


def build_parser():
    parser = argparse.ArgumentParser(
        prog="anisomult",
        description="Numerical checks for anisotropic H^1 multiplier criteria")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("geometry", help="derived dilation geometry report")
    g.add_argument("--matrix", required=True, help="JSON file with the matrix")
    g.add_argument("--out", default=None, help="write JSON here instead of stdout")
    g.set_defaults(func=cmd_geometry)

    c = sub.add_parser("criterion", help="measure criterion sums over scales")
    c.add_argument("--matrix", required=True)
    c.add_argument("--measure", required=True, help="JSON point measure")
    c.add_argument("--p", type=float, default=1.0,
                   help="exponent; p in [1,2) uses the lattice sums, "
                        "p >= 2 the annulus masses")
    c.add_argument("--k-min", type=int, default=-8)
    c.add_argument("--k-max", type=int, default=8)
    c.add_argument("--threshold", type=float, default=None,
                   help="exit 1 if the supremum exceeds this")
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_criterion)

    v = sub.add_parser("verify", help="run the experiment suites")
    v.add_argument("--suite", default=None,
                   help="one suite name; default runs all")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--resolution", type=int, default=None,
                   help="grid resolution override where a suite supports it")
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
