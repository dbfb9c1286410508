"""Command-line interface.

Exit codes: 0 success, 1 invariant failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import experiments
from .errors import InvariantViolation, PointSetError, ResourceLimitExceeded, SizeLimitExceeded
from .exact import as_rational, dump_points, load_points
from .generators import gen_collinear, gen_grid, gen_random, gen_two_circles
from .hinges import DEFAULT, DISTINCT, hinge_stats
from .incidence import incidence_report
from .klein import DEFAULT_PROFILE_LIMIT, intersection_profile
from .limits import Deadline
from .reports import hinges_report, incidence_report_json, lines_report, points3d_report, quadruples_report
from .verify import verify


class UsageError(Exception):
    pass


def _emit(obj, out):
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _profile(args, points):
    return intersection_profile(points, limit=args.profile_limit, threads=args.threads,
                                deadline=Deadline(args.limit_seconds))


def cmd_gen(args):
    fam = args.family.replace("-", "_")
    if fam == "grid":
        if args.m is None:
            raise UsageError("--family grid needs --m")
        pts = gen_grid(args.m)
    elif fam == "random":
        if args.n is None or args.seed is None:
            raise UsageError("--family random needs --n and --seed")
        pts = gen_random(args.n, args.bound, args.seed)
    elif fam == "two_circles":
        if args.n is None:
            raise UsageError("--family two-circles needs --n")
        pts = gen_two_circles(args.n, as_rational(args.r1), as_rational(args.r2))
    else:
        if args.n is None:
            raise UsageError("--family collinear needs --n")
        pts = gen_collinear(args.n)
    text = dump_points(pts, header=f"family={fam} n={pts.n}")
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_hinges(args):
    points = load_points(args.input)
    conv = DISTINCT if args.distinct_points else DEFAULT
    stats = hinge_stats(points, conv, histogram=False if args.no_histogram else None)
    _emit(hinges_report(stats), args.out)
    return 0


def cmd_lines(args):
    points = load_points(args.input)
    prof = _profile(args, points) if args.method == "points" else None
    _emit(lines_report(points, prof), args.out)
    return 0


def cmd_points3d(args):
    points = load_points(args.input)
    _emit(points3d_report(_profile(args, points)), args.out)
    return 0


def cmd_incidence(args):
    if (args.k is None) != (args.t is None):
        raise UsageError("--k and --t must be given together")
    points = load_points(args.input)
    rep = incidence_report(_profile(args, points), args.k, args.t)
    _emit(incidence_report_json(points.n, rep), args.out)
    return 0


def cmd_quadruples(args):
    if args.N < 1:
        raise UsageError("--N must be positive")
    _emit(quadruples_report(args.N, experiments.quadruple_count(args.N)), args.out)
    return 0


def cmd_fit(args):
    series = experiments.read_series_csv(args.series)
    _emit({"kind": "fit", "fits": experiments.fit_series(series)}, args.out)
    return 0


def cmd_sweep(args):
    config = json.loads(Path(args.config).read_text())
    report = experiments.run_experiment(config, threads=args.threads, limit_seconds=args.limit_seconds,
                                        checkpoint=args.checkpoint)
    _emit(report, args.out)
    if args.csv:
        experiments.write_series_csv(report["rows"], args.csv)
    return 0


def cmd_verify(args):
    points = load_points(args.input)
    res = verify(points, args.level)
    _emit(res.as_dict(), args.out)
    for c in res.failures:
        print(f"FAIL {c.name}: {c.detail}", file=sys.stderr)
    return 0 if res.passed else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads (results do not depend on it)")
    common.add_argument("--limit-seconds", type=float, default=None, help="per-computation wall-clock budget")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--profile-limit", type=int, default=DEFAULT_PROFILE_LIMIT,
                        help="largest n for the 3D intersection profile")

    parser = argparse.ArgumentParser(prog="eshinge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a point set")
    p.add_argument("--family", required=True, choices=["grid", "random", "two-circles", "two_circles", "collinear"])
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--r1", default="1")
    p.add_argument("--r2", default="2")
    p.add_argument("--bound", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("hinges", parents=[common], help="hinge statistics")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--distinct-points", action="store_true")
    p.add_argument("--no-histogram", action="store_true")
    p.set_defaults(func=cmd_hinges)

    p = sub.add_parser("lines", parents=[common], help="per-line meet counts")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--method", choices=["points", "dots"], default="points",
                   help="group actual 3D meets (points) or use distance-profile products (dots)")
    p.set_defaults(func=cmd_lines)

    p = sub.add_parser("points3d", parents=[common], help="dyadic rich-point and rich-line tables")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_points3d)

    p = sub.add_parser("incidence", parents=[common], help="incidence counts against bound shapes")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--t", type=int)
    p.set_defaults(func=cmd_incidence)

    p = sub.add_parser("quadruples", parents=[common], help="multiplicative quadruple count M(N)")
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_quadruples)

    p = sub.add_parser("fit", parents=[common], help="power-log fit of a series CSV")
    p.add_argument("--series", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sweep", parents=[common], help="run an experiment configuration")
    p.add_argument("--config", required=True)
    p.add_argument("--csv", default=None, help="also export the series table as CSV")
    p.add_argument("--checkpoint", default=None, help="per-instance CSV checkpoint, reused on rerun")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", parents=[common], help="cross-module oracle suite")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--level", choices=["fast", "full"], default="fast")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 1
    except (UsageError, PointSetError, SizeLimitExceeded, ResourceLimitExceeded, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
