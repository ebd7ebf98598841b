"""Command-line interface: ``qdc <eval|grid|tails|sample|empirical> [flags]``.

Exit codes: 0 success, 1 usage error, 2 limit not converged or empty
conditioning set, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .core import CopulaError, DomainError, QuantilePoint
from .dependence import Direction, LimitSchedule, qdc, qdc_grid, tail_coefficients
from .empirical import EmptyConditioningSet, empirical_qdc, pseudo_observations, sample_copula
from .registry import FAMILIES, make_family, parse_params

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    return f"{x:.9g}"


def _round9(x: float) -> float:
    return float(fmt(x))


def _add_family(p):
    p.add_argument("--family", required=True, help=f"one of: {', '.join(FAMILIES)}")
    p.add_argument("--params", default="", help="comma-separated key=value pairs")


def _add_schedule(p):
    d = LimitSchedule()
    p.add_argument("--method", default="auto",
                   choices=["auto", "volume", "conditional", "closed-form"])
    p.add_argument("--t0", type=float, default=d.t0, help="first bandwidth of the limit schedule")
    p.add_argument("--ratio", type=float, default=d.ratio, help="schedule contraction factor")
    p.add_argument("--max-steps", type=int, default=d.max_steps)
    p.add_argument("--tol", type=float, default=d.abs_tol, help="convergence tolerance")


def _add_direction(p):
    p.add_argument("--direction", default="Y|X", help="Y|X (default) or X|Y")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdc", description="Quantile dependence coefficients of bivariate copulas.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="coefficient at one point")
    _add_family(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    _add_direction(p)
    _add_schedule(p)

    p = sub.add_parser("grid", help="coefficient surface on {i/n}^2")
    _add_family(p)
    p.add_argument("--resolution", type=int, default=20)
    _add_direction(p)
    _add_schedule(p)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", default="csv", choices=["csv", "json"])

    p = sub.add_parser("tails", help="lower and upper tail coefficients")
    _add_family(p)
    _add_schedule(p)

    p = sub.add_parser("sample", help="draw from a copula")
    _add_family(p)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.add_argument("--format", default="csv", choices=["csv"])
    p.add_argument("--raw", action="store_true", help="raw (x, y) draws; regression family only")

    p = sub.add_parser("empirical", help="plug-in estimate on two-column CSV data")
    p.add_argument("--in", dest="path", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    _add_direction(p)
    return parser


def _schedule(args) -> LimitSchedule:
    try:
        return LimitSchedule(args.t0, args.ratio, args.max_steps, args.tol)
    except DomainError as e:
        raise UsageError(f"schedule flags: {e}") from None


def _family(args):
    try:
        return make_family(args.family, parse_params(args.params))
    except DomainError as e:
        raise UsageError(f"--family/--params: {e}") from None


def _point(args) -> QuantilePoint:
    try:
        return QuantilePoint(args.p, args.q)
    except DomainError as e:
        raise UsageError(f"--p/--q: {e}") from None


def _direction(args) -> Direction:
    try:
        return Direction.parse(args.direction)
    except DomainError as e:
        raise UsageError(f"--direction: {e}") from None


def _method(args) -> str:
    return args.method.replace("-", "_")


def _write(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj) + "\n"


def cmd_eval(args) -> int:
    C, pt, d, sched = _family(args), _point(args), _direction(args), _schedule(args)
    try:
        est = qdc(C, pt, d, sched, _method(args))
    except CopulaError as e:
        raise UsageError(f"--method: {e}") from None
    sys.stdout.write(_json(est.as_dict()))
    return EXIT_OK if est.converged else EXIT_NOT_CONVERGED


def cmd_grid(args) -> int:
    C, d, sched = _family(args), _direction(args), _schedule(args)
    if args.resolution < 2:
        raise UsageError(f"--resolution must be >= 2, got {args.resolution}")
    try:
        rows = qdc_grid(C, args.resolution, d, sched, _method(args))
    except CopulaError as e:
        raise UsageError(f"--method: {e}") from None
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "q", "lambda", "converged"])
        for p, q, est in rows:
            w.writerow([fmt(p), fmt(q), fmt(est.value), str(est.converged).lower()])
        text = buf.getvalue()
    else:
        text = _json({
            "family": C.describe(),
            "direction": d.value,
            "resolution": args.resolution,
            "rows": [{"p": _round9(p), "q": _round9(q), "lambda": _round9(e.value),
                      "converged": e.converged} for p, q, e in rows],
        })
    _write(args.out, text)
    return EXIT_OK if all(e.converged for _, _, e in rows) else EXIT_NOT_CONVERGED


def cmd_tails(args) -> int:
    C, sched = _family(args), _schedule(args)
    lo, hi = tail_coefficients(C, sched)
    sys.stdout.write(_json({"lambda_L": lo.value, "lambda_U": hi.value,
                            "converged": lo.converged and hi.converged}))
    return EXIT_OK if lo.converged and hi.converged else EXIT_NOT_CONVERGED


def cmd_sample(args) -> int:
    C = _family(args)
    if args.n < 1:
        raise UsageError(f"-n must be >= 1, got {args.n}")
    if args.raw:
        if C.model is None or not hasattr(C.model, "simulate"):
            raise UsageError("--raw is only available for the regression family")
        data = C.model.simulate(args.n, np.random.default_rng(args.seed))
        header = ["x", "y"]
    else:
        data = sample_copula(C, args.n, args.seed)
        header = ["u", "v"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([fmt(a), fmt(b)] for a, b in data)
    _write(args.out, buf.getvalue())
    return EXIT_OK


def read_pairs(path: str) -> np.ndarray:
    """Two numeric columns from a CSV file; a non-numeric first row is a header."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if rows:
        try:
            [float(c) for c in rows[0]]
        except ValueError:
            rows = rows[1:]
    if not rows:
        raise UsageError(f"--in: {path} has no data rows")
    out = []
    for i, r in enumerate(rows, 1):
        if len(r) != 2:
            raise UsageError(f"--in: row {i} has {len(r)} columns, expected 2")
        try:
            out.append([float(r[0]), float(r[1])])
        except ValueError:
            raise UsageError(f"--in: row {i} is not numeric: {r}") from None
    data = np.array(out)
    if not np.isfinite(data).all():
        raise UsageError("--in: data contain non-finite values")
    return data


def cmd_empirical(args) -> int:
    pt, d = _point(args), _direction(args)
    if not 0.0 < args.t <= 0.5:
        raise UsageError(f"--t must lie in (0, 1/2], got {args.t}")
    po = pseudo_observations(read_pairs(args.path))
    try:
        value, count = empirical_qdc(po, pt, args.t, d)
    except EmptyConditioningSet as e:
        print(f"qdc: {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    sys.stdout.write(_json({"value": value, "count": count, "t": args.t}))
    return EXIT_OK


COMMANDS = {"eval": cmd_eval, "grid": cmd_grid, "tails": cmd_tails,
            "sample": cmd_sample, "empirical": cmd_empirical}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"qdc: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"qdc: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
