"""Command-line surface.

Subcommands: pdf, cdf, quantile, moments, stats, laplace, tail, simulate,
table, genlaplace-demo, selftest.  Grid output goes to stdout (or --out) as
CSV (header ``x,value,error_bound,terms_used,method``) or JSON, serialized at
17 significant digits so re-parsing reproduces the exact doubles.

Exit codes: 0 success, 2 argument error (argparse default), 3 numeric failure
(a machine-readable JSON object is printed to stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .core import DriftParams, NumericError, SeriesBudget
from . import asymptotics, dist, mcoracle, moments, transforms

TABLE_DRIFTS = {1: 0.0, 2: 1.0, 3: 1.5, 4: 2.0}


def _fmt(v) -> str:
    if isinstance(v, int):
        return str(v)
    try:
        f = float(v)
    except (TypeError, OverflowError):
        return str(v)
    return format(f, ".17g")


def _write_records(records, key: str, fmt: str, out_path):
    lines = []
    if fmt == "csv":
        lines.append(f"{key},value,error_bound,terms_used,method")
        for r in records:
            lines.append(",".join([_fmt(r[0]), _fmt(r[1]), _fmt(r[2]),
                                   str(r[3]), r[4]]))
        text = "\n".join(lines) + "\n"
    else:
        objs = [{key: r[0] if isinstance(r[0], int) else float(r[0]),
                 "value": float(r[1]), "error_bound": float(r[2]),
                 "terms_used": int(r[3]), "method": r[4]} for r in records]
        text = json.dumps(objs, indent=1) + "\n"
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _grid(args):
    if args.x is not None:
        return [args.x]
    n = max(2, args.points)
    lo, hi = args.x_min, args.x_max
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _params(args) -> DriftParams:
    return DriftParams(mu=args.mu, sigma=args.sigma, t=args.t)


def _digits(args, fallback: int) -> int:
    env = os.environ.get("ABSBM_PRECISION_DIGITS")
    if args.precision_digits is not None:
        return args.precision_digits
    if env:
        return int(env)
    return fallback


def _dist_cmd(args, shift_pdf: bool):
    p = _params(args)
    budget = SeriesBudget(max_terms=400, abs_tol=args.tol, rel_tol=args.tol,
                          precision_digits=_digits(args, 17))
    fn = dist.pdf if shift_pdf else dist.cdf
    records = []
    for x in _grid(args):
        r = fn(x, p, budget=budget, kmax=args.kmax)
        records.append((x, r.value, r.error_bound, r.terms_used, r.method))
    _write_records(records, "x", args.format, args.out)
    return 0


def cmd_pdf(args):
    return _dist_cmd(args, True)


def cmd_cdf(args):
    return _dist_cmd(args, False)


def cmd_quantile(args):
    p = _params(args)
    qs = _grid(args) if args.x is None else [args.x]
    records = []
    for q in qs:
        xq = dist.quantile(q, p, tol=args.tol if args.tol < 1e-2 else 1e-6)
        records.append((q, xq, args.tol, 0, "quantile"))
    _write_records(records, "q", args.format, args.out)
    return 0


def cmd_moments(args):
    p = _params(args)
    nmax = args.n if args.n is not None else 10
    records = []
    for n in range(nmax + 1):
        digits = _digits(args, 60 if n > 4 and p.mu != 0 else 17)
        mv = moments.moment(n, p, digits=digits)
        err = abs(float(mv.value)) * 10.0 ** (-mv.digits_validated) \
            if mv.digits_validated < 300 else 0.0
        records.append((n, mv.value, err, mv.digits_validated, mv.route))
    _write_records(records, "n", args.format, args.out)
    return 0


def cmd_stats(args):
    p = _params(args)
    st = moments.stats(p, digits=_digits(args, 17))
    names = ("mean", "variance", "skewness", "excess-kurtosis")
    records = [(i + 1, v, 0.0, 0, names[i]) for i, v in enumerate(st)]
    _write_records(records, "n", args.format, args.out)
    return 0


def cmd_laplace(args):
    p = _params(args)
    u = args.u if args.u is not None else 1.0
    budget = SeriesBudget(max_terms=args.kmax, abs_tol=args.tol, rel_tol=args.tol,
                          precision_digits=_digits(args, 17))
    method = args.method or "auto"
    if method in ("large-u",):
        r = transforms.laplace_large_u(u, p, budget=budget)
    elif method in ("small-u",):
        r = transforms.laplace_small_u(u, p)
    else:
        try:
            r = transforms.laplace_large_u(u, p, budget=budget)
        except NumericError:
            r = transforms.laplace_small_u(u, p)
    _write_records([(u, r.value, r.error_bound, r.terms_used, r.method)],
                   "u", args.format, args.out)
    return 0


def cmd_tail(args):
    p = _params(args)
    records = []
    for x in _grid(args):
        sv = asymptotics.cdf_tail_large_x(x, p)
        records.append((x, sv, abs(sv) * min(1.0, 1.0 / x), 0, "tail-large-x"))
    _write_records(records, "x", args.format, args.out)
    return 0


def cmd_simulate(args):
    p = _params(args)
    cfg = mcoracle.SimConfig(n_paths=args.paths, n_steps=args.steps, seed=args.seed)
    summary = mcoracle.simulate(p, cfg)
    records = []
    for n in range(1, 5):
        est, se = mcoracle.empirical_moment(summary, n)
        records.append((n, est, 3.0 * se, summary.n_paths, "mc-moment"))
    for q in (0.1, 0.25, 0.5, 0.75, 0.9):
        records.append((q, float(summary.quantile(q)), 0.0, summary.n_paths,
                        "mc-quantile"))
    _write_records(records, "n", args.format, args.out)
    return 0


def cmd_table(args):
    which = args.which or 1
    mu = TABLE_DRIFTS[which]
    p = DriftParams(mu=mu, sigma=1.0, t=1.0)
    records = []
    for n in range(11):
        digits = _digits(args, 60 if n >= 5 and mu != 0 else 30)
        mv = moments.moment(n, p, digits=digits)
        from mpmath import mp
        with mp.workdps(30):
            val10 = mp.nstr(mp.mpf(mv.value), 10, strip_zeros=False)
        records.append((n, val10, mv.digits_validated, mv.route))
    if args.format == "json":
        text = json.dumps([{"n": r[0], "value": r[1], "digits_validated": r[2],
                            "method": r[3]} for r in records], indent=1) + "\n"
    else:
        text = "n,value,digits_validated,method\n" + "\n".join(
            f"{r[0]},{r[1]},{r[2]},{r[3]}" for r in records) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_genlaplace_demo(args):
    import numpy as np
    from .asymptotics import ExpIntegrandTriple, gen_laplace

    out = {}
    # 1-d Gaussian sanity: integral of e^{-x^2 w^2/2} = sqrt(2 pi)/x
    tri = ExpIntegrandTriple(g1=lambda w: 1.0, g2=lambda w: 0.0,
                             g3=lambda w: w * w / 2.0, domain=((-5.0, 5.0),), d=1)
    rows = []
    for x in (5.0, 10.0, 20.0):
        r = gen_laplace(tri, x, x0=(0.3,))
        rows.append({"x": x, "approx": abs(r.value), "exact": math.sqrt(2 * math.pi) / x})
    out["gaussian_1d"] = rows

    def phi(rho, th):
        sec = 1.0 / math.cos(th)
        return (3 * rho * complex(math.cos(th), math.sin(th))
                + 3 / rho * complex(math.cos(th), -math.sin(th))
                * (1 + 1j * math.tan(th)) ** 1.5 - 4.5 * (1 + 1j * math.tan(th)))

    tri2 = ExpIntegrandTriple(g1=lambda r, t: 1.0, g2=lambda r, t: 0.0, g3=phi,
                              domain=((0.05, 6.0), (-1.2, 1.2)), d=2)
    r = gen_laplace(tri2, 10.0, x0=(0.8, 0.2))
    out["exponent_fixture"] = {
        "minimizer": list(map(float, r.minimizer)),
        "min_re": float(phi(*r.minimizer).real),
        "hessian": [[str(v) for v in row] for row in r.hessian.tolist()],
    }
    sys.stdout.write(json.dumps(out, indent=1, default=float) + "\n")
    return 0


def cmd_selftest(args):
    from . import selftest

    return selftest.run(verbose=True)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="absbm",
        description="Distribution of the time-integral of |drifted Brownian motion|")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--mu", type=float, default=0.0)
        sp.add_argument("--sigma", type=float, default=1.0)
        sp.add_argument("--t", type=float, default=1.0)
        sp.add_argument("--x", type=float, default=None)
        sp.add_argument("--x-min", dest="x_min", type=float, default=0.05)
        sp.add_argument("--x-max", dest="x_max", type=float, default=4.0)
        sp.add_argument("--points", type=int, default=100)
        sp.add_argument("--tol", type=float, default=1e-4)
        sp.add_argument("--kmax", type=int, default=24)
        sp.add_argument("--precision-digits", dest="precision_digits",
                        type=int, default=None)
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--u", type=float, default=None)
        sp.add_argument("--method", type=str, default=None,
                        choices=["series", "contour", "auto", "small-u", "large-u"])
        sp.add_argument("--paths", type=int, default=100000)
        sp.add_argument("--steps", type=int, default=4096)
        sp.add_argument("--seed", type=int, default=20230915)
        sp.add_argument("--format", type=str, default="csv",
                        choices=["csv", "json"])
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--which", type=int, default=None, choices=[1, 2, 3, 4])

    for name, fn in (("pdf", cmd_pdf), ("cdf", cmd_cdf), ("quantile", cmd_quantile),
                     ("moments", cmd_moments), ("stats", cmd_stats),
                     ("laplace", cmd_laplace), ("tail", cmd_tail),
                     ("simulate", cmd_simulate), ("table", cmd_table),
                     ("genlaplace-demo", cmd_genlaplace_demo),
                     ("selftest", cmd_selftest)):
        sp = sub.add_parser(name)
        add_common(sp)
        sp.set_defaults(func=fn)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except NumericError as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__,
                                     "message": str(exc)}) + "\n")
        return 3
    except ValueError as exc:
        sys.stderr.write(json.dumps({"error": "ValueError",
                                     "message": str(exc)}) + "\n")
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
