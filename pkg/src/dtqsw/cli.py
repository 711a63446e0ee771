"""Command-line surface: parameter sweeps emitted as deterministic CSV.

Every figure-style dataset is produced by one subcommand; plotting is a
separate concern (the CSV is diffable and byte-identical across runs and
worker counts). Exit codes: 0 success, 1 usage/config error, 2 partial
per-point numerical failure (failed rows carry value=nan and the error
column).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import math
import sys

import numpy as np

from . import genfun, oracles
from .directsim import return_series
from .errors import DtqswError
from .fitting import FitForm, find_minimum, fit_power_law
from .model import Model, WalkParams
from .perturbation import NONUNIFORM_THETA_WARNING, slope_series

CSV_HEADER = "model,theta,p,z,nmax,grid,kind,t,value,error"

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that signals usage errors instead of exiting with code 2."""

    def error(self, message):
        raise _UsageError(message)


def parse_angle(text: str) -> float:
    """Parse '0.2892pi', 'pi', or a plain radian value."""
    text = text.strip().lower()
    if text.endswith("pi"):
        head = text[:-2]
        factor = float(head) if head else 1.0
        return factor * math.pi
    return float(text)


def parse_list(text: str, convert=float) -> list:
    """Comma list or inclusive 'start:stop:step' range."""
    if ":" in text:
        start, stop, step = (convert(part) for part in text.split(":"))
        if step <= 0:
            raise _UsageError(f"range step must be positive in {text!r}")
        n = int(round((stop - start) / step))
        values = [start + i * step for i in range(n + 1)]
        return [v for v in values if v <= stop + 1e-12]
    return [convert(part) for part in text.split(",") if part.strip()]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.12g}"
    return str(value)


def _row(model, theta, p, z, nmax, grid, kind, t, value, error=""):
    fields = [model, theta, p, z, nmax, grid, kind, t, value, error]
    return ",".join(_fmt(f) for f in fields)


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_bounds(values, name, lo, hi):
    for v in values:
        if not lo <= v <= hi:
            raise _UsageError(f"{name}={v} outside [{lo}, {hi}]")


def _recur_point(args):
    model, theta, p, z, nmax, grid = args
    params = WalkParams(theta, p, Model(model))
    return genfun.recurrence_estimate(params, z, n_max=nmax, grid_n=grid)


def cmd_recur(args) -> int:
    thetas = sorted(parse_list(args.theta, parse_angle))
    ps = sorted(parse_list(args.p))
    zs = sorted(parse_list(args.z)) if args.z else list(genfun.DEFAULT_Z_SAMPLES)
    _check_bounds(thetas, "theta", 0.0, math.pi / 2)
    _check_bounds(ps, "p", 0.0, 1.0)
    for z in zs:
        if not 0.0 < z <= genfun.Z_CAP:
            raise _UsageError(f"z={z} outside (0, {genfun.Z_CAP}]")
    points = [
        (args.model, theta, p, z, args.nmax, args.grid)
        for theta in thetas for p in ps for z in zs
    ]
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_try_point, points))
    else:
        results = [_try_point(pt) for pt in points]

    lines = [CSV_HEADER]
    failed = False
    for (model, theta, p, z, nmax, grid), (value, err) in zip(points, results):
        failed = failed or bool(err)
        lines.append(_row(model, theta, p, z, nmax, grid, "rtilde", None, value, err))
    _emit(lines, args.out)
    return 2 if failed else 0


def _try_point(point):
    try:
        return _recur_point(point), ""
    except DtqswError as exc:
        return float("nan"), f"{type(exc).__name__}: {exc}"


_COIN_DENSITIES = {
    "R": np.diag([1.0, 0.0]),
    "L": np.diag([0.0, 1.0]),
    "mixed": np.eye(2) / 2,
}


def cmd_evolve(args) -> int:
    if args.tmax > 300:
        raise _UsageError("tmax capped at 300 (direct simulation resource cap)")
    if args.tmax < 1:
        raise _UsageError("tmax must be >= 1")
    thetas = sorted(parse_list(args.theta, parse_angle))
    ps = sorted(parse_list(args.p))
    _check_bounds(thetas, "theta", 0.0, math.pi / 2)
    _check_bounds(ps, "p", 0.0, 1.0)
    coin = _COIN_DENSITIES[args.coin]
    lines = [CSV_HEADER]
    for theta in thetas:
        for p in ps:
            series = return_series(
                WalkParams(theta, p, Model(args.model)), args.tmax, coin
            )
            for t in range(args.tmax + 1):
                lines.append(_row(args.model, theta, p, None, None, None,
                                  "st", t, float(series.survival[t])))
            for t in range(args.tmax + 1):
                lines.append(_row(args.model, theta, p, None, None, None,
                                  "rt", t, float(series.return_prob[t])))
            for t in range(1, args.tmax + 1):
                lines.append(_row(args.model, theta, p, None, None, None,
                                  "qhat", t, float(series.first_return[t - 1])))
    _emit(lines, args.out)
    return 0


def cmd_slope(args) -> int:
    thetas = sorted(parse_list(args.theta, parse_angle))
    ts = sorted(parse_list(args.t, int))
    _check_bounds(thetas, "theta", 0.0, math.pi / 2)
    if min(ts) < 1:
        raise _UsageError("t must be >= 1")
    lines = [CSV_HEADER]
    for theta in thetas:
        if theta > NONUNIFORM_THETA_WARNING:
            print(
                f"warning: near theta=pi/2 the large-t limit of B_t may not "
                f"equal R'(0) (theta={theta:.6g})",
                file=sys.stderr,
            )
        series = slope_series(theta, max(ts), Model(args.model))
        for t in ts:
            lines.append(_row(args.model, theta, 0.0, None, None, None,
                              "bt", t, float(series.values[t - 1])))
    _emit(lines, args.out)
    return 0


def cmd_fit(args) -> int:
    try:
        with open(args.input, encoding="utf-8") as fh:
            rows = [line.strip().split(",") for line in fh if line.strip()]
    except OSError as exc:
        raise _UsageError(f"cannot read {args.input}: {exc}") from exc
    if not rows or rows[0] != CSV_HEADER.split(","):
        raise _UsageError(f"{args.input} is not a recur CSV")
    groups: dict = {}
    for row in rows[1:]:
        model, theta, p, z, nmax, grid, kind = row[:7]
        value = row[8]
        if kind != "rtilde" or value == "nan":
            continue
        groups.setdefault((model, float(theta), float(p)), []).append(
            (float(z), float(value))
        )
    form = FitForm(args.form)
    lines = ["model,theta,p,form,a,a_err,b,b_err,c,c_err,residual_norm"]
    for (model, theta, p), pts in sorted(groups.items()):
        fit = fit_power_law(pts, form)
        lines.append(",".join(_fmt(v) for v in (
            model, theta, p, form.value, fit.a_fit, fit.a_err,
            fit.b_fit, fit.b_err, fit.c_fit, fit.c_err, fit.residual_norm,
        )))
    _emit(lines, args.out)
    return 0


def cmd_minima(args) -> int:
    thetas = sorted(parse_list(args.theta, parse_angle))
    _check_bounds(thetas, "theta", 0.0, math.pi / 2)
    if not 0.0 < args.z <= genfun.Z_CAP:
        raise _UsageError(f"z={args.z} outside (0, {genfun.Z_CAP}]")
    lines = ["model,theta,z,nmax,p_min,r_min,lo_1e2,hi_1e2,lo_1e3,hi_1e3,monotone"]
    for theta in thetas:
        def profile(p, _theta=theta):
            return genfun.recurrence_estimate(
                WalkParams(_theta, p, Model(args.model)), args.z, n_max=args.nmax,
                grid_n=args.grid,
            )
        est = find_minimum(profile, iterations=args.iterations)
        lines.append(",".join(_fmt(v) for v in (
            args.model, theta, args.z, args.nmax, est.p_min, est.r_min,
            est.interval_1e2[0], est.interval_1e2[1],
            est.interval_1e3[0], est.interval_1e3[1],
            int(est.monotone),
        )))
    _emit(lines, args.out)
    return 0


def cmd_oracle(args) -> int:
    lines = []
    if args.which == "eq20":
        thetas = sorted(parse_list(args.theta, parse_angle))
        lines.append("theta,value")
        for theta in thetas:
            lines.append(f"{_fmt(theta)},{_fmt(oracles.recurrence_unitary(theta))}")
    elif args.which == "pihalf":
        _, q_mat = oracles.pi_half_genfun(args.zvalue, args.pvalue)
        lines.append("z,p,q_rr,q_rl,q_lr,q_ll")
        lines.append(",".join(_fmt(v) for v in (
            args.zvalue, args.pvalue,
            q_mat[0, 0], q_mat[0, 1], q_mat[1, 0], q_mat[1, 1],
        )))
    else:  # catalan
        ms = sorted(parse_list(args.m, int))
        lines.append("m,value")
        for m in ms:
            lines.append(f"{m},{_fmt(oracles.classical_first_return(m))}")
    _emit(lines, args.out)
    return 0


def _load_config(path: str) -> dict:
    config = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise _UsageError(f"bad config line: {line!r}")
                key, _, value = line.partition("=")
                config[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise _UsageError(f"cannot read config {path}: {exc}") from exc
    return config


def build_parser() -> _Parser:
    parser = _Parser(prog="dtqsw", description=__doc__)
    parser.add_argument("--config", help="key=value file mirroring the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--model", choices=["balanced", "correlated"],
                       default="balanced")
        p.add_argument("--out", help="output CSV path (default stdout)")

    p_recur = sub.add_parser("recur", help="generating-function recurrence sweep")
    common(p_recur)
    p_recur.add_argument("--theta", required=True)
    p_recur.add_argument("--p", required=True)
    p_recur.add_argument("--z", help="default: the ten standard samples")
    p_recur.add_argument("--nmax", type=int, default=20)
    p_recur.add_argument("--grid", type=int, default=1024)
    p_recur.add_argument("--jobs", type=int, default=1)

    p_evolve = sub.add_parser("evolve", help="direct monitored evolution series")
    common(p_evolve)
    p_evolve.add_argument("--theta", required=True)
    p_evolve.add_argument("--p", required=True)
    p_evolve.add_argument("--tmax", type=int, required=True)
    p_evolve.add_argument("--coin", choices=["R", "L", "mixed"], default="R")

    p_slope = sub.add_parser("slope", help="first derivative B_t at p=0")
    common(p_slope)
    p_slope.add_argument("--theta", required=True)
    p_slope.add_argument("--t", required=True)

    p_fit = sub.add_parser("fit", help="power-law fit of a recur CSV")
    common(p_fit)
    p_fit.add_argument("--input", required=True)
    p_fit.add_argument("--form", choices=["aminusb", "oneminusb"],
                       default="aminusb")

    p_min = sub.add_parser("minima", help="minimum of the recurrence over p")
    common(p_min)
    p_min.add_argument("--theta", required=True)
    p_min.add_argument("--z", type=float, default=0.99999)
    p_min.add_argument("--nmax", type=int, default=20)
    p_min.add_argument("--grid", type=int, default=1024)
    p_min.add_argument("--iterations", type=int, default=15)

    p_orc = sub.add_parser("oracle", help="closed-form reference values")
    common(p_orc)
    p_orc.add_argument("--which", choices=["eq20", "pihalf", "catalan"],
                       required=True)
    p_orc.add_argument("--theta", default="0.25pi")
    p_orc.add_argument("--zvalue", type=float, default=0.999)
    p_orc.add_argument("--pvalue", type=float, default=0.5)
    p_orc.add_argument("--m", default="2,4,6")
    return parser


_COMMANDS = {
    "recur": cmd_recur,
    "evolve": cmd_evolve,
    "slope": cmd_slope,
    "fit": cmd_fit,
    "minima": cmd_minima,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        if argv is None:
            argv = sys.argv[1:]
        if "--config" in argv:
            idx = argv.index("--config")
            config = _load_config(argv[idx + 1])
            # flags override the file: apply config as parser defaults
            parser.set_defaults(**config)
            for p in parser._subparsers._group_actions[0].choices.values():
                known = {a.dest for a in p._actions}
                p.set_defaults(**{k: v for k, v in config.items() if k in known})
        args = parser.parse_args(argv)
        for key in ("nmax", "grid", "tmax", "jobs", "iterations"):
            if hasattr(args, key) and isinstance(getattr(args, key), str):
                setattr(args, key, int(getattr(args, key)))
        for key in ("z", "zvalue", "pvalue"):
            if hasattr(args, key) and isinstance(getattr(args, key), str) \
                    and key != "z":
                setattr(args, key, float(getattr(args, key)))
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except DtqswError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
