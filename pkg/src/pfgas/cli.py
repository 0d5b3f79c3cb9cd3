"""Command-line interface: ``pfgas <command> [options]``.

Every command produces a table (column names plus rows) that is written as
CSV or as JSON with a metadata block.  Exit codes: 0 success, 2 usage or
parameter error, 3 numeric or region error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import metadata

import numpy as np

from . import finite_kernel as fk
from . import limit_kernels as lk
from .errors import ParameterError, PfgasError, ShapeError
from .gap import REGIONS, gap_constants, gap_table, log_gap
from .model import make_params
from .sampler import ChainConfig, radial_hist, sample_chain

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


class Table:
    def __init__(self, columns, rows, params=None, axes=None, extra=None):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.params = params or {}
        self.axes = axes
        self.extra = extra or {}


# ---------------------------------------------------------------- parsing helpers

def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _complexes(text: str) -> list[complex]:
    try:
        return [complex(x.replace(" ", "")) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected complex numbers like 0.1+0.5j, got {text!r}") from exc


def _grid(text: str) -> dict:
    parts = text.split(",")
    if len(parts) != 6:
        raise argparse.ArgumentTypeError("grid is re0,re1,nre,im0,im1,nim")
    try:
        re0, re1, im0, im1 = float(parts[0]), float(parts[1]), float(parts[3]), float(parts[4])
        nre, nim = int(parts[2]), int(parts[5])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc
    if nre < 1 or nim < 1:
        raise argparse.ArgumentTypeError("grid counts must be positive")
    return {"re0": re0, "re1": re1, "nre": nre, "im0": im0, "im1": im1, "nim": nim}


def _grid_points(g: dict) -> list[complex]:
    """Row-major: imaginary part outer, real part inner."""
    xs = np.linspace(g["re0"], g["re1"], g["nre"])
    ys = np.linspace(g["im0"], g["im1"], g["nim"])
    return [complex(x, y) for y in ys for x in xs]


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    else:
        env = os.environ.get("PFGAS_THREADS")
        if env is None:
            return 1
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"PFGAS_THREADS must be a positive integer, got {env!r}")
    if n < 1:
        raise UsageError("thread count must be a positive integer")
    return n


def _map(fn, items, threads: int) -> list:
    """Ordered map; output order never depends on scheduling."""
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- commands

def cmd_params(args) -> Table:
    d = make_params(args.n, args.rho).to_dict()
    return Table(list(d), [list(d.values())], params={"n": args.n, "rho": args.rho})


def _points_arg(args) -> list[complex]:
    extra = args.points or []
    if len(extra) != args.k - 1:
        raise UsageError(f"--k {args.k} needs {args.k - 1} fixed points in --points, got {len(extra)}")
    return extra


def cmd_kernel_finite(args) -> Table:
    p = make_params(args.n, args.rho)
    theta, offset = _angle(args, p.n, p.rho)
    extra = _points_arg(args)
    pts = _grid_points(args.grid)
    vals = _map(lambda z: fk.corr_finite(p, theta, [z, *extra]), pts, _threads(args))
    return Table(["re", "im", "value"], [[z.real, z.imag, v] for z, v in zip(pts, vals)],
                 params={"n": args.n, "rho": args.rho, "theta": theta, "t": offset, "k": args.k,
                         "points": [[z.real, z.imag] for z in extra]},
                 axes=args.grid)


def cmd_kernel_limit(args) -> Table:
    bp = lk.bulk_params(args.rho, args.t)
    pts = _grid_points(args.grid)
    which = args.which
    if which == "c":
        fn = lambda z: lk.corr_limit_c(bp, [z])
    elif which == "r":
        fn = lambda z: lk.corr_limit_r(bp, [z])
    elif which == "w":
        fn = lambda z: lk.corr_limit_w([z + 1j * args.t])
    elif which in ("chiral", "sine"):
        fn = lambda z: lk.reference_kernel(which, z.real, z.imag)
    else:
        fn = lambda z: lk.reference_kernel("exp", z, args.w)
    vals = _map(fn, pts, _threads(args))
    if which == "exp":
        cols = ["re", "im", "value_re", "value_im"]
        rows = [[z.real, z.imag, complex(v).real, complex(v).imag] for z, v in zip(pts, vals)]
    else:
        cols = ["re", "im", "value"]
        rows = [[z.real, z.imag, float(v)] for z, v in zip(pts, vals)]
    return Table(cols, rows, params={"which": which, "rho": args.rho, "t": args.t}, axes=args.grid)


def _angle(args, n: int, rho: float) -> tuple[float, float | None]:
    if args.t is not None:
        return math.sqrt(2.0) * rho * args.t / n + (math.pi if args.flip else 0.0), args.t
    return args.theta, None


def cmd_converge(args) -> Table:
    extra = _points_arg(args)
    pts = _grid_points(args.grid)
    threads = _threads(args)
    if args.t is not None:
        bp = lk.bulk_params(args.rho, args.t)
        limit = _map(lambda z: lk.corr_limit_r(bp, [z, *extra]), pts, threads)
    else:
        if abs(math.sin(args.theta)) < 1e-12:
            raise UsageError("--theta on the real axis needs --t instead")
        bp = lk.bulk_params(args.rho)
        limit = _map(lambda z: lk.corr_limit_c(bp, [z, *extra]), pts, threads)
    rows = []
    for n in args.n_list:
        p = make_params(n, args.rho)
        theta, _ = _angle(args, n, args.rho)
        vals = _map(lambda z: fk.corr_finite(p, theta, [z, *extra]), pts, threads)
        rows.append([n, max(abs(v - l) for v, l in zip(vals, limit))])
    return Table(["n", "sup_diff"], rows,
                 params={"rho": args.rho, "theta": args.theta, "t": args.t, "k": args.k,
                         "flip": args.flip, "points": [[z.real, z.imag] for z in extra]},
                 axes=args.grid)


def _disc_points(rng, count: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(count))
    return r * np.exp(2j * np.pi * rng.random(count))


def cmd_cd_check(args) -> Table:
    p = make_params(args.n, args.rho)
    rng = np.random.Generator(np.random.PCG64(args.seed))
    zs = _disc_points(rng, args.samples, args.radius)
    ws = _disc_points(rng, args.samples, args.radius)
    res = _map(lambda zw: fk.cd_residual(p, args.theta, *zw), list(zip(zs, ws)), _threads(args))
    rows = [[z.real, z.imag, w.real, w.imag, r] for z, w, r in zip(zs, ws, res)]
    return Table(["z_re", "z_im", "w_re", "w_im", "residual"], rows,
                 params={"n": args.n, "rho": args.rho, "theta": args.theta, "samples": args.samples,
                         "seed": args.seed, "radius": args.radius},
                 extra={"max_residual": max(res) if res else 0.0})


def cmd_gap(args) -> Table:
    r = log_gap(make_params(args.n, args.rho), args.region)
    return Table(["rho", "region", "n", "log_p", "term_count"],
                 [[r.rho, r.region, r.n, r.log_p, r.term_count]],
                 params={"n": args.n, "rho": args.rho, "region": args.region})


def cmd_gap_constants(args) -> Table:
    rows = [[rho, *gap_constants(rho)] for rho in args.rho_list]
    return Table(["rho", "c1", "c1_tilde", "c0"], rows, params={"rho_list": args.rho_list})


def cmd_gap_table(args) -> Table:
    cols = ["rho", "region", "n", "log_p", "n_times_c", "o1_pred", "residual"]
    rows = [[row[c] for c in cols] for row in gap_table(args.n, args.rho_list)]
    return Table(cols, rows, params={"n": args.n, "rho_list": args.rho_list})


def cmd_sample(args) -> Table:
    p = make_params(args.n, args.rho)
    cfg = ChainConfig(steps=args.steps, burn_in=args.burn_in, proposal_sigma=args.sigma,
                      seed=args.seed, thin=args.thin)
    s = sample_chain(p, cfg)
    params = {"n": args.n, "rho": args.rho, "steps": args.steps, "burn_in": args.burn_in,
              "sigma": args.sigma, "seed": args.seed, "thin": args.thin}
    extra = {"acceptance_rate": s.acceptance_rate}
    if args.hist:
        edges, mass = radial_hist(s, args.hist)
        rows = [[lo, hi, m] for lo, hi, m in zip(edges[:-1], edges[1:], mass)]
        return Table(["bin_lo", "bin_hi", "mass"], rows, params=params, extra=extra)
    rows = [[int(sw), j, z.real, z.imag] for sw, cfg_ in zip(s.sweeps, s.configs) for j, z in enumerate(cfg_)]
    return Table(["sweep_index", "j", "re", "im"], rows, params=params, extra=extra)


# ---------------------------------------------------------------- output

def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def render(table: Table, fmt: str, command: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()
    try:
        version = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        version = "unknown"
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    meta = {"command": command, "params": table.params, "version": version,
            "timestamp": int(epoch) if epoch and epoch.isdigit() else None}
    meta.update({k: _json_value(v) for k, v in table.extra.items()})
    doc = {"meta": meta, "axes": table.axes, "columns": table.columns,
           "rows": [[_json_value(v) for v in row] for row in table.rows]}
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: $PFGAS_THREADS or 1)")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="pfgas", description="Kernels, gap probabilities and samples of a planar Pfaffian point process "
                                     "confined to a thin annulus")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn, command_name=name)
        return sp

    def n_rho(sp):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--rho", type=float, required=True)

    sp = add("params", cmd_params, "derived model constants")
    n_rho(sp)

    kern = sub.add_parser("kernel", help="kernel or correlation grids")
    ksub = kern.add_subparsers(dest="kind", required=True)
    sp = ksub.add_parser("finite", parents=[common], help="finite-N rescaled correlation on a grid")
    sp.set_defaults(func=cmd_kernel_finite, command_name="kernel finite")
    n_rho(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta", type=float)
    g.add_argument("--t", type=float)
    sp.add_argument("--flip", action="store_true", help="with --t, use the base point -e^{i theta_N}")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--grid", type=_grid, required=True)
    sp.add_argument("--points", type=_complexes, default=None, help="the k-1 fixed extra points")

    sp = ksub.add_parser("limit", parents=[common], help="limiting kernel or correlation on a grid")
    sp.set_defaults(func=cmd_kernel_limit, command_name="kernel limit")
    sp.add_argument("--which", choices=("c", "r", "w", "chiral", "sine", "exp"), required=True)
    sp.add_argument("--rho", type=float, default=1.0)
    sp.add_argument("--t", type=float, default=0.0)
    sp.add_argument("--w", type=complex, default=0j, help="second argument of the exp kernel")
    sp.add_argument("--grid", type=_grid, required=True)

    sp = add("converge", cmd_converge, "sup-norm distance of finite-N correlations to their limit")
    sp.add_argument("--n-list", type=_ints, required=True)
    sp.add_argument("--rho", type=float, required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta", type=float)
    g.add_argument("--t", type=float)
    sp.add_argument("--flip", action="store_true")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--grid", type=_grid, required=True)
    sp.add_argument("--points", type=_complexes, default=None)

    sp = add("cd-check", cmd_cd_check, "Christoffel-Darboux residuals at random points")
    n_rho(sp)
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--radius", type=float, default=2.0)

    sp = add("gap", cmd_gap, "exact log gap probability")
    n_rho(sp)
    sp.add_argument("--region", choices=REGIONS, required=True)

    sp = add("gap-constants", cmd_gap_constants, "asymptotic gap constants")
    sp.add_argument("--rho-list", type=_floats, required=True)

    sp = add("gap-table", cmd_gap_table, "exact gaps against their asymptotics")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--rho-list", type=_floats, required=True)

    sp = add("sample", cmd_sample, "Metropolis point clouds")
    n_rho(sp)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--burn-in", type=int, default=0)
    sp.add_argument("--sigma", type=float, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--thin", type=int, default=1)
    sp.add_argument("--hist", type=int, default=None, help="emit a radial histogram with this many bins")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        table = args.func(args)
        text = render(table, args.format, args.command_name)
    except (UsageError, ParameterError, ShapeError) as exc:
        print(f"pfgas: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PfgasError as exc:
        print(f"pfgas: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
