"""Command-line interface: ``forest-sense <command> [options]``.

Exit status: 0 success, 1 usage error, 2 numeric failure, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import analytic as an
from . import experiments as ex
from . import montecarlo as mc
from .analytic import EventModel, NetworkModel
from .quadrature import QuadratureError
from .tables import CurveTable

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3
SEED_ENV = "FOREST_SENSE_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- serializers

def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.9g}"


def to_csv(table: CurveTable) -> str:
    lines = [",".join(table.columns)]
    lines += [",".join(_fmt(v) for v in row) for row in table.rows]
    return "\n".join(lines) + "\n"


def _json_num(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(_fmt(x))


def to_json(table: CurveTable) -> str:
    doc = {"columns": table.columns, "rows": [[_json_num(v) for v in row] for row in table.rows]}
    return json.dumps(doc) + "\n"


def serialize(table: CurveTable, fmt: str) -> str:
    return to_csv(table) if fmt == "csv" else to_json(table)


# -------------------------------------------------------------------- parsing

def _float_list(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("expected at least one number")
    return vals


def _common(p: argparse.ArgumentParser, network=True, event=False, grid=True, sampling=False):
    if network:
        p.add_argument("--rd", type=float, default=10.0, help="forest radius")
        p.add_argument("--m", type=float, default=10.0, help="mean number of sensors")
        p.add_argument("--rs", type=float, default=1.0, help="sensing radius")
    if event:
        p.add_argument("--vf", type=float, default=1.0, help="envelope expansion speed")
    if grid:
        p.add_argument("--grid-min", type=float, default=None)
        p.add_argument("--grid-max", type=float, default=None)
        p.add_argument("--grid-points", type=int, default=ex.DEFAULT_POINTS)
    if sampling:
        p.add_argument("--samples", type=int, default=ex.DEFAULT_SAMPLES)
        p.add_argument("--seed", type=int, default=None, help=f"master seed (fallback: ${SEED_ENV}, then 0)")
        p.add_argument("--shards", type=int, default=os.cpu_count() or 1)
    p.add_argument("--config", default=None, help="JSON file with default values for these flags")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="forest-sense", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    _common(sub.add_parser("cdf", help="contact-distance CDF"))
    _common(sub.add_parser("bounds", help="contact-distance CDF with bounds and closed forms"))
    _common(sub.add_parser("sense", help="event-sensing probability over time"), event=True)
    _common(sub.add_parser("coverage", help="coverage probability of a random point"), grid=False)

    p = sub.add_parser("mc", help="Monte Carlo estimates")
    p.add_argument("what", choices=("cdf", "nn", "sense"))
    _common(p, event=True, sampling=True)

    p = sub.add_parser("sweep-range", help="sensing probability for several sensing radii")
    p.add_argument("--rs-list", type=_float_list, default=[1.0, 2.0, 4.0])
    _common(p, event=True, sampling=True)
    p.set_defaults(rd=40.0, m=40.0, vf=0.5, samples=0)

    p = sub.add_parser("tradeoff", help="sensor count vs. sensing radius at fixed total area")
    p.add_argument("--total-area", type=float, default=40.0)
    p.add_argument("--m-list", type=_float_list, default=[5.0, 10.0, 20.0, 40.0])
    p.add_argument("--t", type=float, default=10.0, help="critical time")
    _common(p, event=True, grid=False, sampling=True)
    p.set_defaults(rd=40.0, vf=0.5, samples=0)

    p = sub.add_parser("fig", help="reproduce a named figure preset")
    p.add_argument("name", choices=sorted(ex.PRESETS))
    p.add_argument("--grid-points", type=int, default=ex.DEFAULT_POINTS)
    _common(p, network=False, grid=False, sampling=True)
    return parser


def _apply_config(parser, argv):
    """Re-parse with values from ``--config`` as defaults so explicit flags win."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"--config: cannot read {args.config!r}: {exc}")
    if not isinstance(cfg, dict):
        raise UsageError("--config: expected a JSON object")
    known = set(vars(args))
    defaults = {}
    for key, val in cfg.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in known or dest in ("command", "config"):
            raise UsageError(f"--config: unknown key {key!r}")
        if dest in ("rs_list", "m_list") and isinstance(val, str):
            val = _float_list(val)
        defaults[dest] = val
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _validate(args):
    def need(cond, flag, msg):
        if not cond:
            raise UsageError(f"{flag}: {msg}")

    def number(name):
        val = getattr(args, name, None)
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise UsageError(f"--{name.replace('_', '-')}: expected a number, got {val!r}")
        return float(val)

    if hasattr(args, "rd"):
        need(math.isfinite(number("rd")) and args.rd > 0, "--rd", "must be a positive number")
        need(math.isfinite(number("m")) and args.m >= 0, "--m", "must be non-negative")
        need(math.isfinite(number("rs")) and args.rs >= 0, "--rs", "must be non-negative")
    if hasattr(args, "vf"):
        need(math.isfinite(number("vf")) and args.vf >= 0, "--vf", "must be non-negative")
    if hasattr(args, "grid_points"):
        need(isinstance(args.grid_points, int) and args.grid_points >= 1, "--grid-points", "must be >= 1")
    for name in ("grid_min", "grid_max"):
        if getattr(args, name, None) is not None:
            need(number(name) >= 0, f"--{name.replace('_', '-')}", "must be non-negative")
    if getattr(args, "grid_min", None) is not None and getattr(args, "grid_max", None) is not None:
        need(args.grid_max > args.grid_min or args.grid_points == 1, "--grid-max", "must exceed --grid-min")
    if hasattr(args, "samples"):
        need(isinstance(args.samples, int) and args.samples >= 0, "--samples", "must be a non-negative integer")
        need(isinstance(args.shards, int) and args.shards >= 1, "--shards", "must be >= 1")
        if args.seed is None:
            env = os.environ.get(SEED_ENV)
            try:
                args.seed = int(env) if env else 0
            except ValueError:
                raise UsageError(f"${SEED_ENV}: expected an integer, got {env!r}")
        need(isinstance(args.seed, int) and 0 <= args.seed < 2**64, "--seed", "must be a 64-bit unsigned integer")
    for name in ("rs_list", "m_list"):
        if hasattr(args, name):
            vals = getattr(args, name)
            need(all(v >= 0 and math.isfinite(v) for v in vals), f"--{name.replace('_', '-')}", "values must be non-negative")
    if hasattr(args, "m_list"):
        need(all(v > 0 for v in args.m_list), "--m-list", "values must be positive")
        need(args.total_area >= 0, "--total-area", "must be non-negative")
        need(args.t >= 0, "--t", "must be non-negative")
    if args.command == "mc":
        need(args.samples >= 1, "--samples", "must be >= 1 for mc")
        if args.what == "sense":
            need(args.grid_max is not None or args.vf > 0, "--vf", "must be positive unless --grid-max is given")
    if args.command == "sense":
        need(args.grid_max is not None or args.vf > 0, "--vf", "must be positive unless --grid-max is given")
    return args


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse and validate ``argv``; raises :class:`UsageError` on bad input."""
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    return _validate(_apply_config(parser, argv))


# ---------------------------------------------------------------------- run

def _grid(args, lo_default: float, hi_default: float) -> np.ndarray:
    lo = lo_default if args.grid_min is None else args.grid_min
    hi = hi_default if args.grid_max is None else args.grid_max
    if args.grid_points == 1:
        return np.array([lo])
    if hi <= lo:
        raise UsageError("--grid-max: must exceed --grid-min")
    return np.linspace(lo, hi, args.grid_points)


def _net(args) -> NetworkModel:
    return NetworkModel(args.rd, args.m, args.rs)


def _t_grid(args, net, ev):
    hi = max(2 * net.r_d - net.r_S, 0.0) / ev.v_F if ev.v_F > 0 else 1.0
    return _grid(args, 0.0, hi or 1.0)


def _seed(args):
    return mc.SeedSpec(args.seed, args.shards)


def build_table(args) -> CurveTable:
    cmd = args.command
    if cmd == "fig":
        return ex.run_preset(args.name, args.samples, _seed(args), args.grid_points)
    if cmd == "tradeoff":
        net = NetworkModel(args.rd, args.m, args.rs)
        spec = ex.ExperimentSpec(net, EventModel(args.vf), None, args.samples, _seed(args))
        return ex.run_tradeoff(args.total_area, args.m_list, spec, args.t)
    net = _net(args)
    if cmd == "coverage":
        return CurveTable(["rs", "coverage"], [(net.r_S, an.coverage_prob(net))])
    if cmd in ("cdf", "bounds"):
        grid = _grid(args, 0.0, 2 * net.r_d)
        cols = {"r": grid, "cdf": [an.contact_cdf(r, net) for r in grid]}
        if cmd == "bounds":
            cols["upper"] = [an.contact_cdf_upper(r, net) for r in grid]
            cols["lower"] = [an.contact_cdf_lower(r, net) for r in grid]
            cols["loose_upper"] = [an.contact_cdf_loose_upper(r, net) for r in grid]
            cols["upper_closed_form"] = [an.contact_cdf_upper_closed_form(r, net) for r in grid]
            cols["lower_closed_form"] = [an.contact_cdf_lower_closed_form(r, net) for r in grid]
        return CurveTable.from_columns(cols)
    ev = EventModel(args.vf)
    if cmd == "sense":
        grid = _t_grid(args, net, ev)
        spec = ex.ExperimentSpec(net, ev, tuple(grid), 0)
        return ex.run_sensing_curve(spec)
    if cmd == "sweep-range":
        spec = ex.ExperimentSpec(net, ev, None, args.samples, _seed(args))
        if args.grid_min is not None or args.grid_max is not None or args.grid_points != ex.DEFAULT_POINTS:
            probe = NetworkModel(net.r_d, net.m, min(args.rs_list))
            spec = ex.ExperimentSpec(net, ev, tuple(_t_grid(args, probe, ev)), args.samples, _seed(args))
        return ex.run_range_sweep(spec, args.rs_list)
    # mc
    if args.what == "sense":
        return mc.empirical_sensing_prob(net, ev, _t_grid(args, net, ev), args.samples, _seed(args))
    grid = _grid(args, 0.0, 2 * net.r_d)
    if args.what == "nn":
        return mc.empirical_nn_cdf(net, grid, args.samples, _seed(args))
    return mc.empirical_contact_cdf(net, grid, args.samples, _seed(args))


def run(args) -> int:
    """Execute a parsed config, writing the table to ``args.out``; returns the exit status."""
    try:
        text = serialize(build_table(args), args.format)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        if args.out == "-":
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            with io.open(args.out, "w", newline="\n") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(format="warning: %(message)s", level=logging.WARNING)
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
