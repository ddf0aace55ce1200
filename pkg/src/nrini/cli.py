"""Command-line front end: sweep data and tables as CSV or JSON.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 guard-band
search horizon exceeded.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import re
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__
from .analytic import (
    EVALUATORS,
    InterferencePair,
    mse_multi_tone,
    mse_rb_average,
    rejection_db,
    scale_invariance_residual,
)
from .guardband import DEFAULT_HORIZON_BINS, HorizonExceededError, guard_band_vs_interferer_curve
from .numerology import BIN_KHZ, MU_MAX, MU_MIN, SUBCARRIERS_PER_RB, NumerologyError
from .scenario import (
    DIRECTIONS,
    REDUCTIONS,
    ScenarioHorizonError,
    ServiceSpec,
    load_scenario,
    plan_scenario,
)
from .waveform import CONSTELLATIONS, simulate_sweep, z_score

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_HORIZON = 0, 1, 2, 3
TABLE_TARGETS = (25.0, 30.0, 40.0)
TABLE_RBS = (5, 10, 25)
TABLE_MUS = (0, 1, 2)

_OFFSET_RE = re.compile(r"^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(bins|sc|rb|khz)\s*$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_offset(text: str, mu_u: int) -> float:
    """``'12sc'`` -> bins. Units: bins, sc / rb (victim numerology), khz."""
    m = _OFFSET_RE.match(text)
    if not m:
        raise UsageError(f"offset {text!r} needs a unit suffix: bins, sc, rb or khz (e.g. 12sc)")
    value, unit = float(m.group(1)), m.group(2)
    if unit == "bins":
        return value
    if unit == "sc":
        return value * (1 << mu_u)
    if unit == "rb":
        return value * SUBCARRIERS_PER_RB * (1 << mu_u)
    return value / BIN_KHZ


def _grid(args) -> np.ndarray:
    start = parse_offset(args.gb_start, args.mu_u)
    stop = parse_offset(args.gb_stop, args.mu_u)
    step = parse_offset(args.gb_step, args.mu_u)
    if step <= 0 or stop < start:
        raise UsageError(f"empty guard-band range {args.gb_start}..{args.gb_stop} step {args.gb_step}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _json_safe(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_json_safe(v) for v in x]
    return x


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}


def write_table(args, columns, rows, units: dict, summary: dict | None = None) -> None:
    header = {"tool": "nrini", "version": __version__, "command": args.command,
              "seed": getattr(args, "seed", None), "params": _params(args), "units": units}
    buf = io.StringIO()
    if args.format == "json":
        doc = {"header": header, "records": [dict(zip(columns, r)) for r in rows]}
        if summary is not None:
            doc["summary"] = summary
        json.dump(_json_safe(doc), buf, indent=2, sort_keys=True)
        buf.write("\n")
    else:
        buf.write(f"# nrini {__version__} {args.command}\n")
        buf.write(f"# seed: {header['seed']}\n")
        buf.write(f"# params: {json.dumps(_json_safe(header['params']), sort_keys=True)}\n")
        for col, unit in units.items():
            buf.write(f"# unit {col}: {unit}\n")
        buf.write(",".join(columns) + "\n")
        for r in rows:
            buf.write(",".join(_fmt(v) for v in r) + "\n")
        if summary is not None:
            buf.write(f"# summary: {json.dumps(_json_safe(summary), sort_keys=True)}\n")
    with _open_out(args.out) as fh:
        fh.write(buf.getvalue())


@contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


GB_UNITS = {
    "gb_bins": "base-grid bins of 15 kHz",
    "gb_khz": "kHz",
    "gb_user_subcarriers": "victim (mu_u) subcarriers",
}


def cmd_mse_sweep(args) -> int:
    pair = InterferencePair(args.mu_i, args.mu_u)
    g = _grid(args)
    if args.metric == "rb-average":
        mse = np.atleast_1d(mse_rb_average(pair, args.n_int, g, args.evaluator))
    else:
        mse = np.atleast_1d(mse_multi_tone(pair, args.n_int, g, args.evaluator))
    rows = [
        (float(gb), float(gb) * BIN_KHZ, float(gb) / (1 << pair.mu_u), float(m),
         float(rejection_db(m)), args.evaluator)
        for gb, m in zip(g, mse)
    ]
    units = dict(GB_UNITS, mse_linear="interference power / symbol power",
                 rejection_db="-10 log10(mse_linear)")
    write_table(args, ["gb_bins", "gb_khz", "gb_user_subcarriers", "mse_linear",
                       "rejection_db", "evaluator"], rows, units)
    return EXIT_OK


def cmd_verify(args) -> int:
    pair = InterferencePair(args.mu_i, args.mu_u)
    g = _grid(args)
    if np.any(g != np.round(g)):
        raise UsageError("verify needs guard bands on whole base-grid bins")
    try:
        points = simulate_sweep(pair, args.n_int, g.astype(int), args.n_symbols, args.seed,
                                args.constellation)
    except NumerologyError as exc:
        raise UsageError(str(exc)) from exc
    analytic = np.atleast_1d(mse_multi_tone(pair, args.n_int, g, args.evaluator))
    rows, n_fail = [], 0
    for p, a in zip(points, analytic):
        z = z_score(float(a), p.mse, p.stderr)
        ok = abs(z) <= 3.0
        n_fail += not ok
        rows.append((float(p.gb_bins), p.gb_bins * BIN_KHZ, float(a), p.mse, p.stderr, z,
                     "pass" if ok else "fail"))
    frac = n_fail / len(rows)
    zs = np.array([r[5] for r in rows])
    summary = {"points": len(rows), "failed": n_fail, "fail_fraction": frac,
               "mean_z": float(zs.mean()), "max_abs_z": float(np.abs(zs).max()),
               "verdict": "pass" if frac <= 0.01 else "fail"}
    units = {"gb_bins": GB_UNITS["gb_bins"], "gb_khz": "kHz",
             "analytic": f"MSE from the {args.evaluator} evaluator",
             "mc_mse": "Monte Carlo MSE", "mc_stderr": "standard error of mc_mse",
             "z": "(mc_mse - analytic) / mc_stderr"}
    write_table(args, ["gb_bins", "gb_khz", "analytic", "mc_mse", "mc_stderr", "z", "status"],
                rows, units, summary)
    return EXIT_OK if frac <= 0.01 else EXIT_VERIFY


def cmd_gb_curve(args) -> int:
    pair = InterferencePair(args.mu_i, args.mu_u)
    horizon = parse_offset(args.horizon, args.mu_u)
    reqs = guard_band_vs_interferer_curve(pair, args.target_db, args.n_int, horizon=horizon,
                                          refine=args.refine)
    rows = [(r.n_int, r.user_subcarriers, r.min_gb.khz, r.achieved_rejection_db) for r in reqs]
    units = {"n_int": f"interferer (mu={pair.mu_i}) subcarriers",
             "min_gb_user_subcarriers": f"victim (mu={pair.mu_u}) subcarriers",
             "min_gb_khz": "kHz", "achieved_rejection_db": "-10 log10(MSE) at min_gb"}
    write_table(args, ["n_int", "min_gb_user_subcarriers", "min_gb_khz",
                       "achieved_rejection_db"], rows, units)
    return EXIT_OK


def _parse_services(text: str) -> list[ServiceSpec]:
    out = []
    for item in text.split(","):
        try:
            mu, n_rb = item.split(":")
            out.append(ServiceSpec(int(mu), int(n_rb)))
        except ValueError as exc:
            raise UsageError(f"services must look like 0:5,1:5,2:5, got {text!r}") from exc
    return out


def cmd_scenario(args) -> int:
    jobs: list[tuple[str, list[ServiceSpec], float]] = []
    if not args.no_table:
        for t in TABLE_TARGETS:
            for n in TABLE_RBS:
                jobs.append(("table", [ServiceSpec(m, n) for m in TABLE_MUS], t))
    if args.file:
        services, target = load_scenario(args.file)
        jobs.append(("file", services, target))
    if args.services:
        if args.target_db is None:
            raise UsageError("--services needs --target-db")
        jobs.append(("user", _parse_services(args.services), args.target_db))
    if not jobs:
        raise UsageError("nothing to plan: drop --no-table or pass --file/--services")

    horizon = parse_offset(args.horizon, 0)
    plans = [(label, plan_scenario(s, t, args.direction, args.reduction, horizon))
             for label, s, t in jobs]
    units = {"bandwidths": "kHz", "efficiency": "service bandwidth / total bandwidth"}
    if args.format == "json":
        rows = [(label, p.to_dict()) for label, p in plans]
        write_table(args, ["source", "plan"], rows, units)
        return EXIT_OK
    rows = []
    for label, p in plans:
        rows.append((
            label,
            " ".join(f"{s.mu}:{s.n_rb}" for s in p.services),
            p.target_rejection_db,
            " ".join(f"{g:.3f}" for g in p.guard_bands_khz),
            f"{p.guard_total_khz:.3f}",
            f"{p.service_bandwidth_khz:.3f}",
            f"{p.total_bandwidth_khz:.3f}",
            f"{100 * p.efficiency:.3f}",
        ))
    write_table(args, ["source", "services_mu_nrb", "target_db", "guard_bands_khz",
                       "guard_total_khz", "service_khz", "total_bandwidth_khz",
                       "efficiency_pct"], rows, units)
    return EXIT_OK


def approx_combos(mu_i=None, mu_u=None):
    for a in range(MU_MIN, MU_MAX + 1):
        for b in range(MU_MIN, MU_MAX + 1):
            if (mu_i is not None and a != mu_i) or (mu_u is not None and b != mu_u):
                continue
            for alpha in range(1, MU_MAX + 1 - max(a, b)):
                yield a, b, alpha


def approx_residual(mu_i, mu_u, alpha, n_int=12, points=200, evaluator="exact"):
    """Residual over ``points`` guard bands of 1, 2, ... victim subcarriers."""
    pair = InterferencePair(mu_i, mu_u)
    grid = (1 << mu_u) * np.arange(1, points + 1)
    return scale_invariance_residual(pair, n_int, alpha, grid, evaluator)


def cmd_approx_check(args) -> int:
    rows, worst = [], 0.0
    for a, b, alpha in approx_combos(args.mu_i, args.mu_u):
        try:
            r = approx_residual(a, b, alpha, args.n_int, args.points, args.evaluator)
            status = "ok" if r <= args.tolerance_db else "over"
        except NumerologyError:
            r, status = math.inf, "grid-exceeds-band"
        worst = max(worst, r)
        rows.append((a, b, alpha, a + alpha, b + alpha, r, status))
    units = {"max_residual_db": "max |10 log10(MSE shifted / MSE reference)| on the grid",
             "grid": f"{args.points} guard bands of 1..{args.points} victim subcarriers"}
    summary = {"combinations": len(rows), "max_residual_db": worst,
               "over_tolerance": sum(r[-1] != "ok" for r in rows)}
    write_table(args, ["mu_i", "mu_u", "alpha", "shifted_mu_i", "shifted_mu_u",
                       "max_residual_db", "status"], rows, units, summary)
    return EXIT_OK if summary["over_tolerance"] == 0 else EXIT_VERIFY


def _mu(text):
    v = int(text)
    if not MU_MIN <= v <= MU_MAX:
        raise argparse.ArgumentTypeError(f"numerology must be in {MU_MIN}..{MU_MAX}")
    return v


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("interferer sizes must be >= 1")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nrini", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"nrini {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, pair=True, mu_required=True):
        if pair:
            sp.add_argument("--mu-i", type=_mu, required=mu_required, help="interferer numerology")
            sp.add_argument("--mu-u", type=_mu, required=mu_required, help="victim numerology")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", default="-", help="output file (default stdout)")

    def grid(sp, start, stop, step):
        sp.add_argument("--gb-start", default=start, help="e.g. 0bins, 1sc, 0.5rb, 180khz")
        sp.add_argument("--gb-stop", default=stop)
        sp.add_argument("--gb-step", default=step)

    sp = sub.add_parser("mse-sweep", help="MSE versus guard band")
    common(sp)
    sp.add_argument("--n-int", type=int, default=12, help="interferer subcarriers")
    grid(sp, "0bins", "10rb", "1sc")
    sp.add_argument("--evaluator", choices=EVALUATORS, default="exact")
    sp.add_argument("--metric", choices=("tone", "rb-average"), default="tone")
    sp.set_defaults(func=cmd_mse_sweep)

    sp = sub.add_parser("verify", help="closed form against Monte Carlo")
    common(sp)
    sp.add_argument("--n-int", type=int, default=12)
    grid(sp, "0bins", "19sc", "1sc")
    sp.add_argument("--n-symbols", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--evaluator", choices=EVALUATORS, default="exact")
    sp.add_argument("--constellation", choices=CONSTELLATIONS, default="qpsk")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("gb-curve", help="minimal guard band versus interferer width")
    common(sp)
    sp.add_argument("--target-db", type=float, required=True, help="required rejection")
    sp.add_argument("--n-int", type=_int_list, default=[12, 24, 48, 96, 192, 384, 600])
    sp.add_argument("--horizon", default=f"{DEFAULT_HORIZON_BINS}bins")
    sp.add_argument("--refine", action="store_true")
    sp.set_defaults(func=cmd_gb_curve)

    sp = sub.add_parser("scenario", help="multi-service bandwidth use")
    common(sp, pair=False)
    sp.add_argument("--file", help="scenario JSON file")
    sp.add_argument("--services", help="mu:n_rb list, e.g. 0:5,1:5,2:5")
    sp.add_argument("--target-db", type=float)
    sp.add_argument("--no-table", action="store_true", help="skip the built-in target x RB grid")
    sp.add_argument("--direction", choices=DIRECTIONS, default="both")
    sp.add_argument("--reduction", choices=REDUCTIONS, default="normalized")
    sp.add_argument("--horizon", default=f"{DEFAULT_HORIZON_BINS}bins")
    sp.set_defaults(func=cmd_scenario)

    sp = sub.add_parser("approx-check", help="scale-invariance residuals")
    common(sp, mu_required=False)
    sp.add_argument("--n-int", type=int, default=12)
    sp.add_argument("--points", type=int, default=200)
    sp.add_argument("--tolerance-db", type=float, default=0.5)
    sp.add_argument("--evaluator", choices=EVALUATORS, default="exact")
    sp.set_defaults(func=cmd_approx_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, NumerologyError) as exc:
        print(f"nrini: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HorizonExceededError as exc:
        print(f"nrini: horizon exceeded: {exc}", file=sys.stderr)
        return EXIT_HORIZON
    except ScenarioHorizonError as exc:
        print(f"nrini: horizon exceeded: {exc}", file=sys.stderr)
        return EXIT_HORIZON


if __name__ == "__main__":
    sys.exit(main())
