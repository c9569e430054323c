"""Command-line entry point: ``cogradar select|synth|bounds|mc|pipeline``.

Exit codes: 0 success, 2 configuration error, 3 infeasible band selection,
4 numerical failure. Set ``COGRADAR_MAX_WORKERS`` to cap Monte Carlo
worker threads.
"""

from __future__ import annotations

import argparse
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .bandselect import InfeasibleSelection, SelectionConstraints, select_bands
from .bounds import ThresholdNotFound, prior_variance
from .files import ConfigError, db_grid, dumps, parse_range, read_pipeline_config, read_plan, write_csv, write_json
from .montecarlo import EstimationError, McConfig, cognitive_scenario, conventional_scenario, run_sweep
from .pipeline import (
    BOUNDS_HEADER,
    EXIT_CONFIG,
    EXIT_INFEASIBLE,
    EXIT_NUMERICAL,
    MC_HEADER,
    NumericalFailure,
    bound_rows,
    bound_verdicts,
    mc_rows,
    pair_from_plan,
    plan_dict,
    run_pipeline,
)
from .spectrum import read_rem_csv
from .waveform import PowerConservationError

log = logging.getLogger("cogradar")


def example_config() -> Path:
    """Path of the bundled example pipeline config."""
    return Path(str(resources.files("cogradar") / "data" / "example.ini"))


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_pair(args):
    try:
        plan = read_plan(args.plan)
        return pair_from_plan(plan, getattr(args, "pulses", 1))
    except PowerConservationError as exc:
        raise NumericalFailure(str(exc)) from exc
    except ValueError as exc:  # includes ConfigError
        raise ConfigError(str(exc)) from exc


def cmd_select(args) -> int:
    try:
        rem = read_rem_csv(args.rem)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load REM: {exc}") from exc
    widths = [int(w) for w in args.widths.split(",")] if args.widths else args.width_bins
    if widths is None:
        raise ConfigError("give --width-bins or --widths")
    try:
        c = SelectionConstraints(args.n_bands, widths, args.min_sep_bins)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    result = select_bands(rem, c, args.method)
    _emit(dumps(result.to_dict()), args.out)
    return 0


def cmd_synth(args) -> int:
    pair = _load_pair(args)
    wf = pair.base if args.fullband else pair.cognitive
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "waveform.csv", ["t_s", "amplitude"], zip(wf.times, wf.samples))
    write_csv(out / "spectrum.csv", ["freq_hz", "magnitude"], zip(wf.grid.freqs, wf.magnitude))
    report = {
        "radar": "conventional" if args.fullband else "cognitive",
        "target_power_w": pair.plan.total_power,
        "spectral_power_w": wf.power,
        "time_energy_per_period": wf.time_energy,
        "band_powers_w": None if args.fullband else wf.band_powers(),
        "plan": plan_dict(pair),
    }
    write_json(out / "power.json", report)
    return 0


def cmd_bounds(args) -> int:
    pair = _load_pair(args)
    snr_db = db_grid(*parse_range(args.snr_grid))
    rows = bound_rows(pair, snr_db, args.ts)
    try:
        verdicts = bound_verdicts(pair, rows, args.ts, args.ratio)
    except ThresholdNotFound as exc:
        raise NumericalFailure(str(exc)) from exc
    verdicts["prior_variance_s2"] = prior_variance(args.ts)
    write_csv(args.out, BOUNDS_HEADER, rows)
    _emit(dumps(verdicts), args.report)
    return 0


def cmd_mc(args) -> int:
    pair = _load_pair(args)
    snr = 10 ** (db_grid(*parse_range(args.snr_db)) / 10)
    try:
        cfg = McConfig(args.trials, tuple(snr), args.ts, args.oversample, args.seed, args.interp, args.guard)
        if args.fullband:
            scen = conventional_scenario(pair.base, args.ts)
        else:
            scen = cognitive_scenario(pair.plan, pair.cognitive, args.ts)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        result = run_sweep(scen, cfg)
    except EstimationError as exc:
        raise NumericalFailure(str(exc)) from exc
    write_csv(args.out, MC_HEADER, mc_rows(result))
    return 0


def cmd_pipeline(args) -> int:
    path = example_config() if args.example else args.config
    if path is None:
        raise ConfigError("give --config or --example")
    cfg = read_pipeline_config(path)
    if args.output_dir is not None:
        cfg.output_dir = Path(args.output_dir)
    elif args.example:
        cfg.output_dir = Path("cogradar_example_out")
    if args.seed is not None:
        cfg.seed = args.seed
    outcome = run_pipeline(cfg)
    print(outcome.message, file=sys.stderr if outcome.status else sys.stdout)
    if outcome.status == 0:
        print(f"artifacts written to {cfg.output_dir}")
    return outcome.status


def _plan_args(p, fullband_help=None):
    p.add_argument("--plan", required=True, help="plan JSON file")
    if fullband_help:
        p.add_argument("--fullband", action="store_true", help=fullband_help)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cogradar", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="choose low-interference subbands from a REM")
    p.add_argument("--rem", required=True, help="REM CSV (freq_hz,interference_w_per_hz,excluded)")
    p.add_argument("--n-bands", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--width-bins", type=int, help="common block width in bins")
    g.add_argument("--widths", help="comma-separated width per band, in bins")
    p.add_argument("--min-sep-bins", type=int, default=0)
    p.add_argument("--method", choices=["oracle", "greedy"], default="greedy")
    p.add_argument("--out", help="output JSON (default stdout)")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("synth", help="synthesize a waveform from a plan")
    _plan_args(p, "emit the conventional full-band pulse instead")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bounds", help="CRLB and EZB curves for a plan")
    _plan_args(p)
    p.add_argument("--snr-grid", default="-10:40:51", help="lo:hi:points in dB (log-spaced in linear SNR)")
    p.add_argument("--ts", type=float, required=True, help="delay prior length T_s (s)")
    p.add_argument("--ratio", type=float, default=1.25, help="bound/CRLB ratio defining the threshold")
    p.add_argument("--pulses", type=int, default=1)
    p.add_argument("--out", default="bounds.csv")
    p.add_argument("--report", help="verdict JSON (default stdout)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("mc", help="Monte Carlo MSE of the ML delay estimator")
    _plan_args(p, "simulate the conventional radar of the plan's base spectrum")
    p.add_argument("--snr-db", default="-10:30:9", help="lo:hi:points in dB")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ts", type=float, required=True, help="observation window T_s (s)")
    p.add_argument("--guard", type=float, default=0.0, help="delays are drawn on [0, ts - guard]")
    p.add_argument("--oversample", type=int, default=4, help="delay-grid points per sample")
    p.add_argument("--interp", action=argparse.BooleanOptionalAction, default=True,
                   help="parabolic peak interpolation")
    p.add_argument("--out", default="mc.csv")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("pipeline", help="run selection, synthesis, bounds and Monte Carlo end to end")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--config", help="INI pipeline config")
    g.add_argument("--example", action="store_true", help="use the bundled example config")
    p.add_argument("--output-dir", help="override [pipeline] output_dir")
    p.add_argument("--seed", type=int, help="override [pipeline] seed")
    p.set_defaults(func=cmd_pipeline)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        with np.errstate(over="raise", invalid="raise", divide="ignore", under="ignore"):
            return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleSelection as exc:
        print(f"infeasible selection: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (NumericalFailure, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
