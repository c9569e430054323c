"""End-to-end run: REM -> band selection -> waveform pair -> bounds -> Monte
Carlo, with every intermediate written to disk."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .bandselect import InfeasibleSelection, SelectionConstraints, select_bands
from .bounds import ThresholdNotFound, check_prop1, corollary3_min_beta, prior_variance, snr_threshold
from .design import RadarPair, build_pair, matched_gaussian_pair
from .files import ConfigError, PipelineConfig, PlanFile, db_grid, validate_pipeline_config, write_csv, write_json
from .montecarlo import (
    EstimationError,
    McConfig,
    cognitive_scenario,
    conventional_scenario,
    plateau_departure_snr,
    run_sweep,
)
from .spectrum import read_rem_csv
from .waveform import PowerConservationError, flat_shape, gaussian_shape

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4

# bound/CRLB ratios are evaluated in floating point; orderings are checked
# with this relative slack
ORDER_RTOL = 1e-9


class NumericalFailure(RuntimeError):
    pass


def pair_from_plan(plan: PlanFile, pulses: int = 1) -> RadarPair:
    """Synthesize the conventional/cognitive pair described by a plan file."""
    fs = plan.sample_rate_hz if plan.sample_rate_hz is not None else 4 * plan.b_h_hz
    bands = plan.subband_objects()
    shape = plan.base.get("shape", "flat")
    common = dict(duration=plan.duration_sec, scheme=plan.allocation, weights=plan.weights, pulses=pulses)
    if shape == "matched_gaussian":
        return matched_gaussian_pair(plan.b_h_hz, plan.p_watts, plan.n0_w_per_hz, bands, fs, **common)
    if shape == "gaussian":
        sigma = float(plan.base["sigma_hz"])
        return build_pair(plan.b_h_hz, plan.p_watts, plan.n0_w_per_hz, bands, fs, shape=gaussian_shape(sigma),
                          sigma_hz=sigma, **common)
    if shape == "flat":
        return build_pair(plan.b_h_hz, plan.p_watts, plan.n0_w_per_hz, bands, fs, shape=flat_shape, **common)
    raise ConfigError(f"unknown base shape {shape!r}")


def plan_dict(pair: RadarPair, sample_rate=None, duration=None) -> dict:
    """Plan-file contents for an already synthesized pair (betas fixed)."""
    base = {"shape": "flat"} if pair.sigma_hz is None else {"shape": "gaussian", "sigma_hz": pair.sigma_hz}
    return {
        "b_h_hz": pair.plan.full_band,
        "p_watts": pair.plan.total_power,
        "n0_w_per_hz": pair.plan.noise_density,
        "sample_rate_hz": pair.base.sample_rate if sample_rate is None else sample_rate,
        "duration_sec": pair.base.duration if duration is None else duration,
        "base": base,
        "allocation": None,
        "weights": None,
        "subbands": [{"f_center_hz": b.f_center, "width_hz": b.width, "beta": b.beta} for b in pair.plan.subbands],
    }


def bound_rows(pair: RadarPair, snr_db, t_s: float) -> list:
    """Rows ``snr_db, crlb_r, crlb_cr, ezb_r, ezb_cr``."""
    m = pair.model
    snr = 10 ** (np.asarray(snr_db, dtype=float) / 10)
    var0 = prior_variance(t_s)
    return [
        (d, m.crlb_r(s), m.crlb_cr(s), m.ezb_r(s, var0), m.ezb_cr(s, var0))
        for d, s in zip(snr_db, snr)
    ]


def bound_verdicts(pair: RadarPair, rows, t_s: float, ratio: float = 1.25) -> dict:
    """Proposition, corollary and threshold checks for one pair."""
    m = pair.model
    var0 = prior_variance(t_s)
    prop = check_prop1(pair.plan, m.band_powers, m.alphas, m.alpha_full)
    crlb_r, crlb_cr = float(m.crlb_r(1.0)), float(m.crlb_cr(1.0))
    thr_r = snr_threshold(lambda s: m.ezb_r(s, var0), m.crlb_r, ratio)
    thr_cr = snr_threshold(lambda s: m.ezb_cr(s, var0), m.crlb_cr, ratio)
    arr = np.asarray(rows, dtype=float)
    return {
        "prop1": {"holds": prop.holds, "lhs": prop.lhs, "rhs": prop.rhs, "margin": prop.margin},
        "prop1_consistent": prop.holds == (crlb_cr <= crlb_r * (1 + ORDER_RTOL)),
        "crlb_gain": crlb_r / crlb_cr,
        "corollary3_min_beta": corollary3_min_beta(pair.plan.full_band,
                                                   [b.noise_bandwidth for b in pair.plan.subbands]),
        "threshold_snr_db": {"conventional": 10 * np.log10(thr_r), "cognitive": 10 * np.log10(thr_cr)},
        "threshold_ordering": thr_cr <= thr_r,
        "ezb_ordering": bool(np.all(arr[:, 4] <= arr[:, 3] * (1 + ORDER_RTOL))),
        "ezb_at_zero_is_prior": float(m.ezb_r(0.0, var0)) == var0 and float(m.ezb_cr(0.0, var0)) == var0,
        "threshold_ratio": ratio,
    }


def mc_rows(result) -> list:
    return [(p.snr_db, p.mse, p.ci_low, p.ci_high, p.crlb, p.ezb) for p in result.per_snr]


MC_HEADER = ["snr_db", "mse", "ci_lo", "ci_hi", "crlb", "ezb"]
BOUNDS_HEADER = ["snr_db", "crlb_r", "crlb_cr", "ezb_r", "ezb_cr"]


def mc_verdicts(result, ezb_floor: float = 0.8) -> dict:
    mse = result.mse
    ezb = np.array([p.ezb for p in result.per_snr])
    return {
        "mse_above_ezb_floor": bool(np.all(mse >= ezb_floor * ezb)),
        "min_mse_over_ezb": float(np.min(mse / ezb)),
        "top_mse_over_crlb": float(result.per_snr[-1].mse / result.per_snr[-1].crlb),
    }


@dataclass
class PipelineOutcome:
    status: int
    message: str
    report: dict | None = None


def _stage_pair(cfg: PipelineConfig, bands) -> RadarPair:
    common = dict(duration=cfg.duration_sec, scheme=cfg.allocation, pulses=cfg.pulses)
    args = (cfg.b_h_hz, cfg.p_watts, cfg.n0_w_per_hz, list(bands), cfg.sample_rate_hz)
    if cfg.base_shape == "matched_gaussian":
        return matched_gaussian_pair(*args, **common)
    if cfg.base_shape == "gaussian":
        return build_pair(*args, shape=gaussian_shape(cfg.sigma_hz), sigma_hz=cfg.sigma_hz, **common)
    return build_pair(*args, shape=flat_shape, **common)


def execute_pipeline(cfg: PipelineConfig) -> dict:
    """Run every stage and write the artifact files; returns the report.

    Raises ConfigError, InfeasibleSelection or NumericalFailure.
    """
    validate_pipeline_config(cfg)
    try:
        rem = read_rem_csv(cfg.rem_path)
    except ValueError as exc:
        raise ConfigError(f"bad REM {cfg.rem_path}: {exc}") from exc
    half = cfg.b_h_hz / 2
    if rem.grid.f_lo < 0 or rem.grid.f_hi > half * (1 + 1e-12):
        raise ConfigError(f"REM spans [{rem.grid.f_lo}, {rem.grid.f_hi}] Hz, outside [0, {half}] Hz")

    try:
        constraints = SelectionConstraints(cfg.n_bands, cfg.widths_bins, cfg.min_sep_bins)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    selection = select_bands(rem, constraints, cfg.method)
    log.info("selected %d bands, interference energy %.6g", len(selection.bands), selection.objective)

    try:
        pair = _stage_pair(cfg, selection.bands)
    except PowerConservationError as exc:
        raise NumericalFailure(str(exc)) from exc
    except ValueError as exc:
        raise NumericalFailure(f"waveform synthesis failed: {exc}") from exc

    snr_db = db_grid(*cfg.snr_db)
    rows = bound_rows(pair, snr_db, cfg.t_s_sec)
    if not np.all(np.isfinite(np.asarray(rows))):
        raise NumericalFailure("non-finite bound values")
    try:
        verdicts = bound_verdicts(pair, rows, cfg.t_s_sec, cfg.threshold_ratio)
    except (ThresholdNotFound, ValueError) as exc:
        raise NumericalFailure(f"threshold search failed: {exc}") from exc

    mc_snr = 10 ** (db_grid(*cfg.mc_snr_db) / 10)
    mc_cfg = McConfig(cfg.mc_trials, tuple(mc_snr), cfg.t_s_sec, cfg.mc_oversample, cfg.seed,
                      cfg.mc_interp, cfg.mc_guard_sec)
    try:
        mc_cog = run_sweep(cognitive_scenario(pair.plan, pair.cognitive, cfg.t_s_sec), mc_cfg)
        mc_conv = run_sweep(conventional_scenario(pair.base, cfg.t_s_sec), mc_cfg)
    except (EstimationError, ValueError) as exc:
        raise NumericalFailure(f"Monte Carlo failed: {exc}") from exc

    power = pair.cognitive.power
    power_ok = abs(power - cfg.p_watts) <= 1e-9 * cfg.p_watts

    def departure(res):
        try:
            return 10 * np.log10(plateau_departure_snr(res))
        except ValueError:
            return None

    mc_block = {
        "cognitive": mc_verdicts(mc_cog),
        "conventional": mc_verdicts(mc_conv),
        "plateau_departure_db": {"cognitive": departure(mc_cog), "conventional": departure(mc_conv)},
        "trials": cfg.mc_trials,
        "seed": cfg.seed,
    }
    checks = {
        "power_conserved": power_ok,
        "prop1": verdicts["prop1"]["holds"],
        "prop1_consistent": verdicts["prop1_consistent"],
        "threshold_ordering": verdicts["threshold_ordering"],
        "ezb_ordering": verdicts["ezb_ordering"],
        "ezb_at_zero_is_prior": verdicts["ezb_at_zero_is_prior"],
        "mc_cognitive_above_ezb": mc_block["cognitive"]["mse_above_ezb_floor"],
        "mc_conventional_above_ezb": mc_block["conventional"]["mse_above_ezb_floor"],
    }
    report = {
        "version": __version__,
        "checks": checks,
        "all_passed": all(checks.values()),
        "power": {"target_w": cfg.p_watts, "measured_w": power, "band_powers_w": pair.cognitive.band_powers()},
        "bounds": verdicts,
        "montecarlo": mc_block,
        "selection": selection.to_dict(),
        "sigma_hz": pair.sigma_hz,
    }

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "bands.json", {"selection": selection.to_dict(), "plan": plan_dict(pair)})
    write_csv(out / "waveform.csv", ["t_s", "amplitude"], zip(pair.cognitive.times, pair.cognitive.samples))
    write_csv(out / "spectrum.csv", ["freq_hz", "magnitude"], zip(pair.cognitive.grid.freqs, pair.cognitive.magnitude))
    write_csv(out / "bounds.csv", BOUNDS_HEADER, rows)
    write_csv(out / "mc.csv", MC_HEADER, mc_rows(mc_cog))
    write_csv(out / "mc_conventional.csv", MC_HEADER, mc_rows(mc_conv))
    write_json(out / "report.json", report)
    return report


def run_pipeline(cfg: PipelineConfig) -> PipelineOutcome:
    """:func:`execute_pipeline` with failures mapped to exit codes."""
    try:
        report = execute_pipeline(cfg)
    except ConfigError as exc:
        return PipelineOutcome(EXIT_CONFIG, f"config error: {exc}")
    except InfeasibleSelection as exc:
        return PipelineOutcome(EXIT_INFEASIBLE, f"infeasible selection: {exc}")
    except (NumericalFailure, FloatingPointError) as exc:
        return PipelineOutcome(EXIT_NUMERICAL, f"numerical failure: {exc}")
    msg = "all checks passed" if report["all_passed"] else "finished; some checks failed (see report.json)"
    return PipelineOutcome(EXIT_OK, msg, report)
