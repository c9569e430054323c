"""Readers and writers for plan JSON, CSV outputs and pipeline config files.

All CSV numbers are written with 17 significant digits and JSON is written
with sorted keys so repeated runs produce identical bytes.
"""

from __future__ import annotations

import configparser
import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .spectrum import Subband


class ConfigError(ValueError):
    """Invalid or incomplete configuration."""


def fmt(x) -> str:
    return f"{float(x):.17g}"


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_csv(path) -> tuple[list, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


@dataclass
class PlanFile:
    """Contents of a plan JSON file.

    ``base`` selects the full-band spectrum: ``{"shape": "flat"}``,
    ``{"shape": "gaussian", "sigma_hz": s}`` or
    ``{"shape": "matched_gaussian"}`` (width tuned so both CRLBs agree).
    If ``allocation`` is set the betas in ``subbands`` are recomputed.
    """

    b_h_hz: float
    p_watts: float
    n0_w_per_hz: float
    subbands: list
    sample_rate_hz: float | None = None
    duration_sec: float | None = None
    base: dict = field(default_factory=lambda: {"shape": "flat"})
    allocation: str | None = "equal_power"
    weights: list | None = None

    def subband_objects(self) -> list:
        return [Subband(float(b["f_center_hz"]), float(b["width_hz"]), float(b.get("beta", 1.0)))
                for b in self.subbands]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def read_plan(path) -> PlanFile:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read plan {path}: {exc}") from exc
    try:
        plan = PlanFile(**raw)
    except TypeError as exc:
        raise ConfigError(f"bad plan file {path}: {exc}") from exc
    if not plan.subbands:
        raise ConfigError("plan has no subbands")
    for b in plan.subbands:
        if "f_center_hz" not in b or "width_hz" not in b:
            raise ConfigError("each subband needs f_center_hz and width_hz")
    return plan


def parse_range(text: str) -> tuple[float, float, int]:
    """``lo:hi:points`` -> (lo, hi, points)."""
    try:
        lo, hi, n = text.split(":")
        out = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise ConfigError(f"expected lo:hi:points, got {text!r}") from exc
    if out[2] < 1 or (out[2] > 1 and not out[1] > out[0]):
        raise ConfigError(f"bad range {text!r}")
    return out


def db_grid(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(lo, hi, n) if n > 1 else np.array([lo])


@dataclass
class PipelineConfig:
    rem_path: Path
    output_dir: Path
    seed: int
    n_bands: int
    widths_bins: list
    min_sep_bins: int
    method: str
    b_h_hz: float
    p_watts: float
    n0_w_per_hz: float
    sample_rate_hz: float
    duration_sec: float
    base_shape: str
    sigma_hz: float | None
    allocation: str
    t_s_sec: float
    snr_db: tuple
    threshold_ratio: float
    pulses: int
    mc_trials: int
    mc_snr_db: tuple
    mc_oversample: int
    mc_interp: bool
    mc_guard_sec: float


def _get(cp, section, key, conv=str, default=None):
    if not cp.has_option(section, key):
        if default is None:
            raise ConfigError(f"missing [{section}] {key}")
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from exc


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def read_pipeline_config(path) -> PipelineConfig:
    """Parse and validate an INI pipeline config. Relative paths resolve
    against the config file's directory."""
    path = Path(path)
    cp = configparser.ConfigParser()
    try:
        if not cp.read(path):
            raise ConfigError(f"cannot read config {path}")
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    here = path.parent
    widths_raw = _get(cp, "selection", "widths_bins", str, "")
    n_bands = _get(cp, "selection", "n_bands", int)
    if widths_raw:
        widths = [int(w) for w in widths_raw.split(",")]
    else:
        widths = [_get(cp, "selection", "width_bins", int)] * n_bands
    cfg = PipelineConfig(
        rem_path=here / _get(cp, "pipeline", "rem_path"),
        output_dir=here / _get(cp, "pipeline", "output_dir"),
        seed=_get(cp, "pipeline", "seed", int, 0),
        n_bands=n_bands,
        widths_bins=widths,
        min_sep_bins=_get(cp, "selection", "min_sep_bins", int, 0),
        method=_get(cp, "selection", "method", str, "greedy"),
        b_h_hz=_get(cp, "waveform", "b_h_hz", float),
        p_watts=_get(cp, "waveform", "p_watts", float),
        n0_w_per_hz=_get(cp, "waveform", "n0_w_per_hz", float),
        sample_rate_hz=_get(cp, "waveform", "sample_rate_hz", float),
        duration_sec=_get(cp, "waveform", "duration_sec", float),
        base_shape=_get(cp, "waveform", "base_shape", str, "flat"),
        sigma_hz=_get(cp, "waveform", "sigma_hz", float, -1.0),
        allocation=_get(cp, "waveform", "allocation", str, "equal_power"),
        t_s_sec=_get(cp, "bounds", "t_s_sec", float),
        snr_db=parse_range(_get(cp, "bounds", "snr_db", str, "-10:30:41")),
        threshold_ratio=_get(cp, "bounds", "threshold_ratio", float, 1.25),
        pulses=_get(cp, "bounds", "pulses", int, 1),
        mc_trials=_get(cp, "montecarlo", "trials", int, 1000),
        mc_snr_db=parse_range(_get(cp, "montecarlo", "snr_db", str, "-10:30:9")),
        mc_oversample=_get(cp, "montecarlo", "oversample", int, 4),
        mc_interp=_get(cp, "montecarlo", "interp", _bool, "true") if cp.has_option("montecarlo", "interp") else True,
        mc_guard_sec=_get(cp, "montecarlo", "guard_sec", float, 0.0) if cp.has_option("montecarlo", "guard_sec") else 0.0,
    )
    if cfg.sigma_hz is not None and cfg.sigma_hz < 0:
        cfg.sigma_hz = None
    validate_pipeline_config(cfg)
    return cfg


def validate_pipeline_config(cfg: PipelineConfig) -> None:
    """Reject configs that would fail later, before any computation."""
    if not cfg.rem_path.is_file():
        raise ConfigError(f"REM file {cfg.rem_path} does not exist")
    positive = {
        "b_h_hz": cfg.b_h_hz, "p_watts": cfg.p_watts, "n0_w_per_hz": cfg.n0_w_per_hz,
        "sample_rate_hz": cfg.sample_rate_hz, "duration_sec": cfg.duration_sec, "t_s_sec": cfg.t_s_sec,
    }
    for k, v in positive.items():
        if not (v > 0 and np.isfinite(v)):
            raise ConfigError(f"{k} must be positive and finite, got {v}")
    if cfg.sample_rate_hz <= cfg.b_h_hz:
        raise ConfigError("sample_rate_hz must exceed b_h_hz")
    if cfg.n_bands < 1 or len(cfg.widths_bins) != cfg.n_bands or min(cfg.widths_bins) < 1:
        raise ConfigError("need n_bands >= 1 and one positive width per band")
    if cfg.min_sep_bins < 0:
        raise ConfigError("min_sep_bins must be >= 0")
    if cfg.method not in ("oracle", "greedy"):
        raise ConfigError("method must be oracle or greedy")
    if cfg.base_shape not in ("flat", "gaussian", "matched_gaussian"):
        raise ConfigError("base_shape must be flat, gaussian or matched_gaussian")
    if cfg.base_shape == "gaussian" and not (cfg.sigma_hz and cfg.sigma_hz > 0):
        raise ConfigError("gaussian base needs sigma_hz > 0")
    if cfg.allocation not in ("equal_beta", "equal_power"):
        raise ConfigError("allocation must be equal_beta or equal_power")
    if cfg.pulses < 1:
        raise ConfigError("pulses must be >= 1")
    if cfg.mc_trials < 100 or cfg.mc_oversample < 4:
        raise ConfigError("montecarlo needs trials >= 100 and oversample >= 4")
    if not 0 <= cfg.mc_guard_sec < cfg.t_s_sec:
        raise ConfigError("guard_sec must lie in [0, t_s_sec)")
    if cfg.threshold_ratio <= 1:
        raise ConfigError("threshold_ratio must exceed 1")
