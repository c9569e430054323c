"""Delay-estimation bounds: deterministic CRLB and the extended Ziv-Zakai
bound (short-pulse closed form) for conventional and multiband radars.

SNRs are linear, rms bandwidths in rad/s, bounds in s^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .spectrum import SubbandPlan, rms_bandwidth_bandpass, rms_bandwidth_lowpass
from .waveform import WaveformSpec, snr_summary


class ThresholdNotFound(ValueError):
    pass


def gaussian_q(x):
    """Right-tail probability of the standard normal."""
    return 0.5 * special.erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def gamma_reg_32(b):
    """Regularised lower incomplete gamma P(3/2, b) = erf(sqrt b) - 2 sqrt(b/pi) e^-b."""
    b = np.asarray(b, dtype=float)
    if np.any(b < 0):
        raise ValueError("P(3/2, b) needs b >= 0")
    rb = np.sqrt(b)
    return special.erf(rb) - 2.0 / np.sqrt(np.pi) * rb * np.exp(-b)


def special_q(x):
    return gaussian_q(x)


def special_gamma_reg(a, b):
    """Regularised lower incomplete gamma P(a, b); closed form for a = 3/2."""
    if a == 1.5:
        return gamma_reg_32(b)
    b = np.asarray(b, dtype=float)
    if np.any(b < 0) or not a > 0:
        raise ValueError("P(a, b) needs a > 0 and b >= 0")
    return special.gammainc(a, b)


def prior_variance(t_s: float) -> float:
    """Variance of a delay uniform on [0, t_s]."""
    return t_s**2 / 12.0


def _info(per_band):
    snr, f = np.asarray(per_band, dtype=float).reshape(-1, 2).T
    return float(np.sum(snr * f**2))


def crlb_conventional(snr, f_rms):
    snr = np.asarray(snr, dtype=float)
    if np.any(snr <= 0) or not f_rms > 0:
        raise ValueError("CRLB needs snr > 0 and f_rms > 0")
    return 1.0 / (snr * f_rms**2)


def crlb_cognitive(per_band) -> float:
    """``per_band`` is a sequence of (snr_i, f_rms_i) pairs."""
    info = _info(per_band)
    if not info > 0:
        raise ValueError("subbands carry no delay information")
    return 1.0 / info


def _ezb(snr_q, info, sigma_tau0_sq):
    snr_q = np.asarray(snr_q, dtype=float)
    info = np.asarray(info, dtype=float)
    if np.any(snr_q < 0):
        raise ValueError("snr must be >= 0")
    if not sigma_tau0_sq > 0:
        raise ValueError("prior variance must be positive")
    prior_term = sigma_tau0_sq * 2.0 * gaussian_q(np.sqrt(snr_q / 2.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(snr_q > 0, gamma_reg_32(snr_q / 4.0) / np.where(info > 0, info, 1.0), 0.0)
    out = prior_term + tail
    return float(out) if out.ndim == 0 else out


def ezb_conventional(snr, f_rms, sigma_tau0_sq):
    """EZB for the full-band radar; exactly the prior variance at snr = 0."""
    if not f_rms > 0:
        raise ValueError("f_rms must be positive")
    snr = np.asarray(snr, dtype=float)
    return _ezb(snr, snr * f_rms**2, sigma_tau0_sq)


def ezb_cognitive(snr_tilde, per_band, sigma_tau0_sq):
    """EZB for the multiband radar: aggregate SNR in the ambiguity terms and
    summed per-band information in the asymptotic term."""
    return _ezb(snr_tilde, _info(per_band), sigma_tau0_sq)


@dataclass(frozen=True)
class Prop1Check:
    holds: bool
    margin: float
    lhs: float
    rhs: float


def check_prop1(plan: SubbandPlan, band_powers, alphas, alpha_full: float) -> Prop1Check:
    """Power condition under which the multiband CRLB is no worse than the
    full-band CRLB: ``sum P_i a_i^2 w_i >= P a^2 W``.

    Widths are on the one-sided axis (``W = B_h / 2``) and the alphas are
    the rms-to-width ratios ``F_i / (2 pi w_i)``, ``F / (2 pi W)``.
    """
    p_i = np.asarray(band_powers, dtype=float)
    a_i = np.asarray(alphas, dtype=float)
    lhs = float(np.sum(p_i * a_i**2 * plan.widths))
    rhs = float(plan.total_power * alpha_full**2 * plan.full_band / 2)
    return Prop1Check(lhs >= rhs, lhs - rhs, lhs, rhs)


def corollary3_min_beta(b_h: float, widths) -> float:
    """Common beta at which flat-spectrum multiband and full-band CRLBs are
    equal. ``b_h`` and ``widths`` must be measured on the same axis."""
    w = np.asarray(widths, dtype=float)
    if w.size == 0 or np.any(w <= 0):
        raise ValueError("widths must be non-empty and positive")
    return float(b_h / np.sqrt(np.sum(w**2)))


def snr_threshold(bound_curve, crlb_curve, ratio: float = 1.25, lo: float = 1e-3, hi: float = 1e6,
                  tol_log: float = 1e-3, n_check: int = 400) -> float:
    """SNR above which bound/CRLB stays below ``ratio`` on [lo, hi].

    ``bound_curve`` and ``crlb_curve`` are callables of linear SNR. At very
    low SNR the CRLB exceeds the prior-limited bound, so the ratio first
    rises; the search starts at its peak and requires the ratio to decrease
    from there to the crossing (checked on a log grid). The crossing is
    refined by bisection in log-SNR to ``tol_log``. Returns ``lo`` when the
    ratio is below ``ratio`` everywhere.
    """
    def r(s):
        return float(bound_curve(s)) / float(crlb_curve(s))

    grid = np.logspace(np.log10(lo), np.log10(hi), n_check)
    vals = np.array([r(s) for s in grid])
    above = np.nonzero(vals >= ratio)[0]
    if above.size == 0:
        return lo
    last = above[-1]
    if last == n_check - 1:
        raise ThresholdNotFound(f"bound/CRLB does not settle below {ratio} on [{lo}, {hi}]")
    peak = int(np.argmax(vals[:last + 1]))
    seg = vals[peak:last + 2]
    if np.any(np.diff(seg) > 1e-9 * seg[:-1]):
        raise ValueError("bound/CRLB ratio is not decreasing between its peak and the crossing")
    a, b = np.log(grid[last]), np.log(grid[last + 1])
    while b - a > tol_log:
        mid = 0.5 * (a + b)
        if r(np.exp(mid)) < ratio:
            b = mid
        else:
            a = mid
    return float(np.exp(b))


@dataclass(frozen=True)
class BoundReport:
    snr_operating: float
    crlb_conventional: float
    crlb_cognitive: float
    ezb_conventional: float
    ezb_cognitive: float
    sigma_tau0_sq: float
    snr_tilde: float
    per_band: tuple
    f_rms_full: float
    condition_prop1: bool
    prop1_margin: float
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class OperatingModel:
    """Information content of a conventional/cognitive pair as a function
    of the full-band SNR ``P / (N0 B_h)``.

    The per-band SNRs and the aggregate SNR scale linearly with the
    full-band SNR for fixed plan geometry and power split.
    """

    f_rms_full: float
    f_rms_bands: np.ndarray
    snr_band_ratio: np.ndarray
    snr_tilde_ratio: float
    band_powers: np.ndarray
    alphas: np.ndarray
    alpha_full: float
    pulses: int = 1

    def per_band(self, snr):
        return np.column_stack([self.pulses * snr * self.snr_band_ratio, self.f_rms_bands])

    def crlb_r(self, snr):
        return crlb_conventional(self.pulses * np.asarray(snr, dtype=float), self.f_rms_full)

    def crlb_cr(self, snr):
        info = self.pulses * np.asarray(snr, dtype=float) * np.sum(self.snr_band_ratio * self.f_rms_bands**2)
        return 1.0 / info

    def ezb_r(self, snr, sigma_tau0_sq):
        return ezb_conventional(self.pulses * np.asarray(snr, dtype=float), self.f_rms_full, sigma_tau0_sq)

    def ezb_cr(self, snr, sigma_tau0_sq):
        snr = np.asarray(snr, dtype=float)
        info = self.pulses * snr * np.sum(self.snr_band_ratio * self.f_rms_bands**2)
        return _ezb(self.pulses * snr * self.snr_tilde_ratio, info, sigma_tau0_sq)


def operating_model(plan: SubbandPlan, base: WaveformSpec, cognitive: WaveformSpec, pulses: int = 1) -> OperatingModel:
    """Collect rms bandwidths and SNR ratios from synthesised pulses.

    ``pulses`` multiplies every SNR (coherent multi-pulse energy gain).
    """
    if int(pulses) != pulses or pulses < 1:
        raise ValueError("pulses must be a positive integer")
    f_full = rms_bandwidth_lowpass(base.grid, base.magnitude, plan.full_band)
    f_bands = np.array([
        rms_bandwidth_bandpass(cognitive.grid, cognitive.base_magnitude * b.beta, b) for b in cognitive.bands
    ])
    s = snr_summary(plan, cognitive)
    snr_full = s.snr_full
    widths = np.array([b.width for b in cognitive.bands])
    return OperatingModel(
        f_rms_full=f_full,
        f_rms_bands=f_bands,
        snr_band_ratio=s.snr_i / snr_full,
        snr_tilde_ratio=s.snr_tilde / snr_full,
        band_powers=cognitive.band_powers(),
        alphas=f_bands / (2 * np.pi * widths),
        alpha_full=f_full / (2 * np.pi * plan.full_band / 2),
        pulses=int(pulses),
    )


def bound_report(plan: SubbandPlan, base: WaveformSpec, cognitive: WaveformSpec, t_s: float,
                 snr: float | None = None, pulses: int = 1) -> BoundReport:
    """All bounds at one operating point (default: the plan's own SNR)."""
    m = operating_model(plan, base, cognitive, pulses)
    if snr is None:
        snr = plan.total_power / (plan.noise_density * plan.full_band)
    var0 = prior_variance(t_s)
    per_band = m.per_band(snr)
    prop = check_prop1(plan, m.band_powers, m.alphas, m.alpha_full)
    return BoundReport(
        snr_operating=float(snr),
        crlb_conventional=float(m.crlb_r(snr)),
        crlb_cognitive=float(m.crlb_cr(snr)),
        ezb_conventional=float(m.ezb_r(snr, var0)),
        ezb_cognitive=float(m.ezb_cr(snr, var0)),
        sigma_tau0_sq=var0,
        snr_tilde=float(pulses * snr * m.snr_tilde_ratio),
        per_band=tuple((float(a), float(b)) for a, b in per_band),
        f_rms_full=m.f_rms_full,
        condition_prop1=prop.holds,
        prop1_margin=prop.margin,
    )
