"""Build conventional/cognitive waveform pairs from a subband layout."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .bounds import OperatingModel, operating_model
from .spectrum import SubbandPlan
from .waveform import (
    WaveformSpec,
    allocate_power,
    flat_shape,
    gaussian_shape,
    snap_plan,
    synthesize_cognitive,
    synthesize_fullband,
)


@dataclass(frozen=True, eq=False)
class RadarPair:
    base: WaveformSpec
    plan: SubbandPlan
    cognitive: WaveformSpec
    model: OperatingModel
    sigma_hz: float | None = None


def build_pair(b_h, p, n0, bands, sample_rate, duration=None, shape=flat_shape,
               scheme="equal_power", weights=None, pulses=1, sigma_hz=None) -> RadarPair:
    """Synthesize the full-band pulse, snap ``bands`` to its grid, allocate
    power with ``scheme`` and synthesize the multiband pulse."""
    base = synthesize_fullband(b_h, p, sample_rate, duration, shape)
    plan = snap_plan(SubbandPlan(b_h, bands, p, n0), base.grid)
    if scheme is not None:
        betas = allocate_power(plan.subbands, scheme, base.grid, base.magnitude, p, weights)
        plan = plan.with_betas(betas)
    cog = synthesize_cognitive(plan, base)
    return RadarPair(base, plan, cog, operating_model(plan, base, cog, pulses), sigma_hz)


def crlb_gain(pair: RadarPair) -> float:
    """CRLB_R / CRLB_CR; above 1 means the multiband pulse is more accurate."""
    return float(pair.model.crlb_r(1.0) / pair.model.crlb_cr(1.0))


def matched_gaussian_pair(b_h, p, n0, bands, sample_rate, duration=None, scheme="equal_power",
                          weights=None, pulses=1, sigma_bracket=(0.05, 2.0)) -> RadarPair:
    """Pair whose CRLBs coincide, obtained by tuning the width of a Gaussian
    full-band spectrum ``|H(f)|^2 ~ exp(-f^2 / (2 sigma^2))``.

    ``sigma_bracket`` is relative to the one-sided band edge ``b_h / 2``.
    Raises ValueError when no width in the bracket matches.
    """
    half = b_h / 2

    def gap(rel):
        pair = build_pair(b_h, p, n0, bands, sample_rate, duration, gaussian_shape(rel * half),
                          scheme, weights, pulses)
        return np.log(crlb_gain(pair))

    lo, hi = sigma_bracket
    if gap(lo) * gap(hi) > 0:
        raise ValueError("no Gaussian width in the bracket equalises the CRLBs")
    rel = brentq(gap, lo, hi, xtol=1e-14, rtol=1e-14)
    pair = build_pair(b_h, p, n0, bands, sample_rate, duration, gaussian_shape(rel * half),
                      scheme, weights, pulses)
    return RadarPair(pair.base, pair.plan, pair.cognitive, pair.model, rel * half)
