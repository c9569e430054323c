"""Conventional and multiband (cognitive) pulse synthesis.

A pulse is described by its one-sided magnitude spectrum on a grid whose
spacing is the reciprocal of the synthesis period, so the time samples are
an exact inverse DFT of the spectral samples. Bin weights follow the
trapezoid rule used by :mod:`cogradar.spectrum`; as a result, time-domain
energy and spectral power agree to rounding error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectrum import (
    FrequencyGrid,
    Subband,
    SubbandPlan,
    band_power,
    total_power,
)

DEFAULT_BINS_PER_BAND = 1024


class PowerConservationError(RuntimeError):
    """Synthesised cognitive waveform does not carry the reference power."""


@dataclass(frozen=True, eq=False)
class WaveformSpec:
    """Sampled real pulse with its cached one-sided spectrum.

    ``base_magnitude`` is the full-band spectrum the pulse was derived
    from. For a cognitive pulse ``bands`` lists the occupied subbands, each
    carrying ``beta * base_magnitude``; for a conventional pulse it is None.
    The pulse is centred at ``duration / 2``.
    """

    grid: FrequencyGrid
    magnitude: np.ndarray
    base_magnitude: np.ndarray
    sample_rate: float
    duration: float
    samples: np.ndarray
    bands: tuple | None = None

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate

    @property
    def power(self) -> float:
        """Spectral power, two-sided (W)."""
        if self.bands is None:
            return total_power(self.grid, self.magnitude)
        return float(sum(self.band_powers()))

    def band_powers(self) -> np.ndarray:
        if self.bands is None:
            raise ValueError("conventional waveform has no subbands")
        return np.array([b.beta**2 * band_power(self.grid, self.base_magnitude, b) for b in self.bands])

    @property
    def time_energy(self) -> float:
        return float(np.sum(self.samples**2) / self.sample_rate)

    def component(self, i: int) -> "WaveformSpec":
        """The bandpass pulse of subband ``i`` on its own."""
        if self.bands is None:
            raise ValueError("conventional waveform has no subbands")
        return _build(self.grid, self.base_magnitude, self.sample_rate, self.duration, (self.bands[i],))


def _grid_for(b_h: float, duration: float) -> FrequencyGrid:
    half = b_h / 2
    n = half * duration
    if abs(n - round(n)) > 1e-6 * max(1.0, n) or round(n) < 1:
        raise ValueError("b_h/2 * duration must be a positive integer number of bins")
    return FrequencyGrid(0.0, half, int(round(n)) + 1)


def _band_bins(grid: FrequencyGrid, band: Subband) -> tuple[int, int]:
    return grid.bin_of(band.f_lo, tol=1e-6), grid.bin_of(band.f_hi, tol=1e-6)


def bin_power_weights(grid: FrequencyGrid, base: np.ndarray, bands) -> np.ndarray:
    """Per-bin ``|c_k|^2`` such that ``df * (|c_0|^2 + 2 sum_k |c_k|^2)``
    equals the two-sided trapezoid power of the (banded) spectrum."""
    p = np.asarray(base, dtype=float) ** 2
    if bands is None:
        w = np.ones_like(p)
        w[-1] = 0.5
        return w * p
    out = np.zeros_like(p)
    for b in bands:
        a, e = _band_bins(grid, b)
        w = np.ones(e - a + 1)
        w[0] = w[-1] = 0.5
        if a == 0:
            w[0] = 1.0  # the DC bin is not mirrored
        out[a:e + 1] += b.beta**2 * w * p[a:e + 1]
    return out


def _synthesize(grid: FrequencyGrid, weights: np.ndarray, sample_rate: float, duration: float) -> np.ndarray:
    n = int(round(sample_rate * duration))
    if abs(n - sample_rate * duration) > 1e-6 * n:
        raise ValueError("sample_rate * duration must be an integer sample count")
    k_max = grid.m_points - 1
    if not k_max < n / 2:
        raise ValueError(
            f"sample rate {sample_rate} Hz does not exceed the two-sided bandwidth {2 * grid.f_hi} Hz"
        )
    c = np.sqrt(weights) * (-1.0) ** np.arange(grid.m_points)  # centred at duration / 2
    return sample_rate * np.fft.irfft(c, n=n)


def _build(grid, base, sample_rate, duration, bands) -> WaveformSpec:
    base = np.asarray(base, dtype=float)
    weights = bin_power_weights(grid, base, bands)
    samples = _synthesize(grid, weights, sample_rate, duration)
    if bands is None:
        mag = base.copy()
    else:
        mag = np.zeros_like(base)
        for b in bands:
            a, e = _band_bins(grid, b)
            mag[a:e + 1] = np.maximum(mag[a:e + 1], b.beta * base[a:e + 1])
    for arr in (mag, base, samples):
        arr.setflags(write=False)
    return WaveformSpec(grid, mag, base, float(sample_rate), float(duration), samples,
                        None if bands is None else tuple(bands))


def flat_shape(f):
    return np.ones_like(np.asarray(f, dtype=float))


def gaussian_shape(sigma_hz: float):
    """Magnitude shape with ``|H(f)|^2`` proportional to ``exp(-f^2 / (2 sigma^2))``."""
    def shape(f):
        return np.exp(-np.asarray(f, dtype=float) ** 2 / (4 * sigma_hz**2))
    return shape


def synthesize_fullband(b_h: float, p: float, sample_rate: float, duration: float | None = None,
                        shape=flat_shape) -> WaveformSpec:
    """Conventional pulse over [-b_h/2, b_h/2] carrying power ``p``.

    ``duration`` is the synthesis period and sets the grid spacing
    ``1/duration``; by default the one-sided band gets 1024 bins.
    """
    if b_h <= 0 or p < 0:
        raise ValueError("b_h must be positive and p non-negative")
    if duration is None:
        duration = DEFAULT_BINS_PER_BAND / (b_h / 2)
    grid = _grid_for(b_h, duration)
    mag = np.asarray(shape(grid.freqs), dtype=float)
    ref = total_power(grid, mag)
    if p == 0:
        mag = np.zeros_like(mag)
    elif not ref > 0:
        raise ValueError("shape carries no power")
    else:
        mag = mag * np.sqrt(p / ref)
    return _build(grid, mag, sample_rate, duration, None)


def synthesize_flat_fullband(b_h: float, p: float, sample_rate: float, duration: float | None = None) -> WaveformSpec:
    return synthesize_fullband(b_h, p, sample_rate, duration, flat_shape)


def snap_band(grid: FrequencyGrid, band: Subband) -> Subband:
    """Move band edges to the nearest grid bins (at least one bin wide)."""
    a = int(round((band.f_lo - grid.f_lo) / grid.spacing))
    e = int(round((band.f_hi - grid.f_lo) / grid.spacing))
    a = min(max(a, 0), grid.m_points - 2)
    e = min(max(e, a + 1), grid.m_points - 1)
    return Subband.from_edges(grid.freq(a), grid.freq(e), band.beta)


def snap_plan(plan: SubbandPlan, grid: FrequencyGrid) -> SubbandPlan:
    bands = [snap_band(grid, b) for b in plan.subbands]
    return SubbandPlan(plan.full_band, bands, plan.total_power, plan.noise_density)


def allocate_power(bands, scheme: str, grid: FrequencyGrid, base_magnitude, p: float, weights=None) -> np.ndarray:
    """Redistribution constants (magnitude scales) for ``bands``.

    ``equal_beta``: one beta for all bands. ``equal_power``: each band
    carries p / N_b. ``proportional``: band i carries ``weights[i] * p``.
    The result always conserves total power ``p``.
    """
    base_p = np.array([band_power(grid, base_magnitude, b) for b in bands])
    if scheme == "equal_beta":
        share = base_p / base_p.sum() if base_p.sum() > 0 else base_p
    elif scheme == "equal_power":
        share = np.full(len(bands), 1.0 / len(bands))
    elif scheme == "proportional":
        if weights is None or len(weights) != len(bands):
            raise ValueError("proportional allocation needs one weight per band")
        share = np.asarray(weights, dtype=float)
        if np.any(share < 0) or not share.sum() > 0:
            raise ValueError("weights must be non-negative with a positive sum")
        share = share / share.sum()
    else:
        raise ValueError(f"unknown allocation scheme {scheme!r}")
    need = share > 0
    if np.any(need & ~(base_p > 0)):
        raise ValueError("a band with zero base power cannot carry power")
    betas = np.zeros(len(bands))
    betas[need] = np.sqrt(share[need] * p / base_p[need])
    return betas


def synthesize_cognitive(plan: SubbandPlan, base: WaveformSpec, tol: float = 1e-9) -> WaveformSpec:
    """Multiband pulse with spectrum ``beta_i * H(f)`` on each subband.

    Band edges must be bins of ``base.grid`` (see :func:`snap_plan`). Raises
    :class:`PowerConservationError` if the betas do not reproduce
    ``plan.total_power``.
    """
    if base.bands is not None:
        raise ValueError("base must be a conventional pulse")
    for b in plan.subbands:
        if b.f_hi > base.grid.f_hi * (1 + 1e-12):
            raise ValueError(f"subband {b} lies outside the base band")
    out = _build(base.grid, base.base_magnitude, base.sample_rate, base.duration, plan.subbands)
    got = out.power
    if abs(got - plan.total_power) > tol * max(plan.total_power, np.finfo(float).tiny):
        raise PowerConservationError(
            f"subband powers sum to {got!r} W, expected {plan.total_power!r} W; renormalise the betas"
        )
    return out


@dataclass(frozen=True)
class SnrSummary:
    snr_full: float
    snr_i: np.ndarray
    snr_tilde: float


def snr_summary(plan: SubbandPlan, waveform: WaveformSpec) -> SnrSummary:
    """Full-band, per-band and aggregate cognitive SNRs.

    Noise variances are ``N0 * B_h`` for the full band and ``N0 * B_i``
    per subband, with ``B_i`` the band's two-sided occupancy.
    """
    n0 = plan.noise_density
    if not n0 > 0:
        raise ValueError("noise density must be positive")
    p_i = waveform.band_powers()
    b_i = np.array([b.noise_bandwidth for b in waveform.bands])
    return SnrSummary(
        snr_full=plan.total_power / (n0 * plan.full_band),
        snr_i=p_i / (n0 * b_i),
        snr_tilde=float(p_i.sum() / (n0 * b_i.sum())),
    )


def channel_pulse(waveform: WaveformSpec, i: int) -> np.ndarray:
    """Lowpass-equivalent pulse that the receiver processes for subband ``i``.

    The band is mapped onto a real lowpass spectrum by ``g = 2 (f - f_c)``,
    so the pulse occupies [-w_i, w_i], keeps the band power P_i, and its
    time-domain ratio ``int h'^2 / int h^2`` equals the square of the
    bandpass rms bandwidth of the band. The magnitude is symmetrised about
    the band centre so the pulse is real.
    """
    if waveform.bands is None:
        raise ValueError("conventional waveform has no subbands")
    grid = waveform.grid
    b = waveform.bands[i]
    a, e = _band_bins(grid, b)
    m = e - a
    s = b.beta**2 * waveform.base_magnitude[a:e + 1] ** 2
    s = s * np.r_[0.5, np.ones(m - 1), 0.5]
    sym = s + s[::-1]
    k = 2 * np.arange(m + 1) - m
    pos = k >= 0
    c = np.zeros(m + 1)
    c[k[pos]] = np.sqrt(sym[pos])
    c = c * (-1.0) ** np.arange(m + 1)
    n = int(round(waveform.sample_rate * waveform.duration))
    if not m < n / 2:
        raise ValueError("sample rate too low for the lowpass-equivalent channel")
    return waveform.sample_rate * np.fft.irfft(c, n=n)
