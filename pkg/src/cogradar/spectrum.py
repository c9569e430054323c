"""Frequency grids, radar environment maps and spectral integrals.

Spectra are stored one-sided on a uniform grid starting at (or above) 0 Hz.
The implied real signal has a conjugate-symmetric spectrum, so every power
integral here is twice the one-sided integral. Frequencies are in Hz; rms
bandwidths are returned in rad/s.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import trapezoid

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid of ``m_points`` bins from ``f_lo`` to ``f_hi`` inclusive."""

    f_lo: float
    f_hi: float
    m_points: int

    def __post_init__(self):
        if not self.f_hi > self.f_lo:
            raise ValueError("f_hi must exceed f_lo")
        if int(self.m_points) != self.m_points or self.m_points < 2:
            raise ValueError("m_points must be an integer >= 2")

    @property
    def spacing(self) -> float:
        return (self.f_hi - self.f_lo) / (self.m_points - 1)

    @property
    def freqs(self) -> np.ndarray:
        return self.f_lo + self.spacing * np.arange(self.m_points)

    def freq(self, k: int) -> float:
        if not 0 <= k < self.m_points:
            raise IndexError(f"bin {k} outside grid")
        return self.f_lo + k * self.spacing

    def bin_of(self, f: float, tol: float = 1e-9) -> int:
        """Index of the bin at frequency ``f``; raises if ``f`` is off-grid."""
        x = (f - self.f_lo) / self.spacing
        k = int(round(x))
        if abs(x - k) > tol * max(1.0, abs(x)) or not 0 <= k < self.m_points:
            raise ValueError(f"{f} Hz is not a grid point")
        return k


@dataclass(frozen=True)
class Subband:
    """Contiguous band ``[f_center - width/2, f_center + width/2]`` on the
    one-sided axis, scaled in magnitude by ``beta``."""

    f_center: float
    width: float
    beta: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("subband width must be positive")
        if self.f_lo < -1e-12 * max(1.0, self.width):
            raise ValueError("subband extends below 0 Hz")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")

    @property
    def f_lo(self) -> float:
        return self.f_center - self.width / 2

    @property
    def f_hi(self) -> float:
        return self.f_center + self.width / 2

    @property
    def noise_bandwidth(self) -> float:
        """Two-sided occupancy of the band (Hz), the bandwidth that sets its
        noise variance. A band spanning the whole one-sided axis of a full
        band B_h gets exactly B_h."""
        return 2.0 * self.width

    @classmethod
    def from_edges(cls, f_lo: float, f_hi: float, beta: float = 1.0) -> "Subband":
        return cls(0.5 * (f_lo + f_hi), f_hi - f_lo, beta)

    def overlaps(self, other: "Subband", tol: float = 1e-12) -> bool:
        return self.f_lo < other.f_hi - tol and other.f_lo < self.f_hi - tol


@dataclass(frozen=True)
class SubbandPlan:
    """Subbands of a cognitive waveform plus the full-band reference."""

    full_band: float
    subbands: tuple
    total_power: float
    noise_density: float

    def __post_init__(self):
        object.__setattr__(self, "subbands", tuple(self.subbands))
        if not self.subbands:
            raise ValueError("a plan needs at least one subband")
        if not self.full_band > 0:
            raise ValueError("full_band must be positive")
        if self.total_power < 0 or self.noise_density < 0:
            raise ValueError("power and noise density must be non-negative")
        half = self.full_band / 2
        for b in self.subbands:
            if b.f_hi > half * (1 + 1e-12):
                raise ValueError(f"subband {b} exceeds the one-sided band [0, {half}]")
        bands = sorted(self.subbands, key=lambda b: b.f_lo)
        for a, b in zip(bands, bands[1:]):
            if a.overlaps(b):
                raise ValueError("subbands must be pairwise disjoint")

    @property
    def n_bands(self) -> int:
        return len(self.subbands)

    @property
    def widths(self) -> np.ndarray:
        return np.array([b.width for b in self.subbands])

    @property
    def betas(self) -> np.ndarray:
        return np.array([b.beta for b in self.subbands])

    def with_betas(self, betas) -> "SubbandPlan":
        bands = [Subband(b.f_center, b.width, float(beta)) for b, beta in zip(self.subbands, betas)]
        return SubbandPlan(self.full_band, bands, self.total_power, self.noise_density)


@dataclass(frozen=True)
class RadarEnvironmentMap:
    """Interference power density per grid bin and the set of bins that must
    not be used."""

    grid: FrequencyGrid
    interference: np.ndarray
    excluded: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        y = np.asarray(self.interference, dtype=float)
        if y.shape != (self.grid.m_points,):
            raise ValueError("interference length must equal grid.m_points")
        if not np.all(np.isfinite(y)) or np.any(y < 0):
            raise ValueError("interference must be finite and non-negative")
        y.setflags(write=False)
        object.__setattr__(self, "interference", y)
        ex = frozenset(int(k) for k in self.excluded)
        if any(not 0 <= k < self.grid.m_points for k in ex):
            raise ValueError("excluded bins outside grid")
        object.__setattr__(self, "excluded", ex)

    @property
    def admissible(self) -> np.ndarray:
        mask = np.ones(self.grid.m_points, dtype=bool)
        mask[list(self.excluded)] = False
        return mask


def read_rem_csv(path) -> RadarEnvironmentMap:
    """Load a REM from ``freq_hz,interference_w_per_hz,excluded`` CSV."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        expected = ["freq_hz", "interference_w_per_hz", "excluded"]
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != expected:
            raise ValueError(f"REM header must be {','.join(expected)}")
        rows = [(float(r["freq_hz"]), float(r["interference_w_per_hz"]), r["excluded"].strip()) for r in reader]
    if len(rows) < 2:
        raise ValueError("REM needs at least two rows")
    f = np.array([r[0] for r in rows])
    steps = np.diff(f)
    if np.any(steps <= 0):
        raise ValueError("REM frequencies must be strictly increasing")
    grid = FrequencyGrid(f[0], f[-1], len(f))
    if np.max(np.abs(steps - grid.spacing)) > 1e-9 * abs(grid.spacing) * len(f):
        raise ValueError("REM frequencies must be uniformly spaced")
    if any(r[2] not in ("0", "1") for r in rows):
        raise ValueError("excluded column must be 0 or 1")
    excluded = frozenset(k for k, r in enumerate(rows) if r[2] == "1")
    return RadarEnvironmentMap(grid, np.array([r[1] for r in rows]), excluded)


def write_rem_csv(rem: RadarEnvironmentMap, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["freq_hz", "interference_w_per_hz", "excluded"])
        for k, (f, y) in enumerate(zip(rem.grid.freqs, rem.interference)):
            w.writerow([f"{f:.17g}", f"{y:.17g}", int(k in rem.excluded)])


def _band_samples(grid: FrequencyGrid, values: np.ndarray, f_lo: float, f_hi: float):
    """Grid abscissae inside ``[f_lo, f_hi]`` with linearly interpolated end
    points appended, so that trapezoid integration honours fractional edges."""
    span = grid.f_hi - grid.f_lo
    tol = 1e-12 * span
    if f_lo < grid.f_lo - tol or f_hi > grid.f_hi + tol or f_hi < f_lo:
        raise ValueError(f"band [{f_lo}, {f_hi}] lies outside the grid [{grid.f_lo}, {grid.f_hi}]")
    f_lo = max(f_lo, grid.f_lo)
    f_hi = min(f_hi, grid.f_hi)
    f = grid.freqs
    inner = (f > f_lo + tol) & (f < f_hi - tol)
    x = np.concatenate(([f_lo], f[inner], [f_hi]))
    y = np.concatenate(([np.interp(f_lo, f, values)], values[inner], [np.interp(f_hi, f, values)]))
    return x, y


def band_power(grid: FrequencyGrid, magnitude, band: Subband) -> float:
    """Two-sided power ``2 * integral |H(f)|^2 df`` over ``band``.

    Composite trapezoid on the grid, with |H|^2 linearly interpolated at
    band edges that fall between bins.
    """
    p = np.asarray(magnitude, dtype=float) ** 2
    x, y = _band_samples(grid, p, band.f_lo, band.f_hi)
    return 2.0 * float(trapezoid(y, x))


def total_power(grid: FrequencyGrid, magnitude) -> float:
    p = np.asarray(magnitude, dtype=float) ** 2
    return 2.0 * float(trapezoid(p, grid.freqs))


def rms_bandwidth_lowpass(grid: FrequencyGrid, magnitude, b_h: float | None = None) -> float:
    """rms bandwidth (rad/s) of a lowpass spectrum occupying [-b_h/2, b_h/2].

    Only the one-sided half is stored; the second moment of the symmetric
    two-sided spectrum equals the one-sided moment about 0 Hz. A flat
    spectrum gives ``2*pi * (b_h/2) / sqrt(3)``.
    """
    f_hi = grid.f_hi if b_h is None else b_h / 2
    p = np.asarray(magnitude, dtype=float) ** 2
    x, y = _band_samples(grid, p, max(grid.f_lo, 0.0), f_hi)
    den = trapezoid(y, x)
    if not den > 0:
        raise ValueError("spectrum carries no power")
    num = trapezoid(y * x**2, x)
    return TWO_PI * float(np.sqrt(num / den))


def rms_bandwidth_bandpass(grid: FrequencyGrid, magnitude, band: Subband) -> float:
    """rms bandwidth (rad/s) of the bandpass signal confined to ``band``.

    Twice the centred rms spread of the band, so a flat band of width w
    yields ``2*pi * w / sqrt(3)``, the same value as a lowpass signal whose
    one-sided width is w.
    """
    p = np.asarray(magnitude, dtype=float) ** 2
    x, y = _band_samples(grid, p, band.f_lo, band.f_hi)
    den = trapezoid(y, x)
    if not den > 0:
        raise ValueError("band carries no power")
    num = trapezoid(y * (x - band.f_center) ** 2, x)
    return 2.0 * TWO_PI * float(np.sqrt(num / den))
