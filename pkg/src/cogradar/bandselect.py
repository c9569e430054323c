"""Low-interference subband selection on a radar environment map.

Each band is a block of contiguous REM bins. The objective is the total
interference energy inside the chosen blocks, ``sum(interference[k]) *
spacing``. Two solvers share the constraint model: an exact optimiser for
small maps and a block-scan greedy that scales to any size.
"""

from __future__ import annotations

from dataclasses import dataclass
import sys
from functools import lru_cache

import numpy as np

from .spectrum import RadarEnvironmentMap, Subband

ORACLE_MAX_BINS = 256
ORACLE_MAX_BANDS = 4


class InfeasibleSelection(ValueError):
    """No placement satisfies the constraints."""


class SelectionTooLarge(ValueError):
    """Instance exceeds the exact solver's size guard; use the greedy solver."""


@dataclass(frozen=True)
class SelectionConstraints:
    """Block widths (bins), band count and minimum gap between blocks.

    ``widths`` is either an int (all blocks that wide) or a sequence of one
    width per band. ``fidelity_xi`` is stored for a block-sparse fitting
    formulation and is not used by the energy-objective solvers.
    """

    n_bands: int
    widths: object
    min_separation: int = 0
    fidelity_xi: float = 0.0

    def __post_init__(self):
        if int(self.n_bands) != self.n_bands or self.n_bands < 1:
            raise ValueError("n_bands must be a positive integer")
        if np.isscalar(self.widths):
            w = (int(self.widths),) * self.n_bands
        else:
            w = tuple(int(d) for d in self.widths)
        if len(w) != self.n_bands:
            raise ValueError("need one width per band")
        if any(d < 1 for d in w):
            raise ValueError("block widths must be >= 1 bin")
        if self.min_separation < 0:
            raise ValueError("min_separation must be >= 0")
        if self.fidelity_xi < 0:
            raise ValueError("fidelity_xi must be >= 0")
        object.__setattr__(self, "widths", w)

    @property
    def footprint(self) -> int:
        return sum(self.widths) + (self.n_bands - 1) * self.min_separation


@dataclass(frozen=True)
class SelectionResult:
    bands: tuple
    start_bins: tuple
    widths_bins: tuple
    objective: float
    method: str

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "objective": self.objective,
            "bands": [
                {"f_center": b.f_center, "width": b.width, "start_bin": s, "width_bins": d}
                for b, s, d in zip(self.bands, self.start_bins, self.widths_bins)
            ],
        }


def block_energies(rem: RadarEnvironmentMap, width: int) -> np.ndarray:
    """Interference energy of every width-``width`` block by start bin;
    blocks touching an excluded bin get ``inf``."""
    m = rem.grid.m_points
    if width > m:
        return np.full(0, np.inf)
    csum = np.concatenate(([0.0], np.cumsum(rem.interference)))
    energy = (csum[width:] - csum[:-width]) * rem.grid.spacing
    bad = np.concatenate(([0], np.cumsum(~rem.admissible)))
    blocked = (bad[width:] - bad[:-width]) > 0
    energy[blocked] = np.inf
    return energy


def _check_feasible(rem: RadarEnvironmentMap, c: SelectionConstraints):
    if c.footprint > int(rem.admissible.sum()):
        raise InfeasibleSelection(
            f"{c.n_bands} blocks of widths {c.widths} with separation {c.min_separation} "
            f"need {c.footprint} bins; only {int(rem.admissible.sum())} are admissible"
        )


def _result(rem, placements, method) -> SelectionResult:
    # placements: list of (start, width) sorted by start
    placements = sorted(placements)
    g = rem.grid
    bands, energy = [], 0.0
    for s, d in placements:
        lo = max(g.f_lo, g.freq(s) - g.spacing / 2)
        hi = min(g.f_hi, g.freq(s + d - 1) + g.spacing / 2)
        bands.append(Subband.from_edges(lo, hi))
        energy += float(np.sum(rem.interference[s:s + d])) * g.spacing
    return SelectionResult(
        tuple(bands), tuple(s for s, _ in placements), tuple(d for _, d in placements), energy, method
    )


def select_bands_oracle(rem: RadarEnvironmentMap, c: SelectionConstraints) -> SelectionResult:
    """Globally optimal placement by dynamic programming over (bin, set of
    blocks still to place).

    Blocks may appear in any frequency order. Among equal-energy placements
    the lexicographically smallest tuple of ascending start bins wins.
    """
    m = rem.grid.m_points
    if m > ORACLE_MAX_BINS or c.n_bands > ORACLE_MAX_BANDS:
        raise SelectionTooLarge(
            f"exact selection is limited to {ORACLE_MAX_BINS} bins and {ORACLE_MAX_BANDS} bands; "
            "use select_bands_greedy"
        )
    _check_feasible(rem, c)
    energies = {d: block_energies(rem, d) for d in set(c.widths)}
    widths, sep = c.widths, c.min_separation
    full = (1 << c.n_bands) - 1

    @lru_cache(maxsize=None)
    def best(pos: int, mask: int):
        # (energy, starts, placements) for placing blocks in ``mask`` in bins >= pos
        if mask == 0:
            return 0.0, (), ()
        if pos >= m:
            return None
        cands = []
        seen = set()
        for j in range(c.n_bands):
            if not mask >> j & 1 or widths[j] in seen:
                continue
            # blocks of equal width are interchangeable; try one representative
            seen.add(widths[j])
            d = widths[j]
            if pos + d > m or not np.isfinite(energies[d][pos]):
                continue
            rest = mask & ~(1 << j)
            tail = best(pos + d + sep, rest) if rest else (0.0, (), ())
            if tail is None:
                continue
            cands.append((energies[d][pos] + tail[0], (pos,) + tail[1], ((pos, d),) + tail[2]))
        skip = best(pos + 1, mask)
        if skip is not None:
            cands.append(skip)
        if not cands:
            return None
        return min(cands, key=lambda t: (t[0], t[1]))

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * m + 100))
    try:
        sol = best(0, full)
    finally:
        sys.setrecursionlimit(limit)
    if sol is None:
        raise InfeasibleSelection("no admissible placement satisfies the constraints")
    return _result(rem, list(sol[2]), "oracle")


def select_bands_greedy(rem: RadarEnvironmentMap, c: SelectionConstraints) -> SelectionResult:
    """Place blocks one at a time, widest first, each at the cheapest
    still-available position (ties to the lowest start), blocking it plus
    the separation margin for later blocks.

    Widest-first ordering matters when widths differ: a narrow block placed
    early can split the only region where a wide block fits cheaply.
    """
    _check_feasible(rem, c)
    m = rem.grid.m_points
    available = rem.admissible.copy()
    placements = []
    for d in sorted(c.widths, reverse=True):
        free = np.concatenate(([0], np.cumsum(~available)))
        ok = (free[d:] - free[:-d]) == 0 if d <= m else np.zeros(0, bool)
        energy = np.where(ok, block_energies(rem, d), np.inf)
        if energy.size == 0 or not np.isfinite(energy).any():
            raise InfeasibleSelection(f"no room left for a {d}-bin block after {len(placements)} placements")
        s = int(np.argmin(energy))
        placements.append((s, d))
        available[max(0, s - c.min_separation):s + d + c.min_separation] = False
    return _result(rem, placements, "greedy")


def select_bands(rem: RadarEnvironmentMap, c: SelectionConstraints, method: str = "greedy") -> SelectionResult:
    if method == "oracle":
        return select_bands_oracle(rem, c)
    if method == "greedy":
        return select_bands_greedy(rem, c)
    raise ValueError(f"unknown method {method!r}")
