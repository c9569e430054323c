"""Picking quiet subbands from a radio environment map.

The bundled map has 64 bins over [0, 1] Hz with three interference bumps
and a few bins that are off-limits. We ask for two 6-bin blocks at least
two bins apart, once with the exact dynamic-programming oracle and once
with the fast greedy placement, and compare the interference they let in.

    python demos/03_band_selection.py
"""
from importlib import resources

import numpy as np

from cogradar import SelectionConstraints, read_rem_csv, select_bands_greedy, select_bands_oracle

path = resources.files("cogradar") / "data" / "rem64.csv"
rem = read_rem_csv(str(path))
print(f"REM: {rem.grid.m_points} bins, excluded bins {sorted(rem.excluded)}")

bars = " .:-=+*#%@"
y = rem.interference / rem.interference.max()
print("interference  |" + "".join("X" if k in rem.excluded else bars[int(v * 9)] for k, v in enumerate(y)) + "|")

c = SelectionConstraints(n_bands=2, widths=6, min_separation=2)
for name, fn in (("oracle", select_bands_oracle), ("greedy", select_bands_greedy)):
    r = fn(rem, c)
    mask = np.zeros(rem.grid.m_points, dtype=bool)
    for s, w in zip(r.start_bins, r.widths_bins):
        mask[s:s + w] = True
    print(f"{name:>6} picks    |" + "".join("#" if v else " " for v in mask) + "|"
          f"  energy {r.objective:.5f}")
    for b in r.bands:
        print(f"         [{b.f_lo:.4f}, {b.f_hi:.4f}] Hz")
