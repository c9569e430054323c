"""Seeded REM instances shared by the selection tests and the acceptance run."""

import numpy as np

from cogradar.spectrum import FrequencyGrid, RadarEnvironmentMap

CORPUS_SEED = 7321
CORPUS_SIZE = 200


def uniform_corpus(n=CORPUS_SIZE, seed=CORPUS_SEED, m=64, width=8, min_sep=4):
    """i.i.d. uniform interference on ``m`` bins, two blocks of ``width``
    bins at least ``min_sep`` apart. Yields (rem, widths, min_sep)."""
    rng = np.random.default_rng(seed)
    g = FrequencyGrid(0.0, 1.0, m)
    for _ in range(n):
        yield RadarEnvironmentMap(g, rng.uniform(size=m)), (width, width), min_sep


def structured_corpus(n=CORPUS_SIZE, seed=CORPUS_SEED, m=64, excluded_frac=0.1):
    """Gaussian interference bumps over an exponential floor, random
    exclusions, mixed widths 3-10 and separations 0-3. Harder for greedy
    placement than the i.i.d. corpus."""
    rng = np.random.default_rng(seed)
    g = FrequencyGrid(0.0, 1.0, m)
    f = g.freqs
    for _ in range(n):
        y = 0.05 * rng.exponential(size=m)
        for _ in range(rng.integers(1, 5)):
            y += rng.uniform(0.2, 2.0) * np.exp(-((f - rng.uniform()) / rng.uniform(0.03, 0.2)) ** 2)
        ex = frozenset(int(k) for k in rng.choice(m, size=rng.binomial(m, excluded_frac), replace=False))
        widths = tuple(int(w) for w in rng.integers(3, 11, size=2))
        yield RadarEnvironmentMap(g, y, ex), widths, int(rng.integers(0, 4))


def compare_on(corpus):
    """Greedy vs oracle statistics: (n_feasible, exact_matches, max_ratio,
    n_within_1_1, greedy_infeasible)."""
    from cogradar.bandselect import InfeasibleSelection, SelectionConstraints, select_bands_greedy, select_bands_oracle

    n = exact = within = g_inf = 0
    worst = 1.0
    for rem, widths, sep in corpus:
        c = SelectionConstraints(len(widths), widths, sep)
        try:
            o = select_bands_oracle(rem, c)
        except InfeasibleSelection:
            continue
        n += 1
        try:
            g = select_bands_greedy(rem, c)
        except InfeasibleSelection:
            g_inf += 1
            worst = float("inf")
            continue
        ratio = g.objective / o.objective if o.objective > 0 else (1.0 if g.objective == 0 else float("inf"))
        worst = max(worst, ratio)
        within += ratio <= 1.1
        exact += g.start_bins == o.start_bins
    return n, exact, worst, within, g_inf
