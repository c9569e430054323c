"""Independent reference computations used to check the library.

Nothing here imports the code under test except plain data containers;
each oracle uses a different numerical route than the implementation
(brute-force enumeration, finer grids, finite differences, quadrature,
bisection).
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate


def brute_force_selection(interference, admissible, widths, min_sep, spacing=1.0):
    """Enumerate every ordered placement of the blocks; return the minimum
    energy and the lexicographically smallest sorted start tuple achieving it.

    Blocks may appear in any order along the axis (widths are matched to
    bands by permutation), must not overlap, and must be ``min_sep`` bins
    apart. Returns (inf, None) when nothing fits.
    """
    y = np.asarray(interference, dtype=float)
    ok = np.asarray(admissible, dtype=bool)
    m = y.size
    best = (math.inf, None)
    for perm in set(itertools.permutations(widths)):
        ranges = [range(m - w + 1) for w in perm]
        for starts in itertools.product(*ranges):
            order = sorted(zip(starts, perm))
            feasible = True
            for (s0, w0), (s1, _) in zip(order, order[1:]):
                if s1 < s0 + w0 + min_sep:
                    feasible = False
                    break
            if not feasible:
                continue
            if not all(ok[s:s + w].all() for s, w in order):
                continue
            e = sum(float(np.sum(y[s:s + w])) for s, w in order) * spacing
            key = (e, tuple(s for s, _ in order))
            if best[1] is None or key < (best[0], best[1]):
                best = key
    return best


def fine_trapezoid(fun, a, b, factor=10, n=101):
    """Trapezoid rule of ``fun`` on a grid ``factor`` times denser."""
    x = np.linspace(a, b, (n - 1) * factor + 1)
    return float(np.trapezoid(fun(x), x))


def periodic_derivative(x, dt):
    """Sixth-order central finite difference of a periodic sequence."""
    c = (3 / 4, -3 / 20, 1 / 60)
    d = np.zeros_like(x)
    for k, ck in enumerate(c, start=1):
        d += ck * (np.roll(x, -k) - np.roll(x, k))
    return d / dt


def time_rms_sq(samples, sample_rate):
    """``int h'(t)^2 dt / int h(t)^2 dt`` from time samples (rad^2/s^2)."""
    dt = 1.0 / sample_rate
    d = periodic_derivative(np.asarray(samples, dtype=float), dt)
    return float(np.sum(d**2) / np.sum(np.asarray(samples) ** 2))


def time_energy(samples, sample_rate):
    return float(np.sum(np.asarray(samples, dtype=float) ** 2) / sample_rate)


def q_quad(x):
    """Gaussian right tail by quadrature of the density."""
    val, _ = integrate.quad(lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi), x, math.inf,
                            epsabs=1e-14, epsrel=1e-13)
    return val


def gamma_reg_quad(a, b):
    """Regularised lower incomplete gamma by adaptive quadrature."""
    val, _ = integrate.quad(lambda t: t ** (a - 1) * math.exp(-t), 0.0, b, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val / math.gamma(a)


def ezb_reference(snr_q, info, var0):
    """Extended Ziv-Zakai closed form assembled from the quadrature
    special functions."""
    if snr_q == 0:
        return var0
    return var0 * 2 * q_quad(math.sqrt(snr_q / 2)) + gamma_reg_quad(1.5, snr_q / 4) / info


def bisect(fun, lo, hi, tol=1e-15, max_iter=200):
    """Root of a sign-changing scalar function by plain bisection."""
    flo = fun(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if fm == 0 or (hi - lo) < tol * max(1.0, abs(mid)):
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
