"""Low-level numerical utilities: log-domain quadrature and 1-D minimization.

These helpers are deliberately small and dependency-light.  The log-domain
integrator exists because several integrands in this package span hundreds of
orders of magnitude (sharply peaked exponential-weighted kernels); integrating
exp(logf - max logf) keeps everything in a safe floating-point range.
"""

from __future__ import annotations

import math

import numpy as np


class ConvergenceError(RuntimeError):
    """Raised when an iterative numerical scheme stalls above its tolerance."""


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


def golden_section_min(f, lo, hi, rel_tol=1e-10, max_iter=200):
    """Minimize a unimodal scalar function on [lo, hi] by golden-section search.

    Returns (x_min, f(x_min)).  The bracket endpoints are also candidates, so
    a minimum sitting on the boundary is returned correctly.
    """
    if not hi > lo:
        raise ValueError("invalid bracket: need hi > lo")
    a, b = lo, hi
    h = b - a
    c = a + _INV_PHI2 * h
    d = a + _INV_PHI * h
    fc = f(c)
    fd = f(d)
    for _ in range(max_iter):
        if h <= rel_tol * (abs(a) + abs(b)) + 1e-300:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + _INV_PHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INV_PHI * h
            fd = f(d)
    candidates = [(fc, c), (fd, d), (f(lo), lo), (f(hi), hi)]
    fbest, xbest = min(candidates, key=lambda t: t[0])
    return xbest, fbest


def log_integral_simpson(logf, lo, hi, rel_tol=1e-11, max_levels=22):
    """Return log of integral_lo^hi exp(logf(x)) dx by doubling composite Simpson.

    ``logf`` must accept a numpy array and may return -inf (integrand zero).
    The samples are shifted by their running maximum before exponentiation, so
    integrands with very large or very small log-magnitudes are handled.
    Convergence requires two consecutive doublings to agree to ``rel_tol``.
    """
    if not hi > lo:
        raise ValueError("invalid interval")
    n = 64
    x = np.linspace(lo, hi, n + 1)
    ly = np.asarray(logf(x), dtype=float)
    if np.isnan(ly).any():
        raise ConvergenceError("log-integrand returned NaN")
    shift = float(np.max(ly))
    if shift == -math.inf:
        return -math.inf, 0.0
    prev = None
    hits = 0
    for _ in range(max_levels):
        h = (hi - lo) / (len(x) - 1)
        w = np.exp(ly - shift)
        s = (h / 3.0) * (w[0] + w[-1] + 4.0 * w[1::2].sum() + 2.0 * w[2:-1:2].sum())
        if prev is not None and s > 0.0:
            err = abs(s - prev)
            if err <= rel_tol * s:
                hits += 1
                if hits >= 2:
                    return shift + math.log(s), err / s
            else:
                hits = 0
        prev = s
        xm = 0.5 * (x[:-1] + x[1:])
        lym = np.asarray(logf(xm), dtype=float)
        if np.isnan(lym).any():
            raise ConvergenceError("log-integrand returned NaN")
        x2 = np.empty(2 * len(x) - 1)
        x2[0::2] = x
        x2[1::2] = xm
        y2 = np.empty_like(x2)
        y2[0::2] = ly
        y2[1::2] = lym
        x, ly = x2, y2
        m = float(np.max(ly))
        if m > shift:
            # rescale lazily: exp(ly - shift) stays finite for modest overshoot
            if m > shift + 30.0:
                shift = m
    raise ConvergenceError(
        f"Simpson refinement did not reach rel_tol={rel_tol:g} "
        f"within {max_levels} doublings"
    )
