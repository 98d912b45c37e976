"""Special functions and combinatorial enumeration for the service-process sums.

Provides the upper incomplete gamma function on the full real parameter line,
the confluent hypergeometric function of the second kind U(a,b,z) (with a
log-scaled variant for large parameters), and the weak-composition machinery
used to expand the multicast channel-gain distribution.

All functions here are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import special as sp

from .numerics import log_integral_simpson


class SpecfunDomainError(ValueError):
    """Argument outside the supported domain."""


# --------------------------------------------------------------------------
# incomplete gamma
# --------------------------------------------------------------------------

def upper_incomplete_gamma(a: float, x: float) -> float:
    """Upper incomplete gamma Gamma(a, x) = int_x^inf t^(a-1) e^(-t) dt.

    Supports any real ``a``.  For a <= 0 the point x = 0 is excluded (the
    integral diverges there).  For negative ``a`` the value is obtained by
    downward recurrence

        Gamma(a, x) = (Gamma(a+1, x) - x^a e^(-x)) / a

    starting from a + ceil(|a|) + 1 > 0, which is the stable direction (the
    solution grows as ``a`` decreases, so relative errors are not amplified).
    """
    if x < 0.0:
        raise SpecfunDomainError(f"x must be >= 0, got {x}")
    if a <= 0.0 and x == 0.0:
        raise SpecfunDomainError("Gamma(a, 0) diverges for a <= 0")
    if x == 0.0:
        return _complete_gamma(a)
    if a > 0.0:
        val = sp.gammaincc(a, x) * _complete_gamma(a)
        _check_finite(val)
        return float(val)
    if a == 0.0:
        return float(sp.exp1(x))

    n = math.ceil(-a) + 1
    a0 = a + n
    g = sp.gammaincc(a0, x) * _complete_gamma(a0)
    logx = math.log(x)
    ai = a0
    for _ in range(n):
        ai -= 1.0
        if ai == 0.0:
            g = float(sp.exp1(x))
        else:
            g = (g - math.exp(ai * logx - x)) / ai
    _check_finite(g)
    return float(g)


def scaled_upper_gamma(a: float, x: float) -> float:
    """Exponentially scaled form e^x x^(-a) Gamma(a, x), for x > 0.

    This is the quantity that appears in alternating-sum expansions; computing
    it directly avoids overflow of e^x and underflow of Gamma(a, x).  For
    x >= 1 a modified-Lentz continued fraction is used (valid for any real a
    once x exceeds roughly a + 1; always true here for a < 0).  For x < 1 the
    plain product is safe and is computed from :func:`upper_incomplete_gamma`.
    """
    if x <= 0.0:
        raise SpecfunDomainError(f"x must be > 0, got {x}")
    if x >= 1.0 and x >= a + 1.0:
        return _gamma_cf(a, x)
    return math.exp(x - a * math.log(x)) * upper_incomplete_gamma(a, x)


def _gamma_cf(a: float, x: float, max_iter: int = 10000) -> float:
    # Continued fraction for e^x x^(-a) Gamma(a,x), modified Lentz iteration.
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0.0 else 1.0 / tiny
    h = d
    for i in range(1, max_iter):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise ArithmeticError(f"incomplete-gamma continued fraction stalled at a={a}, x={x}")


def _complete_gamma(a: float) -> float:
    try:
        return math.gamma(a)
    except OverflowError:
        raise OverflowError(f"Gamma({a}) exceeds the double range") from None


def _check_finite(v: float) -> None:
    if not math.isfinite(v):
        raise OverflowError("incomplete gamma value left the representable range")


# --------------------------------------------------------------------------
# Tricomi confluent hypergeometric function of the second kind
# --------------------------------------------------------------------------

def log_tricomi_u(a: float, b: float, z: float) -> float:
    """log U(a; b; z) for a > 0, z > 0, via the integral representation

        U(a,b,z) = (1/Gamma(a)) int_0^inf e^(-z t) t^(a-1) (1+t)^(b-a-1) dt.

    The exponential substitution t = e^w removes the endpoint power t^(a-1)
    entirely (the transformed integrand is smooth on the whole line, decaying
    like e^(a w) on the left and doubly exponentially on the right), so the
    adaptive doubling-Simpson refinement converges at full order for every
    a > 0, integer or not.  The integral is evaluated in the log domain;
    useful when the direct value would underflow (large a pushes U far below
    the double range).
    """
    if a <= 0.0:
        raise SpecfunDomainError(f"a must be > 0, got {a}")
    if z <= 0.0:
        raise SpecfunDomainError(f"z must be > 0, got {z}")

    bma1 = b - a - 1.0

    def log_integrand(w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return -z * np.exp(w) + a * w + bma1 * np.logaddexp(0.0, w)

    # Dominant-factor peak: e^(-z e^w + a w) is maximal at w = ln(a/z).
    w_peak = math.log(a / z)
    scan = np.linspace(w_peak - 10.0, w_peak + 5.0, 257)
    lpeak = float(np.max(log_integrand(scan)))
    w_hi = w_peak + 5.0
    while float(log_integrand(np.array([w_hi]))[0]) > lpeak - 62.0:
        w_hi += 5.0
        if w_hi > 800.0:
            raise ArithmeticError("failed to truncate U integrand tail")
    # Left tail decays like e^(a w): cut where it is ~1e-27 of the peak.
    w_lo = min(w_peak, 0.0) - 62.0 / a
    while float(log_integrand(np.array([w_lo]))[0]) > lpeak - 62.0:
        w_lo -= 62.0 / a
        if w_lo < -1e7:
            raise ArithmeticError("failed to truncate U integrand left tail")

    log_i, _ = log_integral_simpson(log_integrand, w_lo, w_hi, rel_tol=2e-11)
    return log_i - math.lgamma(a)


def tricomi_u(a: float, b: float, z: float) -> float:
    """U(a; b; z) for a > 0, z > 0.  See :func:`log_tricomi_u`."""
    return math.exp(log_tricomi_u(a, b, z))


# --------------------------------------------------------------------------
# weak compositions and per-term weights
# --------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Composition:
    """A weak composition (k_1, ..., k_M) of K into M non-negative parts."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.parts) < 1 or any(p < 0 for p in self.parts):
            raise ValueError(f"invalid composition parts {self.parts}")

    @property
    def total(self) -> int:
        return sum(self.parts)


def composition_count(K: int, M: int) -> int:
    """Number of weak compositions of K into M parts: C(K+M-1, M-1)."""
    return math.comb(K + M - 1, M - 1)


def compositions(K: int, M: int) -> Iterator[Composition]:
    """Enumerate all weak compositions of K into M parts exactly once.

    Order matches first-part-descending lexicographic enumeration, e.g.
    (2, 2) -> (2,0), (1,1), (0,2).  Memory per step is O(M).
    """
    if K < 0 or M < 1:
        raise SpecfunDomainError(f"need K >= 0 and M >= 1, got K={K}, M={M}")
    for parts in _parts_iter(K, M):
        yield Composition(parts)


def _parts_iter(k: int, m: int) -> Iterator[tuple[int, ...]]:
    if m == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in _parts_iter(k - first, m - 1):
            yield (first,) + rest


def log_term_weight(c: Composition) -> tuple[float, int]:
    """Per-composition weight of the exact service-transform expansion.

    Returns (log phi, theta) with

        phi   = multinomial(K; k_1..k_M) / prod_n (n!)^(k_(n+1))
        theta = sum_n n * k_(n+1)

    where K = sum of parts and n runs over 0..M-1.  Computed through
    log-gamma so large multinomials cannot overflow.
    """
    parts = c.parts
    K = sum(parts)
    log_phi = math.lgamma(K + 1)
    theta = 0
    for n, kn in enumerate(parts):
        log_phi -= math.lgamma(kn + 1)
        log_phi -= kn * math.lgamma(n + 1)
        theta += n * kn
    return log_phi, theta
