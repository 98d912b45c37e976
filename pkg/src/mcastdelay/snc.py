"""Stochastic-network-calculus layer on top of the service transform.

For constant-rate fluid arrivals of lambda nats/slot the SNR-domain arrival
transform is e^(lambda (s-1)).  The steady-state kernel

    K(s, -w) = M_g(1 - N s)^w / (1 - e^(lambda s) M_g(1 - N s))

upper-bounds the stationary delay-violation probability once minimized over
the stability region {s > 0 : e^(lambda s) M_g(1 - N s) < 1}.  Rates are kept
in nats per slot internally; external bit/s figures convert through
lambda = rate_bps * slot_seconds * ln 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .channel import SystemConfig, min_gain_sf
from .mellin import MellinMethod, service_mellin
from .numerics import golden_section_min


@dataclass(frozen=True, slots=True)
class ArrivalSpec:
    """Constant-rate fluid arrivals, lambda in nats per slot."""

    lambda_nats_per_slot: float

    def __post_init__(self) -> None:
        if not self.lambda_nats_per_slot > 0.0:
            raise ValueError("arrival rate must be > 0")

    @classmethod
    def from_rate_bps(cls, rate_bps: float, slot_seconds: float) -> "ArrivalSpec":
        """Convert an external bit/s rate to nats per slot."""
        return cls(rate_bps * slot_seconds * math.log(2.0))


@dataclass(frozen=True, slots=True)
class DelayBoundResult:
    """Optimized delay bound for target delay w (slots).

    ``bound`` is clipped at 1 (a probability bound above 1 is vacuous).  For
    an unstable configuration ``stable`` is False, the bound is 1, and the
    optimizer fields are None.
    """

    w: int
    bound: float
    s_star: float | None
    stable_s_interval: tuple[float, float] | None
    method: MellinMethod
    stable: bool


class InstabilityError(RuntimeError):
    """Kernel evaluated at an s violating the stability condition."""


def arrival_mellin(arr: ArrivalSpec, s: float) -> float:
    """SNR-domain arrival transform e^(lambda (s-1))."""
    return math.exp(arr.lambda_nats_per_slot * (s - 1.0))


def mean_service_nats(cfg: SystemConfig) -> float:
    """Mean per-slot service N * E[log(1 + rho X_(1))] in nats, by quadrature."""
    rho = cfg.rho
    val, _ = integrate.quad(
        lambda x: min_gain_sf(cfg, x) * rho / (1.0 + rho * x),
        0.0,
        np.inf,
        epsabs=1e-12,
        epsrel=1e-11,
        limit=200,
    )
    return cfg.N * val


_MELLIN_CACHE: dict[tuple, float] = {}


def _service_mellin_cached(cfg: SystemConfig, s: float, method: MellinMethod,
                           high_precision: bool, max_km: int) -> float:
    key = (cfg, method, s, high_precision, max_km)
    val = _MELLIN_CACHE.get(key)
    if val is None:
        val = service_mellin(
            cfg, s, method,
            alzer_high_precision=high_precision, alzer_max_km=max_km,
        ).value
        _MELLIN_CACHE[key] = val
    return val


def _stability_v(cfg, arr, s, method, high_precision, max_km) -> float:
    mg = _service_mellin_cached(cfg, 1.0 - cfg.N * s, method, high_precision, max_km)
    return arrival_mellin(arr, 1.0 + s) * mg


def stability_interval(
    cfg: SystemConfig,
    arr: ArrivalSpec,
    method: MellinMethod = MellinMethod.QUADRATURE,
    s_cap: float | None = None,
    alzer_high_precision: bool = False,
    alzer_max_km: int = 40,
) -> tuple[float, float] | None:
    """Maximal interval of s in (0, s_cap] with V(s) = M_a(1+s) M_g(1-Ns) < 1.

    V(0+) = 1 and log V is convex, so the stable region (when it exists) is a
    single interval starting at 0 whose upper end is either the root of
    V(s) = 1 or the cap.  Returns None when no stable s exists (arrival rate
    at or above the mean service rate).  Default cap: 10 / N.
    """
    if s_cap is None:
        s_cap = 10.0 / cfg.N

    def v(s):
        return _stability_v(cfg, arr, s, method, alzer_high_precision, alzer_max_km)

    # Probe geometrically smaller s until V dips below 1; near-critical loads
    # need deep probes, hopeless ones never dip (convexity).
    s_probe = None
    sp = s_cap
    for _ in range(60):
        if v(sp) < 1.0:
            s_probe = sp
            break
        sp *= 0.5
        if sp < 1e-15 * s_cap:
            break
    if s_probe is None:
        return None
    if v(s_cap) < 1.0:
        return (0.0, s_cap)
    hi = float(optimize.brentq(lambda s: v(s) - 1.0, s_probe, s_cap, xtol=1e-16, rtol=8.9e-16))
    return (0.0, hi)


def kernel(
    cfg: SystemConfig,
    arr: ArrivalSpec,
    s: float,
    w: int,
    method: MellinMethod = MellinMethod.QUADRATURE,
    alzer_high_precision: bool = False,
    alzer_max_km: int = 40,
) -> float:
    """Steady-state kernel M_g(1-Ns)^w / (1 - V(s)) for stable s, w >= 0.

    The numerator power is taken in log space so deep tails do not underflow
    prematurely.
    """
    if w < 0:
        raise ValueError("w must be >= 0")
    if not s > 0.0:
        raise ValueError("kernel requires s > 0")
    mg = _service_mellin_cached(
        cfg, 1.0 - cfg.N * s, method, alzer_high_precision, alzer_max_km
    )
    v = arrival_mellin(arr, 1.0 + s) * mg
    if v >= 1.0:
        raise InstabilityError(f"V({s:g}) = {v:g} >= 1: stability condition violated")
    log_num = w * math.log(mg)
    return math.exp(log_num - math.log1p(-v))


def delay_bound(
    cfg: SystemConfig,
    arr: ArrivalSpec,
    w: int,
    method: MellinMethod = MellinMethod.QUADRATURE,
    s_cap: float | None = None,
    alzer_high_precision: bool = False,
    alzer_max_km: int = 40,
) -> DelayBoundResult:
    """Delay-violation bound inf over stable s of the kernel, clipped at 1.

    The infimum is located by a 64-point log-spaced scan of the stability
    interval followed by golden-section refinement around the best point.
    An empty stability interval yields bound 1 with ``stable=False``.
    """
    if w < 0:
        raise ValueError("w must be >= 0")
    interval = stability_interval(
        cfg, arr, method, s_cap,
        alzer_high_precision=alzer_high_precision, alzer_max_km=alzer_max_km,
    )
    if interval is None:
        return DelayBoundResult(w, 1.0, None, None, method, False)
    _, s_hi = interval

    def guarded(s: float) -> float:
        try:
            return kernel(
                cfg, arr, s, w, method,
                alzer_high_precision=alzer_high_precision, alzer_max_km=alzer_max_km,
            )
        except InstabilityError:
            return math.inf

    grid = np.geomspace(s_hi * 1e-8, s_hi, 64)
    vals = [guarded(float(s)) for s in grid]
    i = int(np.argmin(vals))
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, len(grid) - 1)])
    if hi <= lo:
        s_star, f_star = float(grid[i]), vals[i]
    else:
        s_star, f_star = golden_section_min(guarded, lo, hi, rel_tol=1e-12)
    if vals[i] < f_star:
        s_star, f_star = float(grid[i]), vals[i]
    return DelayBoundResult(w, min(f_star, 1.0), s_star, interval, method, True)


def effective_capacity(
    cfg: SystemConfig,
    theta: float,
    method: MellinMethod = MellinMethod.QUADRATURE,
) -> float:
    """Effective capacity R(theta) = -(1/theta) log M_g(1 - theta), theta > 0.

    Per-symbol convention (blocklength 1); a per-slot figure follows by
    evaluating at 1 - N * theta instead, which callers can do directly.
    """
    if not theta > 0.0:
        raise ValueError("theta must be > 0")
    mg = service_mellin(cfg, 1.0 - theta, method).value
    return -math.log(mg) / theta
