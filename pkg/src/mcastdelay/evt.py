"""Extreme-value characterization of the multicast bottleneck gain.

The minimum of K Gamma(M, 1) gains lies in the Weibull minimal domain of
attraction with shape kappa = M.  With location c_K = 0 and scale

    d_K = (M! / K)^(1/M)

(the 1/K quantile of the single-user gain to first Taylor order, which is the
unique scale making K * F(d_K x) -> x^M), the normalized minimum converges to
the Weibull law 1 - exp(-x^M).  We also expose the printed convergence-rate
envelope, the large-K / large-M / joint scaling limits of the service
transform, and the Jensen-gap diagnostic built on the asymptotic mean.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .channel import SystemConfig, min_gain_sf
from .numerics import golden_section_min


class RegimeKind(enum.Enum):
    LARGE_K = "large-k"
    LARGE_M = "large-m"
    JOINT = "joint"


@dataclass(frozen=True, slots=True)
class EvtParams:
    """Normalizing constants of the limiting minimum distribution."""

    c_K: float
    d_K: float
    kappa: int


@dataclass(frozen=True, slots=True)
class ScalingRegime:
    """Which scaling limit to evaluate; ``delta`` = K/M and ``ell`` in (0,1)
    are used only by the joint regime."""

    kind: RegimeKind
    delta: float | None = None
    ell: float | None = None

    def __post_init__(self) -> None:
        if self.kind is RegimeKind.JOINT:
            if self.delta is None or not self.delta > 0.0:
                raise ValueError("joint regime requires delta > 0")
            if self.ell is None or not 0.0 < self.ell < 1.0:
                raise ValueError("joint regime requires ell in (0, 1)")


def weibull_params(M: int, K: int) -> EvtParams:
    """Location 0, scale (M!/K)^(1/M) and shape M of the limiting Weibull."""
    if M < 1 or K < 1:
        raise ValueError("M and K must be >= 1")
    if M <= 20:
        d = (math.factorial(M) / K) ** (1.0 / M)
    else:
        d = math.exp((math.lgamma(M + 1) - math.log(K)) / M)
    return EvtParams(c_K=0.0, d_K=d, kappa=M)


def limit_cdf(M: int, x) -> float:
    """Limiting CDF of the normalized minimum gain: 1 - exp(-x^M)."""
    x = np.asarray(x, dtype=float)
    return (-np.expm1(-(x**M)))[()]


def evt_error_bound(M: int, K: int, x) -> float:
    """Convergence-rate envelope e^(-x^M) x^(M+1) (M!/K)^(1/M).

    Valid as a bound on |F_min(d_K x) - limit| in the small-deviation zone
    (scaled argument d_K x within the leading-Taylor region of the per-user
    CDF); it decays like Theta(K^(-1/M)) there.  In the far tail the true gap
    is survival-dominated and exceeds this expression.
    """
    x = np.asarray(x, dtype=float)
    scale = weibull_params(M, K).d_K
    return (np.exp(-(x**M)) * x ** (M + 1) * scale)[()]


def scaling_limit(regime: ScalingRegime, cfg: SystemConfig, s: float):
    """Closed-form scaling limits of the service Mellin transform for s < 1.

    * large K, fixed M:  (1 + rho (M!/K)^(1/M))^(s-1)
    * large M, fixed K:  (1 + P)^(s-1)
    * joint (K/M = delta): the pair
        (exp(-delta / (2 (1-ell)^2)) (1 + P ell)^(s-1),
         (1 + P (1 + sqrt(delta))^2)^(s-1))
      i.e. the concentration (Chebyshev) formula and the full-CSI capacity
      formula.  Note that for s < 1 the Mellin transform reverses service
      ordering, so the two printed formulas bracket the transform as an
      unordered pair rather than in the listed lower/upper roles.
    """
    if not s < 1.0:
        raise ValueError(f"scaling limits require s < 1, got s={s}")
    if regime.kind is RegimeKind.LARGE_K:
        d = weibull_params(cfg.M, cfg.K).d_K
        return (1.0 + cfg.rho * d) ** (s - 1.0)
    if regime.kind is RegimeKind.LARGE_M:
        return (1.0 + cfg.P) ** (s - 1.0)
    if regime.kind is RegimeKind.JOINT:
        lo = joint_concentration_formula(regime.delta, regime.ell, cfg.P, s)
        hi = joint_csi_capacity_formula(regime.delta, cfg.P, s)
        return lo, hi
    raise ValueError(f"malformed regime {regime!r}")


def joint_concentration_formula(delta: float, ell: float, P: float, s: float) -> float:
    """exp(-delta / (2 (1-ell)^2)) * (1 + P ell)^(s-1)."""
    return math.exp(-delta / (2.0 * (1.0 - ell) ** 2)) * (1.0 + P * ell) ** (s - 1.0)


def joint_csi_capacity_formula(delta: float, P: float, s: float) -> float:
    """(1 + P (1 + sqrt(delta))^2)^(s-1), the full-CSI capacity formula."""
    return (1.0 + P * (1.0 + math.sqrt(delta)) ** 2) ** (s - 1.0)


def best_ell_joint(delta: float, P: float, s: float, grid=None):
    """The ell in (0, 1) maximizing the joint concentration formula.

    With ``grid`` given, picks the best grid point; otherwise refines by
    golden-section search.  Returns (ell, formula value).
    """
    if grid is not None:
        vals = [joint_concentration_formula(delta, float(e), P, s) for e in grid]
        i = int(np.argmax(vals))
        return float(grid[i]), vals[i]
    ell, neg = golden_section_min(
        lambda e: -joint_concentration_formula(delta, e, P, s), 1e-6, 1.0 - 1e-6
    )
    return ell, -neg


def exact_min_mean(cfg: SystemConfig) -> float:
    """E[X_(1)] by quadrature of the survival function."""
    val, _ = integrate.quad(
        lambda x: min_gain_sf(cfg, x), 0.0, np.inf, epsabs=1e-12, epsrel=1e-11, limit=200
    )
    return val


def jensen_gap(cfg: SystemConfig, s: float, exact_mean: bool = False) -> float:
    """Gap f(E[X_(1)]) - E[f(X_(1))] with f(x) = (1 + rho x)^(s-1).

    By default the mean is the asymptotic (Weibull) one, d_K Gamma(1 + 1/M);
    ``exact_mean=True`` substitutes the quadrature mean instead.  The gap
    shrinks as K grows because Var[X_(1)] -> 0.
    """
    if s == 1.0:
        return 0.0
    if not s < 1.0:
        raise ValueError(f"need s <= 1, got {s}")
    from .mellin import mellin_quadrature  # local import to avoid a cycle

    if exact_mean:
        m = exact_min_mean(cfg)
    else:
        p = weibull_params(cfg.M, cfg.K)
        m = p.d_K * math.gamma(1.0 + 1.0 / cfg.M)
    return (1.0 + cfg.rho * m) ** (s - 1.0) - mellin_quadrature(cfg, s).value
