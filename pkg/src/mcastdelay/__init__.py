"""Analytical delay-violation bounds for multi-antenna multicast links.

The service offered to a multicast flow is limited by the weakest of K
Rayleigh-fading users; this package characterizes that service process in the
Mellin (SNR) domain, derives steady-state delay-violation bounds from it,
provides extreme-value asymptotics and scaling laws, and validates everything
against a fluid-flow Monte Carlo queue simulator.
"""

from .channel import (
    SystemConfig,
    derive_stream,
    gain_cdf,
    gain_quantile,
    min_gain_cdf,
    min_gain_sf,
    sample_min_gain,
    sample_min_gain_batch,
)
from .evt import (
    EvtParams,
    RegimeKind,
    ScalingRegime,
    best_ell_joint,
    evt_error_bound,
    exact_min_mean,
    jensen_gap,
    limit_cdf,
    scaling_limit,
    weibull_params,
)
from .mellin import (
    MellinEvaluation,
    MellinMethod,
    PrecisionLossError,
    TermBudgetError,
    mellin_alzer_bounds,
    mellin_asymptotic,
    mellin_exact,
    mellin_quadrature,
    service_mellin,
)
from .queue_sim import SimConfig, SimResult, empirical_violation, simulate
from .snc import (
    ArrivalSpec,
    DelayBoundResult,
    InstabilityError,
    arrival_mellin,
    delay_bound,
    effective_capacity,
    kernel,
    mean_service_nats,
    stability_interval,
)
from .specfun import (
    Composition,
    composition_count,
    compositions,
    log_term_weight,
    log_tricomi_u,
    tricomi_u,
    upper_incomplete_gamma,
)

__version__ = "0.1.0"

__all__ = [
    "ArrivalSpec",
    "Composition",
    "DelayBoundResult",
    "EvtParams",
    "InstabilityError",
    "MellinEvaluation",
    "MellinMethod",
    "PrecisionLossError",
    "RegimeKind",
    "ScalingRegime",
    "SimConfig",
    "SimResult",
    "SystemConfig",
    "TermBudgetError",
    "arrival_mellin",
    "best_ell_joint",
    "composition_count",
    "compositions",
    "delay_bound",
    "derive_stream",
    "effective_capacity",
    "empirical_violation",
    "evt_error_bound",
    "exact_min_mean",
    "gain_cdf",
    "gain_quantile",
    "jensen_gap",
    "kernel",
    "limit_cdf",
    "log_term_weight",
    "log_tricomi_u",
    "mean_service_nats",
    "mellin_alzer_bounds",
    "mellin_asymptotic",
    "mellin_exact",
    "mellin_quadrature",
    "min_gain_cdf",
    "min_gain_sf",
    "sample_min_gain",
    "sample_min_gain_batch",
    "scaling_limit",
    "service_mellin",
    "simulate",
    "stability_interval",
    "tricomi_u",
    "upper_incomplete_gamma",
    "weibull_params",
]
