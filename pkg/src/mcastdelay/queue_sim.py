"""Monte Carlo fluid-flow FIFO queue driven by the multicast service process.

Each slot i draws a bottleneck gain, yielding service capacity
C_i = N ln(1 + rho X_(1)) nats; constant fluid arrivals a_i = lambda join the
queue and depart at full available capacity (d_i = min(C_i, backlog + a_i),
matching ideal link adaptation; no transmission ever fails, so the
zero-service branch of the model is unreachable).  The delay of the fluid
arriving in slot t is read off the cumulative curves:

    Delta(t) = min{u >= 0 : D(0, t+1+u) >= A(0, t+1)}

i.e. the virtual delay of the last bit of the slot (the conservative per-slot
convention).  Replications are independent, each with its own counter-based
stream, and aggregate into a violation curve with a between-replication
standard error.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import SystemConfig, derive_stream, sample_min_gain_batch
from .snc import ArrivalSpec

THREADS_ENV_VAR = "MCASTDELAY_THREADS"


@dataclass(frozen=True, slots=True)
class SimConfig:
    """Simulation run description.  Warmup slots are discarded before any
    statistics are taken (the estimator targets the stationary regime)."""

    cfg: SystemConfig
    arr: ArrivalSpec
    horizon_slots: int
    warmup_slots: int
    replications: int
    master_seed: int

    def __post_init__(self) -> None:
        if self.horizon_slots < 1 or self.replications < 1:
            raise ValueError("horizon_slots and replications must be >= 1")
        if not 0 <= self.warmup_slots < self.horizon_slots:
            raise ValueError("need 0 <= warmup_slots < horizon_slots")


@dataclass(slots=True)
class SimResult:
    """Empirical delay statistics.

    ``delay_samples`` holds per-slot delays in slots (post-warmup, all
    replications concatenated), capped at ``max_delay_slots + 1``: a stored
    value of cap means "greater than max_delay_slots", which keeps every
    violation indicator up to max_delay_slots exact.  ``violation_curve``
    maps w = 0..max_delay_slots to (p_hat, stderr) with
    stderr = sqrt(p_hat (1 - p_hat) / n_replications).
    """

    max_delay_slots: int
    delay_samples: np.ndarray
    p_hat: np.ndarray
    stderr: np.ndarray
    mean_service: float
    mean_backlog: float
    replications: int
    per_replication_p: np.ndarray = field(repr=False, default=None)


def _run_replication(sim: SimConfig, rep: int, w_cap: int):
    cfg, arr = sim.cfg, sim.arr
    T = sim.horizon_slots
    lam = arr.lambda_nats_per_slot
    rng = derive_stream(sim.master_seed, rep)

    x1 = sample_min_gain_batch(cfg, T, rng)
    service = cfg.N * np.log1p(cfg.rho * x1)

    # Lindley via cumulative curves: q_t = Y_t - min_{j<=t} Y_j with
    # Y_t = A(0,t) - S(0,t); then D(0,t) = A(0,t) - q_t, which is exact
    # (bit-identical A where the queue empties, so zero delays compare equal).
    a_cum = lam * np.arange(T + 1)
    y = a_cum - np.concatenate(([0.0], np.cumsum(service)))
    backlog = y - np.minimum.accumulate(y)
    d_cum = a_cum - backlog
    np.maximum.accumulate(d_cum, out=d_cum)  # guard 1-ulp dips for searchsorted

    # Delays for slots with at least w_cap+1 observable future slots, so the
    # indicator {Delta > w} is exact for every recorded w even when censored.
    guard = w_cap + 1
    n_slots = T - guard
    if n_slots <= sim.warmup_slots:
        raise ValueError(
            "horizon too short for the requested warmup and delay range"
        )
    targets = a_cum[1 : n_slots + 1]
    j = np.searchsorted(d_cum, targets, side="left")
    delay = j - np.arange(1, n_slots + 1)
    np.minimum(delay, guard, out=delay)

    delay = delay[sim.warmup_slots :]
    counts = np.bincount(delay, minlength=guard + 1)
    # survival: fraction of slots with Delta > w, w = 0..w_cap
    surv = 1.0 - np.cumsum(counts)[:-1] / delay.size
    return delay.astype(np.int32), surv, service[sim.warmup_slots :].mean(), backlog[
        sim.warmup_slots :
    ].mean()


def simulate(sim: SimConfig, max_delay_slots: int = 64) -> SimResult:
    """Run all replications and aggregate the delay-violation curve.

    Replication fan-out uses up to $MCASTDELAY_THREADS workers (default 1);
    results are reduced in replication order, so the output is identical
    regardless of the worker count.
    """
    w_cap = int(max_delay_slots)
    if w_cap < 1:
        raise ValueError("max_delay_slots must be >= 1")
    reps = range(sim.replications)
    workers = int(os.environ.get(THREADS_ENV_VAR, "1") or "1")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: _run_replication(sim, r, w_cap), reps))
    else:
        results = [_run_replication(sim, r, w_cap) for r in reps]

    delays = np.concatenate([r[0] for r in results])
    per_rep = np.vstack([r[1] for r in results])
    p_hat = per_rep.mean(axis=0)
    stderr = np.sqrt(p_hat * (1.0 - p_hat) / sim.replications)
    mean_service = float(np.mean([r[2] for r in results]))
    mean_backlog = float(np.mean([r[3] for r in results]))
    return SimResult(
        max_delay_slots=w_cap,
        delay_samples=delays,
        p_hat=p_hat,
        stderr=stderr,
        mean_service=mean_service,
        mean_backlog=mean_backlog,
        replications=sim.replications,
        per_replication_p=per_rep,
    )


def empirical_violation(result: SimResult, w: int) -> tuple[float, float]:
    """(p_hat, stderr) for P[Delta > w] at integer w within the recorded range."""
    if w < 0 or w > result.max_delay_slots:
        raise ValueError(
            f"w={w} outside the recorded range 0..{result.max_delay_slots}"
        )
    return float(result.p_hat[w]), float(result.stderr[w])
