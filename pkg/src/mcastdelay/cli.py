"""Command-line front end.

Subcommands: mellin, delay-bound, effective-capacity, evt, scaling, simulate,
figure.  Power is accepted in dB (P = 10^(dB/10)); arrival rates in bit/s
(lambda = rate * slot * ln 2 nats/slot).  Output is a CSV or JSON table whose
every row carries the fully resolved parameter set; reruns with the same
arguments and seed are byte-identical.

A config file (--config, simple key=value lines, '#' comments) supplies any
flag value; explicit flags win.  The MCASTDELAY_THREADS environment variable
sets the simulator's replication fan-out.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .channel import SystemConfig
from .evt import RegimeKind, ScalingRegime, scaling_limit, weibull_params
from .mellin import (
    MellinMethod,
    mellin_alzer_bounds,
    mellin_asymptotic,
    mellin_exact,
    mellin_quadrature,
)
from .queue_sim import SimConfig, simulate
from .snc import ArrivalSpec, delay_bound, effective_capacity

_METHODS = {
    "exact": MellinMethod.EXACT,
    "quadrature": MellinMethod.QUADRATURE,
    "asymptotic": MellinMethod.ASYMPTOTIC,
}

_CONFIG_TYPES = {
    "M": int, "K": int, "power_db": float, "N": int, "slot_ms": float,
    "rate_bps": str, "w": int, "w_max": int, "s": float, "theta": float,
    "method": str, "replications": int, "horizon": int, "warmup": int,
    "seed": int, "out": str, "format": str, "regime": str, "delta": float,
    "ell": float,
}

_COMMON_DEFAULTS = {
    "M": 5, "K": 10, "power_db": 10.0, "N": 100, "slot_ms": 2.0,
    "rate_bps": "100000", "method": "quadrature", "replications": 10,
    "horizon": 100_000, "seed": 12345, "format": "csv", "s": 0.5,
    "theta": 0.5, "w": 3, "delta": 1.0, "ell": 0.5,
}

# Figure presets: slot 2 ms and N = 100 throughout; figure 1 is the
# rate sweep at M=5, K=10, P=10 dB; figure 2 the antenna sweep at w=3
# (K is not fixed by the source setting and defaults to the figure-1 value);
# figure 3 the asymptotic-vs-exact comparison at M=10, P=1 dB (K likewise
# unspecified there; default 16 keeps the exact expansion affordable).
_FIGURE_DEFAULTS = {
    1: {"M": 5, "K": 10, "power_db": 10.0, "rate_bps": "60000,80000,100000",
        "w_max": 20, "method": "exact"},
    2: {"K": 10, "power_db": 10.0, "rate_bps": "100000", "w": 3,
        "method": "exact"},
    3: {"M": 10, "K": 16, "power_db": 1.0, "rate_bps": "7200",
        "w_max": 20, "method": "exact"},
}


class CliError(ValueError):
    pass


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def write_table(out, fmt, columns, rows, params) -> None:
    if fmt == "csv":
        lines = [",".join(columns)]
        for row in rows:
            lines.append(",".join(_fmt(row.get(c)) for c in columns))
        text = "\n".join(lines) + "\n"
    else:
        data = {c: [row.get(c) for row in rows] for c in columns}
        text = json.dumps(
            {"params": params, "columns": columns, "data": data},
            indent=2, sort_keys=True,
        ) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def load_config(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliError(f"config line without '=': {line!r}")
            key, val = line.split("=", 1)
            key = key.strip().replace("-", "_")
            if key not in _CONFIG_TYPES:
                raise CliError(f"unknown config key {key!r}")
            values[key] = _CONFIG_TYPES[key](val.strip())
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcastdelay",
        description="Delay-violation bounds for multi-antenna multicast links",
        epilog="Environment: MCASTDELAY_THREADS sets simulator parallelism.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--M", type=int, help="transmit antennas")
        p.add_argument("--K", type=int, help="multicast users")
        p.add_argument("--power-db", dest="power_db", type=float,
                       help="total SNR P in dB")
        p.add_argument("--N", type=int, help="symbols per slot")
        p.add_argument("--slot-ms", dest="slot_ms", type=float,
                       help="slot duration in ms")
        p.add_argument("--rate-bps", dest="rate_bps", type=str,
                       help="arrival rate in bit/s (comma list for figure 1)")
        p.add_argument("--w", type=int, help="target delay in slots")
        p.add_argument("--w-max", dest="w_max", type=int,
                       help="sweep target delays 1..w_max")
        p.add_argument("--s", type=float, help="Mellin argument (s < 1)")
        p.add_argument("--theta", type=float, help="QoS exponent")
        p.add_argument("--method",
                       choices=["exact", "quadrature", "alzer", "asymptotic"],
                       help="service-transform evaluator")
        p.add_argument("--replications", type=int)
        p.add_argument("--horizon", type=int, help="slots per replication")
        p.add_argument("--warmup", type=int,
                       help="discarded slots (default horizon/10)")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--out", type=str, help="output path (default stdout)")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--config", type=str, help="key=value config file")
        p.add_argument("--alzer-high-precision", action="store_true",
                       dest="alzer_high_precision",
                       help="arbitrary-precision alternating sums")

    for name in ("mellin", "delay-bound", "effective-capacity", "evt",
                 "simulate"):
        add_common(sub.add_parser(name))
    p_scaling = sub.add_parser("scaling")
    add_common(p_scaling)
    p_scaling.add_argument("--regime", choices=["large-k", "large-m", "joint"])
    p_scaling.add_argument("--delta", type=float, help="K/M ratio (joint)")
    p_scaling.add_argument("--ell", type=float, help="joint split point in (0,1)")
    p_fig = sub.add_parser("figure")
    p_fig.add_argument("which", type=int, choices=[1, 2, 3])
    add_common(p_fig)
    return parser


def _resolve(args) -> None:
    if getattr(args, "config", None):
        for key, val in load_config(args.config).items():
            if getattr(args, key, None) in (None, False):
                setattr(args, key, val)
    defaults = dict(_COMMON_DEFAULTS)
    if args.command == "figure":
        defaults.update(_FIGURE_DEFAULTS[args.which])
    for key, val in defaults.items():
        attr = "format" if key == "format" else key
        if getattr(args, attr, None) is None:
            setattr(args, attr, val)
    if getattr(args, "warmup", None) is None:
        args.warmup = args.horizon // 10


def _system(args) -> SystemConfig:
    return SystemConfig(
        M=args.M, K=args.K, P=10.0 ** (args.power_db / 10.0),
        N=args.N, slot_seconds=args.slot_ms * 1e-3,
    )


def _rates(args) -> list[float]:
    return [float(r) for r in str(args.rate_bps).split(",") if r.strip()]


def _params(cfg: SystemConfig, **extra) -> dict:
    base = {
        "M": cfg.M, "K": cfg.K, "P": cfg.P, "rho": cfg.rho, "N": cfg.N,
        "slot_seconds": cfg.slot_seconds,
    }
    base.update(extra)
    return base


def _param_cols(params) -> list[str]:
    return list(params.keys())


def _with_params(params, **data) -> dict:
    row = dict(params)
    row.update(data)
    return row


def _method(args) -> MellinMethod:
    if args.method == "alzer":
        # bound pipelines use the conservative side
        return MellinMethod.ALZER_UPPER
    return _METHODS[args.method]


def cmd_mellin(args) -> int:
    cfg = _system(args)
    params = _params(cfg, s=args.s, method=args.method)
    if args.method == "alzer":
        lo, hi = mellin_alzer_bounds(
            cfg, args.s, high_precision=args.alzer_high_precision,
            max_km=(cfg.K * cfg.M if args.alzer_high_precision else 40),
        )
        rows = [_with_params(params, lower=lo.value, upper=hi.value,
                             est_abs_error=max(lo.est_abs_error, hi.est_abs_error))]
        cols = _param_cols(params) + ["lower", "upper", "est_abs_error"]
    else:
        fn = {"exact": mellin_exact, "quadrature": mellin_quadrature,
              "asymptotic": mellin_asymptotic}[args.method]
        ev = fn(cfg, args.s)
        rows = [_with_params(params, value=ev.value, est_abs_error=ev.est_abs_error)]
        cols = _param_cols(params) + ["value", "est_abs_error"]
    write_table(args.out, args.format, cols, rows, params)
    return 0


def _delay_rows(cfg, arr, ws, method, high_precision, params):
    rows = []
    any_unstable = False
    max_km = cfg.K * cfg.M if high_precision else 40
    for w in ws:
        r = delay_bound(cfg, arr, w, method,
                        alzer_high_precision=high_precision, alzer_max_km=max_km)
        any_unstable |= not r.stable
        rows.append(_with_params(params, w=w, bound=r.bound, s_star=r.s_star,
                                 stable=r.stable))
    return rows, any_unstable


def cmd_delay_bound(args) -> int:
    cfg = _system(args)
    arr = ArrivalSpec.from_rate_bps(_rates(args)[0], cfg.slot_seconds)
    ws = list(range(1, args.w_max + 1)) if args.w_max else [args.w]
    params = _params(cfg, lambda_nats_per_slot=arr.lambda_nats_per_slot,
                     method=args.method)
    rows, unstable = _delay_rows(cfg, arr, ws, _method(args),
                                 args.alzer_high_precision, params)
    cols = _param_cols(params) + ["w", "bound", "s_star", "stable"]
    write_table(args.out, args.format, cols, rows, params)
    if unstable:
        print("note: unstable configuration, bound clipped at 1", file=sys.stderr)
    return 0


def cmd_effective_capacity(args) -> int:
    cfg = _system(args)
    params = _params(cfg, theta=args.theta, method=args.method)
    r = effective_capacity(cfg, args.theta, _method(args))
    cols = _param_cols(params) + ["effective_capacity_nats"]
    write_table(args.out, args.format, cols,
                [_with_params(params, effective_capacity_nats=r)], params)
    return 0


def cmd_evt(args) -> int:
    cfg = _system(args)
    p = weibull_params(cfg.M, cfg.K)
    params = _params(cfg)
    cols = _param_cols(params) + ["c", "d", "kappa"]
    write_table(args.out, args.format, cols,
                [_with_params(params, c=p.c_K, d=p.d_K, kappa=p.kappa)], params)
    return 0


def cmd_scaling(args) -> int:
    if args.regime is None:
        raise CliError("scaling requires --regime")
    cfg = _system(args)
    kind = {"large-k": RegimeKind.LARGE_K, "large-m": RegimeKind.LARGE_M,
            "joint": RegimeKind.JOINT}[args.regime]
    if kind is RegimeKind.JOINT:
        regime = ScalingRegime(kind, delta=args.delta, ell=args.ell)
        lo, hi = scaling_limit(regime, cfg, args.s)
        params = _params(cfg, s=args.s, regime=args.regime, delta=args.delta,
                         ell=args.ell)
        cols = _param_cols(params) + ["lower", "upper"]
        rows = [_with_params(params, lower=lo, upper=hi)]
    else:
        regime = ScalingRegime(kind)
        val = scaling_limit(regime, cfg, args.s)
        params = _params(cfg, s=args.s, regime=args.regime)
        cols = _param_cols(params) + ["value"]
        rows = [_with_params(params, value=val)]
    write_table(args.out, args.format, cols, rows, params)
    return 0


def _run_sim(cfg, arr, args, w_cap):
    sim = SimConfig(cfg=cfg, arr=arr, horizon_slots=args.horizon,
                    warmup_slots=args.warmup, replications=args.replications,
                    master_seed=args.seed)
    return simulate(sim, max_delay_slots=w_cap)


def cmd_simulate(args) -> int:
    cfg = _system(args)
    arr = ArrivalSpec.from_rate_bps(_rates(args)[0], cfg.slot_seconds)
    w_cap = args.w_max if args.w_max else 20
    res = _run_sim(cfg, arr, args, w_cap)
    counts = [int((res.delay_samples == w).sum()) for w in range(w_cap + 1)]
    params = _params(cfg, lambda_nats_per_slot=arr.lambda_nats_per_slot,
                     master_seed=args.seed, replications=args.replications,
                     horizon_slots=args.horizon, warmup_slots=args.warmup,
                     mean_service_nats=res.mean_service,
                     mean_backlog_nats=res.mean_backlog)
    rows = [
        _with_params(params, w=w, p_hat=float(res.p_hat[w]),
                     stderr=float(res.stderr[w]), delay_count=counts[w])
        for w in range(w_cap + 1)
    ]
    cols = _param_cols(params) + ["w", "p_hat", "stderr", "delay_count"]
    write_table(args.out, args.format, cols, rows, params)
    return 0


def cmd_figure(args) -> int:
    if args.which == 1:
        return _figure1(args)
    if args.which == 2:
        return _figure2(args)
    return _figure3(args)


def _figure1(args) -> int:
    cfg = _system(args)
    w_max = args.w_max
    rows = []
    common = _params(cfg, master_seed=args.seed)
    for rate in _rates(args):
        arr = ArrivalSpec.from_rate_bps(rate, cfg.slot_seconds)
        res = _run_sim(cfg, arr, args, w_max)
        for w in range(1, w_max + 1):
            be = delay_bound(cfg, arr, w, MellinMethod.EXACT)
            bl = delay_bound(cfg, arr, w, MellinMethod.ALZER_LOWER,
                             alzer_high_precision=True,
                             alzer_max_km=cfg.K * cfg.M)
            bu = delay_bound(cfg, arr, w, MellinMethod.ALZER_UPPER,
                             alzer_high_precision=True,
                             alzer_max_km=cfg.K * cfg.M)
            rows.append(_with_params(
                common, rate_bps=rate,
                lambda_nats_per_slot=arr.lambda_nats_per_slot, w=w,
                bound_exact=be.bound, bound_alzer_lower=bl.bound,
                bound_alzer_upper=bu.bound,
                sim_p_hat=float(res.p_hat[w]), sim_stderr=float(res.stderr[w]),
            ))
    cols = _param_cols(common) + [
        "rate_bps", "lambda_nats_per_slot", "w", "bound_exact",
        "bound_alzer_lower", "bound_alzer_upper", "sim_p_hat", "sim_stderr",
    ]
    write_table(args.out, args.format, cols, rows, common)
    return 0


def _figure2(args) -> int:
    rate = _rates(args)[0]
    rows = []
    common = {"K": args.K, "power_db": args.power_db, "N": args.N,
              "slot_seconds": args.slot_ms * 1e-3, "rate_bps": rate,
              "w": args.w, "master_seed": args.seed}
    for M in range(1, 9):
        cfg = SystemConfig(M=M, K=args.K, P=10.0 ** (args.power_db / 10.0),
                           N=args.N, slot_seconds=args.slot_ms * 1e-3)
        arr = ArrivalSpec.from_rate_bps(rate, cfg.slot_seconds)
        b = delay_bound(cfg, arr, args.w, MellinMethod.EXACT)
        res = _run_sim(cfg, arr, args, max(args.w + 2, 8))
        rows.append(_with_params(
            common, M=M, P=cfg.P, rho=cfg.rho,
            lambda_nats_per_slot=arr.lambda_nats_per_slot,
            bound=b.bound, stable=b.stable,
            sim_p_hat=float(res.p_hat[args.w]),
            sim_stderr=float(res.stderr[args.w]),
        ))
    cols = list(common.keys()) + [
        "M", "P", "rho", "lambda_nats_per_slot", "bound", "stable",
        "sim_p_hat", "sim_stderr",
    ]
    write_table(args.out, args.format, cols, rows, common)
    return 0


def _figure3(args) -> int:
    cfg = _system(args)
    arr = ArrivalSpec.from_rate_bps(_rates(args)[0], cfg.slot_seconds)
    w_max = args.w_max
    res = _run_sim(cfg, arr, args, w_max)
    common = _params(cfg, lambda_nats_per_slot=arr.lambda_nats_per_slot,
                     master_seed=args.seed)
    rows = []
    for w in range(1, w_max + 1):
        be = delay_bound(cfg, arr, w, MellinMethod.EXACT)
        ba = delay_bound(cfg, arr, w, MellinMethod.ASYMPTOTIC)
        rows.append(_with_params(
            common, w=w, bound_exact=be.bound, bound_asymptotic=ba.bound,
            sim_p_hat=float(res.p_hat[w]), sim_stderr=float(res.stderr[w]),
        ))
    cols = _param_cols(common) + [
        "w", "bound_exact", "bound_asymptotic", "sim_p_hat", "sim_stderr",
    ]
    write_table(args.out, args.format, cols, rows, common)
    return 0


_COMMANDS = {
    "mellin": cmd_mellin,
    "delay-bound": cmd_delay_bound,
    "effective-capacity": cmd_effective_capacity,
    "evt": cmd_evt,
    "scaling": cmd_scaling,
    "simulate": cmd_simulate,
    "figure": cmd_figure,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _resolve(args)
        return _COMMANDS[args.command](args)
    except (ValueError, RuntimeError, ArithmeticError, OSError) as exc:
        msg = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(msg, sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
