"""Delay-violation bounds from the steady-state kernel.

With constant-rate arrivals (lambda nats/slot) the probability that queueing
delay exceeds w slots is bounded by the infimum over stable s > 0 of

    M_g(1 - N s)^w / (1 - e^(lambda s) M_g(1 - N s)).

This demo sweeps the target delay and the link parameters to show the three
levers: arrival rate, transmit power, and antenna count.
"""

import mcastdelay as mc

cfg = mc.SystemConfig(M=5, K=10, P=10.0, N=100, slot_seconds=2e-3)
print(f"link: M={cfg.M}, K={cfg.K}, P={cfg.P} ({10:.0f} dB), N={cfg.N}, "
      f"slot {cfg.slot_seconds*1e3:.0f} ms")
print(f"mean service: {mc.mean_service_nats(cfg):.2f} nats/slot")
print()

print("bound vs target delay, for three arrival rates (kbit/s):")
rates = (60e3, 80e3, 100e3)
arrs = [mc.ArrivalSpec.from_rate_bps(r, cfg.slot_seconds) for r in rates]
header = "  w  " + "".join(f"{r/1e3:>14.0f}" for r in rates)
print(header)
for w in (1, 2, 3, 5, 8, 12):
    row = f"{w:>4} "
    for arr in arrs:
        row += f"{mc.delay_bound(cfg, arr, w).bound:>14.3e}"
    print(row)

print()
print("one extra antenna collapses the violation probability (w=3, 100 kbit/s):")
arr = arrs[-1]
for M in range(1, 9):
    c = mc.SystemConfig(M=M, K=10, P=10.0, N=100, slot_seconds=2e-3)
    r = mc.delay_bound(c, arr, 3)
    tag = "" if r.stable else "  (unstable: vacuous bound)"
    print(f"  M={M}: bound = {r.bound:.3e}{tag}")

print()
print("effective capacity: the largest sustainable rate under a QoS exponent:")
for theta in (1e-3, 0.1, 0.5, 1.0):
    r = mc.effective_capacity(cfg, theta)
    print(f"  theta={theta:<6g} R = {r:.4f} nats/symbol")
