"""Four routes to the service transform of a multicast link.

The per-slot service is N ln(1 + rho X_(1)) where X_(1) is the weakest of K
user gains.  Everything downstream (delay bounds, effective capacity) only
needs the transform M_g(s) = E[(1 + rho X_(1))^(s-1)] for s < 1.  This demo
evaluates it with all four methods and shows how they relate:

  quadrature  - direct numerical integration (the reference)
  exact       - the finite composition expansion with Tricomi-U factors
  alzer       - computable two-sided bracket from exponential CDF bounds
  asymptotic  - Weibull-limit replacement of the minimum law (large K)
"""

import numpy as np

import mcastdelay as mc

cfg = mc.SystemConfig(M=3, K=6, P=8.0)
print(f"link: M={cfg.M} antennas, K={cfg.K} users, P={cfg.P} (rho={cfg.rho:.3f})")
print(f"{'s':>5} {'quadrature':>14} {'exact':>14} {'alzer lower':>14} "
      f"{'alzer upper':>14} {'asymptotic':>14}")
for s in (0.9, 0.7, 0.5, 0.3, 0.1, -1.0, -4.0):
    q = mc.mellin_quadrature(cfg, s).value
    e = mc.mellin_exact(cfg, s).value
    lo, hi = mc.mellin_alzer_bounds(cfg, s)
    a = mc.mellin_asymptotic(cfg, s).value
    print(f"{s:5.1f} {q:14.10f} {e:14.10f} {lo.value:14.10f} "
          f"{hi.value:14.10f} {a:14.10f}")

print()
print("exact-vs-quadrature agreement over a small grid:")
worst = 0.0
for M in (1, 2, 3):
    for K in (1, 4, 8):
        c = mc.SystemConfig(M=M, K=K, P=2.0 * M)
        for s in np.linspace(0.1, 0.9, 5):
            q = mc.mellin_quadrature(c, float(s)).value
            e = mc.mellin_exact(c, float(s)).value
            worst = max(worst, abs(e - q) / q)
print(f"  worst relative difference: {worst:.3e}")

print()
print("the asymptotic form converges as the user population grows (M=2, s=0.5):")
for K in (10, 100, 1000, 10000):
    c = mc.SystemConfig(M=2, K=K, P=2.0)
    gap = abs(mc.mellin_asymptotic(c, 0.5).value - mc.mellin_quadrature(c, 0.5).value)
    print(f"  K={K:>6}: |asymptotic - quadrature| = {gap:.3e}")
