"""p-capacity: closed forms, the variational solver, and capacitary weight norms.

The capacitary norm sup_F int_F |g| / Cap_p(F)^(r/p) decides whether a weight
supports the weighted Sobolev inequality; for power weights at the critical
exponent the per-ball ratios are radius-free, which this demo prints.
"""

import math

import numpy as np

from logineq import (CompactSet, Params, Weight, ball_capacity, capacity_grid,
                     default_ball_family, mazya_constant, mazya_norm_lower_bound,
                     scale_invariant_power_weight, variational_capacity)

print("closed forms:")
for (N, p) in [(3, 2.0), (4, 2.0), (3, 1.5)]:
    print(f"  Cap_{p}(B_1) in R^{N} = {ball_capacity(N, p, 1.0):.6f}")
print(f"  (R^3, p=2 gives 4*pi = {4 * math.pi:.6f})")

print("\nvariational solver vs closed form (ball of radius 1):")
for (N, p) in [(3, 2.0), (3, 2.5), (4, 1.5)]:
    F = CompactSet.ball(np.zeros(N), 1.0)
    est = variational_capacity(F, capacity_grid(F, N, n=2048), p, refinements=2)
    cf = ball_capacity(N, p, 1.0)
    print(f"  N={N}, p={p}: estimate {est.value:.5f}, closed {cf:.5f}, "
          f"gap {est.value / cf - 1:+.3%}, refinement trace "
          f"{['%.5f' % v for v in est.convergence]}")

print("\nannulus fills its hole (radial minimizer is flat inside):")
F = CompactSet.annulus(0.5, 1.0)
est = variational_capacity(F, capacity_grid(F, 3, n=2048), 2.0, refinements=1)
print(f"  Cap_2(annulus(0.5, 1)) estimate = {est.value:.5f} "
      f"= Cap_2(B_1) = {ball_capacity(3, 2.0, 1.0):.5f}")

P = Params(3, 2.0, 4.0)
g1 = scale_invariant_power_weight(P)
print(f"\ncritical power weight {g1.label()} at (N,p,r)=(3,2,4):")
fam = [CompactSet.ball(np.zeros(3), R) for R in np.geomspace(0.05, 50, 6)]
mn = mazya_norm_lower_bound(g1, 2.0, 4.0, fam, 3)
for label, mass, cappow, ratio in mn.per_set_ratios:
    print(f"  {label:28s} mass {mass:10.4f}  cap^(r/p) {cappow:12.4f}  "
          f"ratio {ratio:.6f}")
print(f"  family lower bound {mn.lower_bound:.6f}  (1/(8*pi) = "
      f"{1 / (8 * math.pi):.6f}); C_H = {mazya_constant(2.0):g}")

full = mazya_norm_lower_bound(g1, 2.0, 4.0, default_ball_family(3), 3)
print(f"  with offset balls too: {full.lower_bound:.6f} "
      "(origin-centered balls are extremal)")
