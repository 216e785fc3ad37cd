"""Best-constant search: descent on the Rayleigh-type quotient.

1/Q(u) lower-bounds the best constant for every admissible profile, so the
descent produces certified bounds.  For the scale-invariant power weight at a
level strictly above critical the quotient keeps decreasing along dilations
(no minimizer exists over the whole space); the bounded bump family arrests
that escape, and the reported value is the family-restricted optimum, checked
for stability under family refinement.  A compactly supported weight shows the
opposite, concentrating behavior: the iterates converge to the final profile
in the weighted distance.
"""

import math

import numpy as np

from logineq import (CompactSet, OptConfig, Params, RadialGrid, Weight,
                     concentration_diagnostic, mazya_constant,
                     mazya_norm_lower_bound, minimize_quotient,
                     multistart_minimize, scale_invariant_power_weight)

P = Params(3, 2.0, 4.0, gamma=3.0).validate(need_r=True, need_gamma=True)
g1 = scale_invariant_power_weight(P)
grid = RadialGrid.geometric(1e-6, 50.0, 1024, N=3)

print(f"weight {g1.label()}, gamma = {P.gamma} > critical level "
      f"{P.gamma_floor:g}")
cfg = OptConfig(max_iter=300, restarts=1, seed=11)
tr = multistart_minimize(g1, 2.0, 3.0, grid, cfg, gamma_floor=P.gamma_floor)
qs = [it["Q"] for it in tr.iterates]
print(f"descent: Q {qs[0]:.4f} -> {qs[-1]:.4f} in {tr.accepted_steps} accepted "
      f"steps ({tr.status})")
print(f"certified bound: best constant >= 1/Q* = {1 / tr.best_Q:.4f}")

fam = [CompactSet.ball(np.zeros(3), R) for R in np.geomspace(0.05, 50, 12)]
norm = mazya_norm_lower_bound(g1, 2.0, 4.0, fam, 3).lower_bound
print(f"capacitary comparison: C_H * norm^(p/r) = "
      f"{mazya_constant(2.0) * norm ** 0.5:.4f}, "
      f"Q* * C_H * norm^(p/r) = "
      f"{tr.best_Q * mazya_constant(2.0) * norm ** 0.5:.4f} (>= 1)")

print("\ncompactly supported weight: concentration diagnostic")
gt = Weight.truncated_power(1.0, 2.0)
tr2 = multistart_minimize(gt, 2.0, 3.0, grid,
                          OptConfig(max_iter=250, restarts=1, seed=3),
                          gamma_floor=P.gamma_floor)
diag = concentration_diagnostic(tr2, gt, 2.0, grid)
idx = np.linspace(0, len(diag) - 1, 6).astype(int)
print("  weighted distance of iterates to the final profile:")
for i in idx:
    print(f"    step {i:4d}: A_n = {diag[i]:.3e}")
print("  vanishing A_n mirrors the compactness that yields attainment.")
