"""Tour of the compactified hyperboloidal chart.

Prints the chart coefficients across the slice, checks the closed-form
identities that tie them together, and tabulates the critical powers of
the nonlinearity for several spatial dimensions.
"""

import numpy as np

from hyperwave import (
    FoliationParams,
    areal_radius,
    chart_coeffs,
    critical_exponents,
    nonlinearity_weight,
)

fol = FoliationParams(n=3)  # default mean curvature C = n, slice scale a = 1
print(f"foliation: n = {fol.n}, C = {fol.mean_curvature}, a = {fol.scale}")

rt = np.linspace(0.0, 1.0, 6)
cc = chart_coeffs(rt, fol)
print("\n  rt     omega    lapse    shift    ricci")
for i, x in enumerate(rt):
    print(f"  {x:4.2f}  {cc.omega[i]:7.4f}  {cc.lapse[i]:7.4f} "
          f"{cc.shift[i]:8.4f}  {cc.ricci[i]:7.4f}")

# lapse^2 - shift^2 = omega^2 everywhere on the slice
worst = np.max(np.abs(cc.lapse**2 - cc.shift**2 - cc.omega**2))
print(f"\nlapse^2 - shift^2 - omega^2: max |residual| = {worst:.2e}")

# the areal radius diverges at the conformal boundary rt = 1
for x in (0.5, 0.9, 0.99):
    print(f"areal radius r(rt={x}) = {areal_radius(x, fol):.4f}")

print("\ncritical powers (conformal bound / energy-critical):")
for n in range(2, 8):
    e = critical_exponents(n)
    print(f"  n = {n}:  p_conf = {e.p_conf},  p_crit = {e.p_crit}")

# the conformal weight of the nonlinearity vanishes at the boundary for
# p above the bound and is identically one at the bound itself
print("\nweight at rt = 1:",
      nonlinearity_weight(1.0, fol, 5), "(p = 5),",
      nonlinearity_weight(1.0, fol, 3), "(p = 3, boundary case)")
