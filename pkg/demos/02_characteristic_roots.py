"""Characteristic roots t1, t2, omega and their anisotropic lower bounds.

Each tangential mode decays like exp(-t x_N) with rates t1, t2 (from the
quartic dispersion polynomial) and omega (the viscous rate).  All three are
bounded below by a multiple of |lambda|^(1/2) + |xi|, which is what makes
the solution formulas uniformly usable; the scan at the end estimates the
constants empirically.
"""

import numpy as np

from kortsolve import (ScanGrid, TangentialMode, char_poly, classify, compute_roots,
                       root_lower_bound_scan)

p = classify(2, 1, 2)
print(f"case {p.case}: s1 = {p.s1:g}, s2 = {p.s2:g}")

for xi, lam in [(0.0, 1.0), (1.0, 1.0), (1.0, 4.0 * np.exp(1.2j)), (10.0, 0.01)]:
    mode = TangentialMode(xi=[xi], lam=lam)
    r = compute_roots(p, mode)
    print(f"xi={xi:5.2f} lam={lam:12.4g}  t1={r.t1:.5g}  t2={r.t2:.5g}  "
          f"omega={r.omega:.5g}  [{r.degeneracy.value}]")
    # the quartic vanishes at +-t1, +-t2
    worst = max(abs(char_poly(p, mode, t)) for t in (r.t1, -r.t1, r.t2, -r.t2))
    print(f"             max |P(roots)| = {worst:.2e}")

print()
print("homogeneity: t_j(r xi, r^2 lam) = r t_j(xi, lam)")
base = compute_roots(p, TangentialMode(xi=[0.7], lam=1.0 + 0.5j))
for r_scale in (0.1, 10.0):
    scaled = compute_roots(p, TangentialMode(xi=[0.7 * r_scale],
                                             lam=(1.0 + 0.5j) * r_scale**2))
    print(f"  r={r_scale:5.1f}: t1 ratio = {scaled.t1 / base.t1:.12f} (want {r_scale})")

print()
print("lower-bound scan of Re(root)/(|lambda|^(1/2)+|xi|) over a log grid:")
grid = ScanGrid.logspace(n_xi=24, n_lam=24, n_arg=5)
rep = root_lower_bound_scan(p, grid)
for key, val in rep.infima.items():
    xi_m, lam_m = rep.argmins[key]
    print(f"  {key:5}: inf = {val:.6f}  (argmin |xi| = {xi_m:.3g}, lambda = {lam_m:.3g})")
