"""Tour of the five parameter regimes of the capillary fluid model.

The pair (eta, kappa - mu*nu) splits the positive (mu, nu, kappa) octant into
five regimes that control how the characteristic roots degenerate.  This
script classifies a few landmark triples, then sweeps a (nu, kappa) slice at
fixed mu and prints a small case map.
"""

import numpy as np

from kortsolve import classify

landmarks = [
    (1, 1, 2, "complex-conjugate pair s1, s2"),
    (3, 1, 1, "distinct real roots"),
    (2, 1, 2, "kappa = mu*nu: one t_j collides with omega"),
    (3, 1, 4, "eta = 0: t1 = t2 double root"),
    (1, 1, 1, "fully degenerate: t1 = t2 = omega"),
]

print("landmark triples")
print(f"{'mu':>4} {'nu':>4} {'kappa':>6} {'case':>5} {'eta':>10}  s1, s2")
for mu, nu, kappa, note in landmarks:
    p = classify(mu, nu, kappa)
    print(f"{mu:>4} {nu:>4} {kappa:>6} {str(p.case):>5} {p.eta:>10.4f}  "
          f"{p.s1:.4g}, {p.s2:.4g}   <- {note}")

print()
print("case map over (nu, kappa) at mu = 2 "
      "(I: oscillatory, II: generic real, III/IV/V: degeneracy manifolds)")
nus = np.linspace(0.25, 4.0, 16)
kappas = np.linspace(0.25, 6.0, 24)
for kappa in kappas[::-1]:
    row = "".join(str(classify(2.0, float(nu), float(kappa)).case) for nu in nus)
    print(f"kappa={kappa:5.2f}  {row}")

print()
print("exact-rational classification pins the measure-zero manifolds:")
from fractions import Fraction
p = classify(Fraction(3), Fraction(1), Fraction(4))
print(f"  (3, 1, 4) via Fraction -> case {p.case} (eta is exactly zero)")
p = classify(3.0, 1.0, 4.0 * (1 - 1e-9))
print(f"  (3, 1, 4*(1-1e-9)) in floats -> case {p.case} (off the manifold)")
