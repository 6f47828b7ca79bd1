"""Monte-Carlo probe of randomized-sum boundedness of the solution operators.

For family members T_1..T_m at lambdas across a decade and random boundary
data f_1..f_m, the probe compares the Rademacher averages of sum r_j T_j f_j
against sum r_j f_j, with inputs and outputs measured in their derivative
lifts.  Flat per-decade ratios are consistent with a uniformly bounded
family; systematic growth would falsify it.  This is a necessary-condition
check only.
"""

from kortsolve import classify
from kortsolve.rbound import (IdentityFamily, ProbeConfig, ReducedSolveFamily,
                              estimate_rbound, lambda_log_derivative)

params = classify(1, 1, 2)
cfg = ProbeConfig(m=8, trials=200, rng_seed=2024)

rep = estimate_rbound(IdentityFamily(), cfg)
print(f"identity family: every ratio = 1 exactly "
      f"(max deviation {max(abs(r - 1) for r in rep.all_ratios):.1e})")
print()

for kind in ("A2", "B2"):
    fam = ReducedSolveFamily(params, kind)
    rep = estimate_rbound(fam, cfg)
    print(f"family {kind} (m = {cfg.m}, {cfg.trials} trials):")
    for decade, ratio in rep.decade_ratios.items():
        print(f"  |lambda| in {decade:>12}: max ratio {ratio:.3f}")
    print(f"  spread across decades: {rep.decade_spread:.2f}")
    drep = estimate_rbound(lambda_log_derivative(fam), cfg)
    print(f"  lambda-derivative family: global max {drep.global_max:.3f}, "
          f"spread {drep.decade_spread:.2f}")
    print()

print("caveat: the probe can falsify uniform boundedness (growing ratios); "
      "stable ratios prove nothing.")
