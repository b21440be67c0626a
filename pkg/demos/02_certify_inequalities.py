"""Randomized certification of pointwise metric inequalities.

The tripod inequality holds in Hilbert space with K = 1 but fails on the
unit star graph: three legs of length one glued at a hub.
"""

import numpy as np

import umbellab as U

L2 = U.LpSpace(3, 2.0)
cfg = U.InequalityConfig(exponent=2.0, K=1.0)

rep = U.certify(L2, U.InequalityId.Q_TRIPOD, cfg,
                U.ball_sampler(L2, U.InequalityId.Q_TRIPOD),
                n=20_000, seed=7)
print(f"tripod on R^3: {rep.violations} violations in {rep.n} samples, "
      f"worst margin {rep.worst_margin:.6f}")

star = U.FiniteMatrixSpace(np.array([
    [0.0, 2.0, 2.0, 1.0],
    [2.0, 0.0, 2.0, 1.0],
    [2.0, 2.0, 0.0, 1.0],
    [1.0, 1.0, 1.0, 0.0]]))
check = U.check_inequality(U.InequalityId.Q_TRIPOD, cfg, (0, 1, 2, 3), star)
print(f"tripod on the unit star: holds={check.holds}, margin={check.margin}")

# the least K certifying the inequality on a sample, found by bisection
sampler = U.ball_sampler(L2, U.InequalityId.Q_TRIPOD)
K = U.min_feasible_K(L2, U.InequalityId.Q_TRIPOD, cfg, sampler,
                     n=5_000, seed=7, bracket=(0.25, 16.0))
print(f"least feasible K on R^3 sample: {K:.6f}")

# the self-improvement constant for the umbel inequality
print(f"solve_umbel_K(p=2, c=1) = {U.solve_umbel_K(2.0, 1.0):.9f}")
