"""Extremal-ratio search over tree maps, and lifting through oracles.

Search maximizes lhs/rhs of an invariant over all assignments of tree
vertices to points of a finite metric space, subject to pinned vertices.
"""

import numpy as np

import umbellab as U

mat = np.abs(np.subtract.outer(np.arange(3), np.arange(3))).astype(float)
prob = U.SearchProblem(spec=U.parse_tree_spec("bin:h=2"),
                       target=U.FiniteMatrixSpace(mat),
                       invariant=U.InvariantId.MARKOV_DIRECTED,
                       exponent=2.0, pins={(): 0})

best = U.exhaustive_max(prob)
print(f"exhaustive optimum: ratio {best.best_ratio:.6f}")
local = U.local_search_max(prob, restarts=8, steps=300, seed=0)
print(f"local search:       ratio {local.best_ratio:.6f}")

# lifting a tree map through a quotient-like oracle
rng = np.random.default_rng(1)
pts = tuple(tuple(x) for x in rng.uniform(-1, 1, (20, 2)))
oracle = U.QuotientOracle(U.LpSpace(2, 2.0), pts,
                          U.LpSpace(2, 2.0), pts, C=2.0, K=0.05)
spec = U.parse_tree_spec("bin:h=2")
assign = {}
for v in U.vertices(spec):
    i = int(rng.integers(0, len(pts)))
    assign[v] = tuple(np.asarray(pts[i]) + rng.uniform(-0.02, 0.02, 2))
g = U.TreeMap(spec, oracle.target_space, assign)
h = U.lift_map(g, oracle)
print(f"lift verified: {U.verify_lift(g, h, oracle)}")
