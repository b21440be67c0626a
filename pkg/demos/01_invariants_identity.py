"""Metric invariants of trees, evaluated on identity maps.

The umbel and fork cotype functionals measure how strongly a tree resists
being flattened.  On the identity map every scale contributes the same
amount, so the k-scale ratio comes out at exactly 2 (k-1)^(1/p).
"""

import umbellab as U

for k in (2, 3):
    for p in (1.0, 2.0):
        spec = U.parse_tree_spec(f"inc:h={2 ** k},b={2 ** k + 2}")
        rep = U.report(U.InvariantId.UMBEL_COTYPE, U.TreeMap.identity(spec), p)
        print(f"umbel cotype  k={k} p={p}: ratio_root={rep.ratio_root:.12f} "
              f"(expected {2 * (k - 1) ** (1 / p):.12f})")

for k in (2, 3):
    spec = U.parse_tree_spec(f"bin:h={2 ** k}")
    rep = U.report(U.InvariantId.FORK_COTYPE, U.TreeMap.identity(spec), 2.0)
    print(f"fork cotype   k={k} q=2: ratio_root={rep.ratio_root:.12f}")

# the directed random-walk functional grows with the number of scales
print()
print("directed walk functional on binary trees (p=2):")
for k in (1, 2, 3):
    spec = U.parse_tree_spec(f"bin:h={2 ** k}")
    rep = U.report(U.InvariantId.MARKOV_DIRECTED, U.TreeMap.identity(spec), 2.0)
    print(f"  k={k}: ratio_root={rep.ratio_root:.6f}")
