"""Binary-to-increasing tree morphisms and invariant transfer.

A threshold function J drives the recursion: the +1 subtree always takes
the smallest available label, the -1 subtree takes the largest queried
threshold.  The branching property (all -1-side labels equal and
dominating) is what lets fork-type lower bounds transfer to umbel-type
lower bounds.
"""

import numpy as np

import umbellab as U

phi = U.binary_to_increasing(2, lambda m, n: 5)
print("constant J = 5, height 2:")
for eps in sorted(phi, key=lambda e: (len(e), e)):
    print(f"  {eps} -> {phi[eps]}")
print("branching property:", U.check_star_property(2, lambda m, n: 5, phi))

# transfer: the umbel lhs of a map is dominated by the fork lhs of its
# composition with the morphism

def J(m, n):
    return (max(n) if n else 0) + 1

phi = U.binary_to_increasing(4, J)
b = max(max(img) for img in phi.values() if img)
spec_inc = U.parse_tree_spec(f"inc:h=4,b={b}")
spec_bin = U.parse_tree_spec("bin:h=4")
rng = np.random.default_rng(0)
L3 = U.LpSpace(3, 2.0)
assign = {v: tuple(rng.uniform(-1, 1, 3)) for v in U.vertices(spec_inc)}
f = U.TreeMap(spec_inc, L3, assign)
comp = U.TreeMap(spec_bin, L3,
                 {eps: assign[phi[eps]] for eps in U.vertices(spec_bin)})
ul = U.lhs(U.InvariantId.UMBEL_COTYPE, f, 2.0)
fl = U.lhs(U.InvariantId.FORK_COTYPE, comp, 2.0)
print(f"\nrandom map into R^3: umbel lhs {ul:.6f} <= fork lhs {fl:.6f}")
