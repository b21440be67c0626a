"""Explicit tree embeddings, distortion and compression measurements, and
lifting of tree maps through quotient-like oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np
from scipy import integrate

from .invariants import TreeMap, distance_matrices
from .spaces import LpSpace
from .trees import TreeSpec, INCREASING, vertices


class EmbeddingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Bourgain-style embedding


def bourgain_embed(spec: TreeSpec, p: float = 2.0, variant: str = "lp") -> TreeMap:
    """Embed an increasing tree into lp by
    f(n_1..n_j) = sum_{i=0}^{j} (j - i + 1)^{1/q} e_{Phi(n_1..n_i)},
    with 1/p + 1/q = 1 and one standard basis coordinate per vertex (prefix).
    The coordinate enumeration Phi follows vertex order offset by 2*height,
    which is inert for disjointly supported basis vectors.

    The "l1" variant drops the weights (all equal to 1) and targets l1; the
    "linf" variant uses weights (j - i + 1) and targets l-infinity."""
    if spec.kind != INCREASING:
        raise EmbeddingError("the embedding is defined on increasing trees")
    if variant == "l1":
        p, q = 1.0, math.inf
    elif variant == "linf":
        p, q = math.inf, 1.0
    elif not 1 < p < math.inf:
        raise EmbeddingError("p must lie in (1, inf)")
    else:
        q = p / (p - 1)
    verts = vertices(spec)
    coord = {v: i for i, v in enumerate(verts)}  # Phi(v) - 2k, reindexed to 0
    dim = len(verts)
    target = LpSpace(dim, p)
    assignment = {}
    for v in verts:
        j = len(v)
        vec = np.zeros(dim)
        for i in range(j + 1):
            vec[coord[v[:i]]] = (j - i + 1) ** (1.0 / q)
        assignment[v] = tuple(vec)
    return TreeMap(spec, target, assignment)


# ---------------------------------------------------------------------------
# Distortion and moduli


def distortion(f: TreeMap) -> tuple[float, float, float]:
    """(lip, colip, dist): the Lipschitz constant, the co-Lipschitz constant
    max d_tree/d_img, and their product (scaling-invariant distortion)."""
    dtree, dimg = distance_matrices(f)
    mask = dtree > 0
    if not mask.any():
        raise EmbeddingError("tree has a single vertex")
    if (dimg[mask] <= 0).any():
        raise EmbeddingError("constant or non-injective map has infinite colip")
    lip = float(np.max(dimg[mask] / dtree[mask]))
    colip = float(np.max(dtree[mask] / dimg[mask]))
    return lip, colip, lip * colip


@dataclass(frozen=True)
class ModulusCurve:
    """A nondecreasing right-continuous step function given by breakpoints."""

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.breakpoints) != len(self.values):
            raise EmbeddingError("breakpoints and values must align")
        if any(a >= b for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise EmbeddingError("breakpoints must increase")
        if any(a > b for a, b in zip(self.values, self.values[1:])):
            raise EmbeddingError("values must be nondecreasing")

    def __call__(self, t: float) -> float:
        val = 0.0
        for b, v in zip(self.breakpoints, self.values):
            if t >= b:
                val = v
            else:
                break
        return val


def moduli(f: TreeMap) -> tuple[ModulusCurve, ModulusCurve]:
    """Compression and expansion curves: rho(t) = min image distance over
    pairs at tree distance >= t (nondecreasing lower envelope of the
    per-distance minima), omega(t) = max image distance over pairs at tree
    distance <= t (nondecreasing upper envelope)."""
    dtree, dimg = distance_matrices(f)
    mask = np.triu(dtree > 0)
    if not mask.any():
        raise EmbeddingError("tree has a single vertex")
    ts = np.unique(dtree[mask])
    mins = np.array([dimg[mask & (dtree == t)].min() for t in ts])
    maxs = np.array([dimg[mask & (dtree == t)].max() for t in ts])
    rho_vals = np.minimum.accumulate(mins[::-1])[::-1]  # min over larger t too
    omega_vals = np.maximum.accumulate(maxs)
    rho = ModulusCurve(tuple(ts.tolist()), tuple(rho_vals.tolist()))
    omega = ModulusCurve(tuple(ts.tolist()), tuple(omega_vals.tolist()))
    return rho, omega


def compression_integral(rho, p: float, T: float) -> float:
    """Integral of (rho(t)/t)^p dt/t over [1, T].  Step curves are integrated
    in closed form piece by piece; callables go through adaptive quadrature."""
    if T <= 1:
        raise EmbeddingError("T must exceed 1")
    if isinstance(rho, ModulusCurve):
        cuts = sorted({1.0, T} | {b for b in rho.breakpoints if 1.0 < b < T})
        total = 0.0
        for a, b in zip(cuts, cuts[1:]):
            v = rho(a)
            if v:
                total += v ** p * (a ** (-p) - b ** (-p)) / p
        return total
    val, _ = integrate.quad(lambda t: (rho(t) / t) ** p / t, 1.0, T,
                            epsabs=1e-12, epsrel=1e-12, limit=400)
    return val


# ---------------------------------------------------------------------------
# Lifting through quotient-like maps


@dataclass(frozen=True)
class QuotientOracle:
    """A finite stand-in for a quotient-like map f: Z subset X -> Y with
    constants C >= 1 and K >= 0: every point of Y lies within K of f(Z), and
    f maps r-balls onto K-nets of r/C-balls."""

    domain_space: object
    domain: tuple
    target_space: object
    values: tuple  # f(z) for z in domain, aligned
    C: float
    K: float

    def f(self, i: int):
        return self.values[i]

    def validate(self, ys) -> bool:
        """Exhaustively check both hypotheses against a finite set of target
        points: Y = f(Z)^K, and B_Y(f(x), r/C) contained in f(B_X(x, r))^K."""
        dz = self.domain_space.distance
        dy = self.target_space.distance
        tol = 1e-9
        for y in ys:
            if min(dy(v, y) for v in self.values) > self.K + tol:
                return False
        for i, z in enumerate(self.domain):
            for y in ys:
                r = self.C * dy(self.values[i], y)
                if not any(
                    dz(z, w) <= r + tol and dy(self.values[j], y) <= self.K + tol
                    for j, w in enumerate(self.domain)
                ):
                    return False
        return True


def lift_map(g: TreeMap, oracle: QuotientOracle) -> TreeMap:
    """Lift a tree map g into Y through the oracle: pick h(root) within K of
    g(root), then for each child pick a domain point inside the prescribed
    ball whose image is within K of the child's g-value.  Ties break to the
    lowest domain index.

    The construction guarantees, for every edge,
      d_X(h(parent), h(child)) <= C * d_Y(g(parent), g(child)) + C*K
    and, for every vertex, d_Y(f(h(v)), g(v)) <= K.
    """
    C, K = oracle.C, oracle.K
    dz = oracle.domain_space.distance
    dy = oracle.target_space.distance
    tol = 1e-9

    def nearest_within(candidates, y):
        for i in candidates:
            if dy(oracle.values[i], y) <= K + tol:
                return i
        return None

    root_pick = nearest_within(range(len(oracle.domain)), g.point(()))
    if root_pick is None:
        raise EmbeddingError("a g value lies farther than K from f(Z)")
    lift = {(): root_pick}
    for v in sorted(g.assignment, key=lambda u: (len(u), u)):
        if not v:
            continue
        par = v[:-1]
        r = dy(g.point(par), g.point(v))
        radius = C * (r + K)
        zi = lift[par]
        candidates = [
            j for j in range(len(oracle.domain))
            if dz(oracle.domain[zi], oracle.domain[j]) <= radius + tol
        ]
        pick = nearest_within(candidates, g.point(v))
        if pick is None:
            raise EmbeddingError("a g value lies farther than K from f(Z)")
        lift[v] = pick
    return TreeMap(g.spec, oracle.domain_space,
                   {v: oracle.domain[i] for v, i in lift.items()})


def verify_lift(g: TreeMap, h: TreeMap, oracle: QuotientOracle,
                tol: float = 1e-9) -> bool:
    """Independent re-check of both lifting postconditions."""
    dy = oracle.target_space.distance
    dz = oracle.domain_space.distance
    for v in g.assignment:
        hi = oracle.domain.index(h.point(v))
        if dy(oracle.values[hi], g.point(v)) > oracle.K + tol:
            return False
        if v:
            bound = oracle.C * dy(g.point(v[:-1]), g.point(v)) + oracle.C * oracle.K
            if dz(h.point(v[:-1]), h.point(v)) > bound + tol:
                return False
    return True
