"""Point-configuration inequality checks, certification campaigns, convexity
modulus estimation, and constant solving.

Every inequality is oriented as LHS <= RHS; a check holds when
margin = RHS - LHS >= -slack.  For the umbel family the inner infimum over an
infinite sequence is replaced by a minimum over the supplied finite tail,
which lower-bounds the true left-hand side (the conservative direction for
certification).
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import spaces as sp
from .spaces import HPoint, LpSpace, h_dilate, h_inv, h_mul, koranyi_norm


class PointwiseError(ValueError):
    pass


class NoSolution(ValueError):
    """The defining condition has no feasible constant."""


class InequalityId(str, enum.Enum):
    P_UMBEL = "p-umbel"
    RELAXED_P_UMBEL = "relaxed-p-umbel"
    SUPER_RELAXED_P_UMBEL = "super-relaxed-p-umbel"
    Q_TRIPOD = "tripod"
    Q_FORK = "fork"
    RELAXED_Q_FORK = "relaxed-fork"
    P_UNIFORM_CONVEXITY = "p-uniform-convexity"
    MIDPOINT_CURVATURE = "midpoint-curvature"
    HEISENBERG_PARALLELOGRAM = "parallelogram"


UMBEL_FAMILY = (
    InequalityId.P_UMBEL,
    InequalityId.RELAXED_P_UMBEL,
    InequalityId.SUPER_RELAXED_P_UMBEL,
)

FOUR_POINT = (
    InequalityId.Q_TRIPOD,
    InequalityId.Q_FORK,
    InequalityId.RELAXED_Q_FORK,
    InequalityId.MIDPOINT_CURVATURE,
)


@dataclass(frozen=True)
class InequalityConfig:
    exponent: float = 2.0
    K: float = 1.0
    C: float = 1.0
    slack: float = 0.0
    xs_count: int = 4

    def __post_init__(self):
        if self.exponent <= 0:
            raise PointwiseError("exponent must be positive")
        if self.K <= 0 or self.C <= 0:
            raise PointwiseError("constants must be positive")
        if self.slack < 0:
            raise PointwiseError("slack must be nonnegative")


@dataclass(frozen=True)
class CheckReport:
    holds: bool
    margin: float
    witness: tuple


@dataclass(frozen=True)
class CampaignReport:
    inequality: str
    config: dict
    n: int
    seed: int
    violations: int
    worst_margin: float
    worst_witness: tuple

    def to_json(self) -> str:
        return json.dumps({
            "id": self.inequality,
            "config": self.config,
            "n": self.n,
            "seed": self.seed,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "worst_witness": _jsonable(self.worst_witness),
        })


def _jsonable(obj):
    if isinstance(obj, HPoint):
        return {"x": list(obj.x), "s": obj.s}
    if isinstance(obj, (tuple, list)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


# ---------------------------------------------------------------------------
# Inequality evaluation


def _umbel_sides(ineq: InequalityId, cfg: InequalityConfig, points, space):
    w, z, xs = points
    if not xs:
        raise PointwiseError("umbel family needs a nonempty xs list")
    p, K = cfg.exponent, cfg.K
    d = space.distance
    first = min(d(w, x) ** p for x in xs) / 2 ** p
    if len(xs) >= 2:
        sep = min(d(a, b) ** p for a, b in itertools.combinations(xs, 2))
    else:
        sep = 0.0
    lhs = first + sep / K ** p
    dw = d(z, w) ** p
    dmax = max(d(z, x) ** p for x in xs)
    if ineq is InequalityId.P_UMBEL:
        rhs = 0.5 * dw + 0.5 * dmax
    else:
        rhs = max(dw, dmax)
    return lhs, rhs


def check_inequality(ineq: InequalityId, cfg: InequalityConfig, points, space) -> CheckReport:
    """Evaluate one pointwise inequality at a concrete configuration."""
    q, K = cfg.exponent, cfg.K
    d = space.distance
    if ineq in UMBEL_FAMILY:
        if len(points) != 3:
            raise PointwiseError("umbel family takes (w, z, xs)")
        lhs, rhs = _umbel_sides(ineq, cfg, points, space)
    elif ineq is InequalityId.Q_TRIPOD:
        w, x, y, z = _four(points)
        lhs = (d(w, x) ** q + d(w, y) ** q) / 2 ** (q + 1) + d(x, y) ** q / (4 * K) ** q
        rhs = 0.5 * d(z, w) ** q + 0.25 * d(z, x) ** q + 0.25 * d(z, y) ** q
    elif ineq is InequalityId.Q_FORK:
        w, x, y, z = _four(points)
        lhs = min(d(w, x) ** q, d(w, y) ** q) / 2 ** q + d(x, y) ** q / (4 ** q * K ** q)
        rhs = 0.5 * d(z, w) ** q + 0.5 * max(d(z, x) ** q, d(z, y) ** q)
    elif ineq is InequalityId.RELAXED_Q_FORK:
        w, x, y, z = _four(points)
        lhs = min(d(w, x) ** q, d(w, y) ** q) / 2 ** q + d(x, y) ** q / (4 ** q * K ** q)
        rhs = max(d(z, w) ** q, d(z, x) ** q, d(z, y) ** q)
    elif ineq is InequalityId.MIDPOINT_CURVATURE:
        x, y, z, m = _four(points)
        lhs = d(z, x) ** 2 + d(z, y) ** 2
        rhs = 2 * d(z, m) ** 2 + d(x, y) ** 2 / 2
    elif ineq is InequalityId.P_UNIFORM_CONVEXITY:
        if len(points) != 2:
            raise PointwiseError("uniform convexity takes 2 vectors")
        if not isinstance(space, LpSpace):
            raise PointwiseError("uniform convexity needs a normed space")
        x = np.asarray(points[0], float)
        y = np.asarray(points[1], float)
        p = cfg.exponent
        lhs = space.norm(x) ** p + space.norm(y) ** p / K ** p
        rhs = (space.norm(x + y) ** p + space.norm(x - y) ** p) / 2
    elif ineq is InequalityId.HEISENBERG_PARALLELOGRAM:
        if len(points) != 2:
            raise PointwiseError("parallelogram takes 2 HPoints")
        return check_parallelogram(space.space, cfg.exponent, cfg.C,
                                   points[0], points[1], slack=cfg.slack)
    else:  # pragma: no cover
        raise PointwiseError(f"unknown inequality {ineq}")
    margin = rhs - lhs
    return CheckReport(margin >= -cfg.slack, margin, tuple(points))


def _four(points):
    if len(points) != 4:
        raise PointwiseError("this inequality takes 4 points")
    return points


def parallelogram_constants(p: float, C: float) -> tuple[float, float]:
    """The constant K and weight lambda attached to the Heisenberg
    parallelogram inequality for a p-uniformly convex horizontal norm."""
    K = max(C, (3 ** (2 * p - 1) * 6 / 4 ** p) ** (1 / (2 * p)))
    lam = (1 / 3 + 1 / (3 ** p * 6)) ** (-1) * 2 ** (1 - p) / C ** p
    return K, lam


def check_parallelogram(hsp, p: float, C: float, a: HPoint, b: HPoint,
                        slack: float = 0.0) -> CheckReport:
    """Parallelogram inequality on a Heisenberg group: with N = N_{p,lambda},
    N(d_half_b)^{2p} + K^{-2p} N((d_half_b)^{ -1} a)^{2p}
      <= (N(a)^{2p} + N(b^{-1} a)^{2p}) / 2."""
    if p < 2:
        raise PointwiseError("p must be >= 2")
    if hsp.operator_norm() > 1 + sp.REL_TOL:
        raise PointwiseError("omega operator norm must be <= 1 (rescale the form)")
    K, lam = parallelogram_constants(p, C)
    n = lambda pt: koranyi_norm(hsp, pt, p, lam)
    half_b = h_dilate(0.5, b)
    lhs = n(half_b) ** (2 * p) + n(h_mul(hsp, h_inv(half_b), a)) ** (2 * p) / K ** (2 * p)
    rhs = 0.5 * n(a) ** (2 * p) + 0.5 * n(h_mul(hsp, h_inv(b), a)) ** (2 * p)
    margin = rhs - lhs
    return CheckReport(margin >= -slack, margin, (a, b))


# ---------------------------------------------------------------------------
# Certification campaigns

_CHUNK = 4096


def ball_sampler(space, ineq: InequalityId, xs_count: int = 4):
    """Default configuration sampler drawing points from the space's ball."""
    def draw(rng):
        if ineq in UMBEL_FAMILY:
            return (space.sample(rng), space.sample(rng),
                    tuple(space.sample(rng) for _ in range(xs_count)))
        if ineq is InequalityId.HEISENBERG_PARALLELOGRAM:
            return (space.sample(rng), space.sample(rng))
        if ineq is InequalityId.P_UNIFORM_CONVEXITY:
            return (space.sample(rng), space.sample(rng))
        return tuple(space.sample(rng) for _ in range(4))
    return draw


def certify(space, ineq: InequalityId, cfg: InequalityConfig, sampler,
            n: int, seed: int) -> CampaignReport:
    """Seeded campaign over n sampled configurations.  Sampling is chunked
    with independently derived substreams, so the aggregate is independent of
    evaluation order."""
    if n < 1:
        raise PointwiseError("n must be >= 1")
    chunks = (n + _CHUNK - 1) // _CHUNK
    seeds = np.random.SeedSequence(seed).spawn(chunks)
    violations = 0
    worst = math.inf
    witness: tuple = ()
    done = 0
    for ci in range(chunks):
        rng = np.random.default_rng(seeds[ci])
        for _ in range(min(_CHUNK, n - done)):
            pts = sampler(rng)
            rep = check_inequality(ineq, cfg, pts, space)
            if not rep.holds:
                violations += 1
            if rep.margin < worst:
                worst, witness = rep.margin, rep.witness
        done += min(_CHUNK, n - done)
    return CampaignReport(ineq.value,
                          {"exponent": cfg.exponent, "K": cfg.K, "C": cfg.C,
                           "slack": cfg.slack},
                          n, seed, violations, worst, witness)


def min_feasible_K(space, ineq: InequalityId, cfg: InequalityConfig, sampler,
                   n: int, seed: int, bracket: tuple[float, float],
                   rel_width: float = 1e-6) -> float:
    """Smallest K in the bracket with zero sampled violations, by bisection.
    All inequalities are monotone in K (it enters only as K^{-q} on the LHS)."""
    lo, hi = bracket

    def feasible(k: float) -> bool:
        c = InequalityConfig(cfg.exponent, k, cfg.C, cfg.slack, cfg.xs_count)
        return certify(space, ineq, c, sampler, n, seed).violations == 0

    if feasible(lo):
        return lo
    if not feasible(hi):
        raise PointwiseError("upper bracket is still infeasible")
    while (hi - lo) > rel_width * hi:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# Constant solving


def solve_umbel_K(p: float, c: float, rel: float = 1e-9) -> float:
    """Least K >= 2c with
    (1/2^p) (2c/K + (2 - (2c/K)^p)^{1/p})^p + 2^{p+1}/K <= 1."""
    if p <= 1:
        raise NoSolution("no feasible K exists for p <= 1")
    if c <= 0:
        raise PointwiseError("c must be positive")

    def g(k: float) -> float:
        u = 2 * c / k
        return (u + (2 - u ** p) ** (1 / p)) ** p / 2 ** p + 2 ** (p + 1) / k

    lo = 2 * c
    hi = 2 * lo
    for _ in range(200):
        if g(hi) <= 1:
            break
        lo, hi = hi, 2 * hi
    else:
        raise NoSolution("condition stays infeasible")
    while (hi - lo) > rel * hi:
        mid = 0.5 * (lo + hi)
        if g(mid) <= 1:
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# Midpoint curvature iteration


def alpha_sequence(space, x, y, z, m, n: int) -> list[float]:
    """alpha_k solving alpha_k d(z_k, m)^2 = d(z_k,x)^2 + d(z_k,y)^2 - d(x,y)^2/2
    with z_k on the segment from m toward z at distance d(m,z)/2^k (z_0 = z)."""
    if not isinstance(space, LpSpace) or not (1 < space.p < math.inf):
        raise PointwiseError("needs a geodesic space with interpolation (Lp, 1<p<inf)")
    xv, yv, zv, mv = (np.asarray(v, float) for v in (x, y, z, m))
    if space.distance(z, m) <= sp.ABS_TOL:
        raise PointwiseError("z = m: the iteration is undefined")
    dxy2 = space.distance(x, y) ** 2
    out = []
    for k_ in range(n + 1):
        zk = mv + (zv - mv) / 2 ** k_
        denom = space.norm(zk - mv) ** 2
        num = space.norm(zk - xv) ** 2 + space.norm(zk - yv) ** 2 - dxy2 / 2
        out.append(num / denom)
    return out


# ---------------------------------------------------------------------------
# Convexity moduli


@dataclass(frozen=True)
class ModulusEstimate:
    argument: float
    value: float
    grid: int
    configurations: int


def _circle_points(space: LpSpace, grid: int) -> np.ndarray:
    """Points on the unit sphere of a 2-dimensional lp space."""
    theta = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
    pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    if space.p == math.inf:
        norms = np.max(np.abs(pts), axis=1)
    else:
        norms = np.sum(np.abs(pts) ** space.p, axis=1) ** (1 / space.p)
    return pts / norms[:, None]


def _polish(space: LpSpace, objective, constraints, x0):
    res = optimize.minimize(objective, x0, method="SLSQP",
                            constraints=constraints,
                            options={"maxiter": 200, "ftol": 1e-12})
    if res.success and all(c["fun"](res.x) >= -1e-9 for c in constraints):
        return float(res.fun)
    return math.inf


def modulus_delta(space: LpSpace, eps: float, grid: int = 64) -> ModulusEstimate:
    """Two-point modulus of uniform convexity
    delta(eps) = inf { 1 - ||(x+y)/2|| : ||x||,||y|| <= 1, ||x-y|| >= eps }."""
    if not 0 < eps <= 2:
        raise PointwiseError("eps must lie in (0, 2]")
    if grid < 8:
        raise PointwiseError("grid resolution must be >= 8")
    if space.dim != 2:
        raise PointwiseError("grid estimator supports dim=2 spaces")
    pts = _circle_points(space, grid)
    n = len(pts)
    best = math.inf
    best_pair = None
    count = 0
    for i in range(n):
        diffs = pts - pts[i]
        seps = np.array([space.norm(v) for v in diffs])
        mids = (pts + pts[i]) / 2
        vals = 1 - np.array([space.norm(v) for v in mids])
        ok = seps >= eps
        count += int(ok.sum())
        if ok.any():
            j = int(np.argmin(np.where(ok, vals, math.inf)))
            if vals[j] < best:
                best, best_pair = float(vals[j]), (pts[i].copy(), pts[j].copy())
    if best_pair is not None:
        def obj(v):
            return 1 - space.norm((v[:2] + v[2:]) / 2)
        cons = [
            {"type": "ineq", "fun": lambda v: 1 - space.norm(v[:2])},
            {"type": "ineq", "fun": lambda v: 1 - space.norm(v[2:])},
            {"type": "ineq", "fun": lambda v: space.norm(v[:2] - v[2:]) - eps},
        ]
        x0 = np.concatenate(best_pair)
        best = min(best, _polish(space, obj, cons, x0))
    return ModulusEstimate(eps, max(best, 0.0), grid, count)


def modulus_delta_tilde(space: LpSpace, eps: float, grid: int = 24) -> ModulusEstimate:
    """Tripod variant of the convexity modulus:
    inf over ||z||,||x1||,||x2|| <= 1 with ||x1-x2|| >= eps of
    max_i (1 - ||(z - x_i)/2||)."""
    if not 0 < eps <= 2:
        raise PointwiseError("eps must lie in (0, 2]")
    if grid < 8:
        raise PointwiseError("grid resolution must be >= 8")
    if space.dim != 2:
        raise PointwiseError("grid estimator supports dim=2 spaces")
    pts = _circle_points(space, grid)
    radii = np.array([0.5, 1.0])
    cand = np.concatenate([pts * r for r in radii])
    n = len(cand)
    norm_rows = lambda a: (np.max(np.abs(a), axis=-1) if space.p == math.inf
                           else np.sum(np.abs(a) ** space.p, axis=-1) ** (1 / space.p))
    sepm = norm_rows(cand[:, None, :] - cand[None, :, :])
    best = math.inf
    best_cfg = None
    count = 0
    pairs = np.argwhere(sepm >= eps)
    for zi in range(n):
        halves = norm_rows((cand[zi][None, :] - cand) / 2)
        vals = 1 - halves
        vmax = np.maximum(vals[pairs[:, 0]], vals[pairs[:, 1]])
        count += len(pairs)
        j = int(np.argmin(vmax))
        if vmax[j] < best:
            best = float(vmax[j])
            best_cfg = (cand[zi], cand[pairs[j, 0]], cand[pairs[j, 1]])
    if best_cfg is not None:
        def obj(v):
            z, x1, x2 = v[:2], v[2:4], v[4:6]
            return max(1 - space.norm((z - x1) / 2), 1 - space.norm((z - x2) / 2))
        cons = [
            {"type": "ineq", "fun": lambda v: 1 - space.norm(v[:2])},
            {"type": "ineq", "fun": lambda v: 1 - space.norm(v[2:4])},
            {"type": "ineq", "fun": lambda v: 1 - space.norm(v[4:6])},
            {"type": "ineq", "fun": lambda v: space.norm(v[2:4] - v[4:6]) - eps},
        ]
        x0 = np.concatenate(best_cfg)
        best = min(best, _polish(space, obj, cons, x0))
    return ModulusEstimate(eps, max(best, 0.0), grid, count)


def modulus_beta(space: LpSpace, t: float, m: int = 3, grid: int = 12) -> ModulusEstimate:
    """Finite-family surrogate of the asymptotic convexity modulus beta(t):
    min over (z, x_1..x_m) in the unit ball with pairwise separation >= t
    of max_i (1 - ||(z - x_i)/2||)."""
    if t <= 0:
        raise PointwiseError("t must be positive")
    if m < 2:
        raise PointwiseError("m must be >= 2")
    if space.dim != 2:
        raise PointwiseError("grid estimator supports dim=2 spaces")
    pts = _circle_points(space, grid)
    cand = np.concatenate([pts * 0.5, pts, np.zeros((1, 2))])
    n = len(cand)
    dist = np.array([[space.norm(a - b) for b in cand] for a in cand])
    families = [
        combo for combo in itertools.combinations(range(n), m)
        if all(dist[i, j] >= t for i, j in itertools.combinations(combo, 2))
    ]
    if not families:
        raise PointwiseError("no t-separated family exists at this grid scale")
    best = math.inf
    best_cfg = None
    count = 0
    for zi in range(n):
        vals = 1 - np.array([space.norm((cand[zi] - c) / 2) for c in cand])
        for combo in families:
            count += 1
            v = max(vals[i] for i in combo)
            if v < best:
                best = float(v)
                best_cfg = (cand[zi], [cand[i] for i in combo])
    z0, xs0 = best_cfg

    def obj(v):
        z = v[:2]
        return max(1 - space.norm((z - v[2 + 2 * i: 4 + 2 * i]) / 2) for i in range(m))

    cons = [{"type": "ineq", "fun": lambda v: 1 - space.norm(v[:2])}]
    for i in range(m):
        cons.append({"type": "ineq",
                     "fun": lambda v, i=i: 1 - space.norm(v[2 + 2 * i: 4 + 2 * i])})
    for i, j in itertools.combinations(range(m), 2):
        cons.append({"type": "ineq",
                     "fun": lambda v, i=i, j=j:
                         space.norm(v[2 + 2 * i: 4 + 2 * i] - v[2 + 2 * j: 4 + 2 * j]) - t})
    x0 = np.concatenate([z0] + list(xs0))
    best = min(best, _polish(space, obj, cons, x0))
    return ModulusEstimate(t, max(best, 0.0), grid, count)


# ---------------------------------------------------------------------------
# Finite Ramsey refinement


def ramsey_refine(points, p: float, K: float, N: int, m: int,
                  space=None, anchors=None) -> tuple[int, ...]:
    """Find m indices whose pairwise values d(x_i,x_j)^p / K^p (and unary
    anchor values, when anchors=(w, z) are given) each fall inside a single
    width-1/N bucket, by brute-force clique search."""
    if m > 5:
        raise PointwiseError("m is capped at 5 (clique search is exponential)")
    if N < 1:
        raise PointwiseError("N must be >= 1")
    if len(points) < m:
        raise PointwiseError("not enough points")
    if space is None:
        space = LpSpace(len(points[0]), 2.0)
    d = space.distance

    def bucket(v: float) -> int:
        return int(math.floor(v * N))

    if anchors is not None:
        w, z = anchors
        unary = [
            (bucket(d(w, x) ** p / 2 ** p), bucket(0.5 * d(z, x) ** p))
            for x in points
        ]
    else:
        unary = [() for _ in points]
    n = len(points)
    color = {}
    for i, j in itertools.combinations(range(n), 2):
        color[i, j] = bucket(d(points[i], points[j]) ** p / K ** p)
    for combo in itertools.combinations(range(n), m):
        if len({unary[i] for i in combo}) > 1:
            continue
        pair_colors = {color[i, j] for i, j in itertools.combinations(combo, 2)}
        if len(pair_colors) <= 1:
            return combo
    raise PointwiseError("no monochromatic subset of the requested size")
