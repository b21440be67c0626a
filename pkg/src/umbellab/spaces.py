"""Target metric and quasi-metric spaces behind one distance-oracle interface.

Supported spaces: finite distance matrices, finite-dimensional lp spaces,
graph path metrics, Heisenberg groups with Koranyi-type quasi-metrics, and
lp-products of the above.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .trees import GraphSpace

REL_TOL = 1e-9
ABS_TOL = 1e-12


class SpaceError(ValueError):
    pass


def close(a: float, b: float) -> bool:
    return abs(a - b) <= max(REL_TOL * max(abs(a), abs(b)), ABS_TOL)


# ---------------------------------------------------------------------------
# lp norms


def lp_norm(x, p: float) -> float:
    v = np.asarray(x, dtype=float)
    if p == math.inf:
        return float(np.max(np.abs(v))) if v.size else 0.0
    if p == 1:
        return float(np.sum(np.abs(v)))
    if p == 2:
        return float(np.sqrt(np.sum(v * v)))
    return float(np.sum(np.abs(v) ** p) ** (1.0 / p))


@dataclass(frozen=True)
class LpSpace:
    """R^dim with the lp norm."""

    dim: int
    p: float

    def __post_init__(self):
        if self.p < 1:
            raise SpaceError("p must be >= 1")
        if self.dim < 1:
            raise SpaceError("dim must be >= 1")

    quasi_constant: float = 1.0

    def norm(self, x) -> float:
        return lp_norm(x, self.p)

    def distance(self, a, b) -> float:
        av, bv = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        if av.shape != (self.dim,) or bv.shape != (self.dim,):
            raise SpaceError("dimension mismatch")
        return lp_norm(av - bv, self.p)

    def sample(self, rng: np.random.Generator):
        x = rng.uniform(-1.0, 1.0, self.dim)
        n = self.norm(x)
        if n > 1.0:
            x = x / n
        return tuple(x)

    def describe(self) -> str:
        if self.p == 2:
            return f"l2:dim={self.dim}"
        p = "inf" if self.p == math.inf else f"{self.p:g}"
        return f"lp:p={p},dim={self.dim}"


@dataclass(frozen=True)
class FiniteMatrixSpace:
    """A finite metric space given by its distance matrix; points are indices."""

    matrix: np.ndarray = field(repr=False)
    quasi_constant: float = 1.0

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise SpaceError("matrix must be square")
        if not np.allclose(m, m.T, rtol=REL_TOL, atol=ABS_TOL):
            raise SpaceError("matrix must be symmetric")
        if np.abs(np.diagonal(m)).max(initial=0.0) > ABS_TOL:
            raise SpaceError("diagonal must be zero")
        if (m < 0).any():
            raise SpaceError("distances must be nonnegative")
        n = m.shape[0]
        slack = REL_TOL * (m.max(initial=0.0) + 1.0)
        for mid in range(n):
            via = m[:, mid][:, None] + m[mid, :][None, :]
            if (m > via + slack).any():
                raise SpaceError("triangle inequality fails")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def distance(self, a: int, b: int) -> float:
        return float(self.matrix[a, b])

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.n))

    @classmethod
    def from_json(cls, text: str) -> "FiniteMatrixSpace":
        obj = json.loads(text)
        m = np.asarray(obj["d"], dtype=float)
        if m.shape != (obj["n"], obj["n"]):
            raise SpaceError("matrix shape disagrees with n")
        return cls(m)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "d": self.matrix.tolist()})

    def describe(self) -> str:
        return f"matrix:n={self.n}"


@dataclass(frozen=True)
class GraphMetricSpace:
    """Path metric of a GraphSpace; points are vertex ids."""

    graph: GraphSpace
    quasi_constant: float = 1.0

    def distance(self, a: int, b: int) -> float:
        return self.graph.distance(a, b)

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.graph.n))

    def describe(self) -> str:
        return f"graph:n={self.graph.n}"


@dataclass(frozen=True)
class ProductSpace:
    """lp-product of component spaces; points are tuples of component points."""

    components: tuple
    p: float

    def __post_init__(self):
        if self.p < 1:
            raise SpaceError("p must be >= 1")

    @property
    def quasi_constant(self) -> float:
        return max(c.quasi_constant for c in self.components)

    def distance(self, a, b) -> float:
        if len(a) != len(self.components) or len(b) != len(self.components):
            raise SpaceError("component count mismatch")
        ds = [c.distance(x, y) for c, x, y in zip(self.components, a, b)]
        return lp_norm(ds, self.p)

    def sample(self, rng: np.random.Generator):
        return tuple(c.sample(rng) for c in self.components)

    def describe(self) -> str:
        p = "inf" if self.p == math.inf else f"{self.p:g}"
        return "prod:p=" + p + ";" + ";".join(c.describe() for c in self.components)


# ---------------------------------------------------------------------------
# Heisenberg groups


@dataclass(frozen=True)
class HPoint:
    """A Heisenberg group element (x, s): horizontal part and vertical part."""

    x: tuple
    s: float


@dataclass(frozen=True)
class HeisenbergSpace:
    """Heisenberg group over R^dim with antisymmetric form omega(x,y) = x^T O y."""

    omega_matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.omega_matrix, dtype=float)
        object.__setattr__(self, "omega_matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise SpaceError("omega matrix must be square")
        if not np.allclose(m, -m.T, rtol=REL_TOL, atol=ABS_TOL):
            raise SpaceError("omega matrix must be antisymmetric")

    @property
    def dim(self) -> int:
        return self.omega_matrix.shape[0]

    def omega(self, x, y) -> float:
        return float(np.asarray(x, float) @ self.omega_matrix @ np.asarray(y, float))

    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.omega_matrix, 2))


def standard_symplectic(dim: int = 2) -> HeisenbergSpace:
    if dim % 2:
        raise SpaceError("symplectic form needs even dimension")
    half = dim // 2
    m = np.zeros((dim, dim))
    m[:half, half:] = np.eye(half)
    m[half:, :half] = -np.eye(half)
    return HeisenbergSpace(m)


def h_mul(sp: HeisenbergSpace, a: HPoint, b: HPoint) -> HPoint:
    if len(a.x) != sp.dim or len(b.x) != sp.dim:
        raise SpaceError("dimension mismatch")
    x = tuple(float(u + v) for u, v in zip(a.x, b.x))
    return HPoint(x, a.s + b.s + sp.omega(a.x, b.x))


def h_inv(a: HPoint) -> HPoint:
    return HPoint(tuple(-u for u in a.x), -a.s)


def h_dilate(t: float, a: HPoint) -> HPoint:
    if t <= 0:
        raise SpaceError("dilation factor must be positive")
    return HPoint(tuple(t * u for u in a.x), t * t * a.s)


def koranyi_norm(sp: HeisenbergSpace, a: HPoint, p: float, lam: float) -> float:
    if lam <= 0:
        raise SpaceError("lambda must be positive")
    xn = lp_norm(a.x, 2)
    if p == math.inf:
        return max(xn, lam * math.sqrt(abs(a.s)))
    return (xn ** (2 * p) + lam * abs(a.s) ** p) ** (1.0 / (2 * p))


def koranyi_dist(sp: HeisenbergSpace, a: HPoint, b: HPoint, p: float, lam: float) -> float:
    return koranyi_norm(sp, h_mul(sp, h_inv(b), a), p, lam)


@dataclass(frozen=True)
class HeisenbergMetricSpace:
    """Heisenberg group with a Koranyi quasi-metric d_{p,lambda}."""

    space: HeisenbergSpace
    p: float = math.inf
    lam: float = 1.0
    quasi_constant: float = 2.0  # empirical bound, refine with quasi_constant_estimate

    def distance(self, a: HPoint, b: HPoint) -> float:
        return koranyi_dist(self.space, a, b, self.p, self.lam)

    def norm(self, a: HPoint) -> float:
        return koranyi_norm(self.space, a, self.p, self.lam)

    def sample(self, rng: np.random.Generator) -> HPoint:
        x = tuple(rng.uniform(-1.0, 1.0, self.space.dim))
        pt = HPoint(x, float(rng.uniform(-1.0, 1.0)))
        n = self.norm(pt)
        if n > 1.0:
            pt = h_dilate(1.0 / n, pt)
        return pt

    def describe(self) -> str:
        p = "inf" if self.p == math.inf else f"{self.p:g}"
        return f"heis:dim={self.space.dim},metric=koranyi,p={p},lambda={self.lam:g}"


def horizontal_length(sp: HeisenbergSpace, samples) -> tuple[float, float]:
    """Polygonal horizontal length of a sampled curve of (x, z) pairs and its
    discrete horizontality defect max |dz - omega(x, dx)| over grid cells."""
    if len(samples) < 2:
        raise SpaceError("need at least 2 samples")
    length = 0.0
    residual = 0.0
    for (x0, z0), (x1, z1) in zip(samples, samples[1:]):
        dx = np.asarray(x1, float) - np.asarray(x0, float)
        length += lp_norm(dx, 2)
        residual = max(residual, abs((z1 - z0) - sp.omega(x0, dx)))
    return length, residual


def quasi_constant_estimate(space, sampler, n: int, seed: int) -> float:
    """Max over n sampled triples of d(a,b) / (d(a,c) + d(c,b))."""
    if n < 1:
        raise SpaceError("n must be >= 1")
    rng = np.random.default_rng(seed)
    best = 0.0
    seen = False
    for _ in range(n):
        a, b, c = sampler(rng), sampler(rng), sampler(rng)
        denom = space.distance(a, c) + space.distance(c, b)
        if denom <= ABS_TOL:
            continue
        seen = True
        best = max(best, space.distance(a, b) / denom)
    if not seen:
        raise SpaceError("sampler produced only degenerate triples")
    return best


# ---------------------------------------------------------------------------
# Descriptor parsing


def _parse_exponent(text: str) -> float:
    return math.inf if text == "inf" else float(text)


def parse_space(text: str):
    """Parse descriptors like "l2:dim=3", "lp:p=1.5,dim=4",
    "heis:dim=2,metric=koranyi,p=inf,lambda=1", "graph:file=g.json",
    "matrix:file=m.json", "prod:p=2;l2:dim=2;l2:dim=2"."""
    if text.startswith("prod:"):
        head, *parts = text.split(";")
        if not parts:
            raise SpaceError("product needs components")
        p = _parse_exponent(head.split("p=", 1)[1])
        return ProductSpace(tuple(parse_space(c) for c in parts), p)
    head, _, rest = text.partition(":")
    fields = dict(kv.split("=", 1) for kv in rest.split(",") if kv)
    try:
        if head == "l2":
            return LpSpace(int(fields["dim"]), 2.0)
        if head == "lp":
            return LpSpace(int(fields["dim"]), _parse_exponent(fields["p"]))
        if head == "heis":
            dim = int(fields["dim"])
            if fields.get("metric", "koranyi") != "koranyi":
                raise SpaceError("only the koranyi metric variant is supported")
            return HeisenbergMetricSpace(
                standard_symplectic(dim),
                _parse_exponent(fields.get("p", "inf")),
                float(fields.get("lambda", "1")),
            )
        if head == "graph":
            with open(fields["file"]) as fh:
                obj = json.load(fh)
            return GraphMetricSpace(GraphSpace(obj["n"], tuple(map(tuple, obj["edges"]))))
        if head == "matrix":
            with open(fields["file"]) as fh:
                return FiniteMatrixSpace.from_json(fh.read())
    except KeyError as exc:
        raise SpaceError(f"bad space descriptor {text!r}") from exc
    raise SpaceError(f"bad space descriptor {text!r}")
