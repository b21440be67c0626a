"""Finite rooted trees and unit-weight graph geometries.

Two tree codings are supported: binary trees, whose vertices are tuples of
signs in {-1, +1}, and increasing trees, whose vertices are strictly
increasing tuples of labels drawn from {1..b}.  The empty tuple is the root
and the tree metric is the usual path metric.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

Vertex = tuple

BINARY = "binary"
INCREASING = "increasing"

_GRAPH_VERTEX_CAP = 200_000


class TreeSpecError(ValueError):
    pass


@dataclass(frozen=True)
class TreeSpec:
    """A finite rooted tree: binary or increasing-tuple coding."""

    kind: str
    height: int
    branching: int | None = None

    def __post_init__(self):
        if self.kind not in (BINARY, INCREASING):
            raise TreeSpecError(f"unknown tree kind {self.kind!r}")
        if self.height < 0:
            raise TreeSpecError("height must be nonnegative")
        if self.kind == INCREASING:
            if self.branching is None:
                raise TreeSpecError("increasing trees need a branching bound b")
            if self.branching < self.height:
                raise TreeSpecError(
                    f"b={self.branching} < h={self.height}: no full-height vertex exists"
                )
        elif self.branching is not None:
            raise TreeSpecError("binary trees take no branching bound")

    def vertex_count(self) -> int:
        if self.kind == BINARY:
            return 2 ** (self.height + 1) - 1
        return sum(math.comb(self.branching, l) for l in range(self.height + 1))

    def contains(self, v: Vertex) -> bool:
        if len(v) > self.height:
            return False
        if self.kind == BINARY:
            return all(c in (-1, 1) for c in v)
        return (
            all(1 <= c <= self.branching for c in v)
            and all(a < b for a, b in zip(v, v[1:]))
        )


def parse_tree_spec(text: str) -> TreeSpec:
    """Parse compact descriptors "bin:h=4" and "inc:h=8,b=10"."""
    try:
        head, _, rest = text.partition(":")
        fields = dict(kv.split("=") for kv in rest.split(",") if kv)
        if head == "bin":
            return TreeSpec(BINARY, int(fields.pop("h")), None)
        if head == "inc":
            return TreeSpec(INCREASING, int(fields.pop("h")), int(fields.pop("b")))
    except (ValueError, KeyError) as exc:
        raise TreeSpecError(f"bad tree descriptor {text!r}") from exc
    raise TreeSpecError(f"bad tree descriptor {text!r}")


def format_tree_spec(spec: TreeSpec) -> str:
    if spec.kind == BINARY:
        return f"bin:h={spec.height}"
    return f"inc:h={spec.height},b={spec.branching}"


def vertices_at_height(spec: TreeSpec, h: int) -> list[Vertex]:
    """All vertices of exact height h, in lexicographic order."""
    if h < 0 or h > spec.height:
        raise TreeSpecError(f"height {h} out of range")
    if spec.kind == BINARY:
        return list(itertools.product((-1, 1), repeat=h))
    return list(itertools.combinations(range(1, spec.branching + 1), h))


def vertices(spec: TreeSpec) -> list[Vertex]:
    """All vertices ordered by height, then lexicographically."""
    out: list[Vertex] = []
    for h in range(spec.height + 1):
        out.extend(vertices_at_height(spec, h))
    return out


def parent(v: Vertex) -> Vertex:
    if not v:
        raise TreeSpecError("the root has no parent")
    return v[:-1]


def tree_distance(u: Vertex, v: Vertex) -> int:
    """Path distance |u| + |v| - 2 * (longest common prefix length)."""
    lcp = 0
    for a, b in zip(u, v):
        if a != b:
            break
        lcp += 1
    return len(u) + len(v) - 2 * lcp


def level_edges(spec: TreeSpec, level: int) -> list[tuple[Vertex, Vertex]]:
    """All (parent, child) edges between heights level-1 and level."""
    if level < 1 or level > spec.height:
        raise TreeSpecError(f"level {level} out of range [1, {spec.height}]")
    return [(v[:-1], v) for v in vertices_at_height(spec, level)]


# ---------------------------------------------------------------------------
# Binary -> increasing tree morphism


def binary_to_increasing(k: int, J: Callable[[Vertex, Vertex], int]) -> dict[Vertex, Vertex]:
    """Height- and extension-preserving morphism of the binary tree of height k
    into the increasing-tuple tree, driven by a threshold function J on
    extension pairs of the image tree.

    At each node the +1 subtree receives the smallest available label, and the
    -1 subtree receives the label j0 = max over queried thresholds, clamped
    below by start + 1 so tuples stay strictly increasing and the two children
    of a node never share a label.
    """
    if k < 0:
        raise TreeSpecError("k must be nonnegative")

    def rec(height: int, prefix_img: Vertex, start: int) -> dict[Vertex, Vertex]:
        out: dict[Vertex, Vertex] = {(): ()}
        if height == 0:
            return out
        plus = rec(height - 1, prefix_img + (start,), start + 1)
        j0 = start + 1
        for suffix in plus.values():
            j0 = max(j0, J(prefix_img, prefix_img + (start,) + suffix))
        minus = rec(height - 1, prefix_img + (j0,), j0 + 1)
        for eps, img in plus.items():
            out[(1,) + eps] = (start,) + img
        for eps, img in minus.items():
            out[(-1,) + eps] = (j0,) + img
        return out

    return rec(k, (), 1)


def check_star_property(k: int, J: Callable[[Vertex, Vertex], int],
                        phi: dict[Vertex, Vertex]) -> bool:
    """Exhaustively verify the branching property of a binary->increasing
    morphism: heights and extensions are preserved, all -1-side children under
    a node share one label j', and j' dominates every queried threshold."""
    for eps, img in phi.items():
        if len(img) != len(eps):
            return False
        if eps and phi[eps[:-1]] != img[:-1]:
            return False
    for eps in phi:
        if len(eps) >= k:
            continue
        minus_labels = {
            phi[eps + (-1,) + delta][len(eps)]
            for delta in _suffixes(k - len(eps) - 1)
        }
        if len(minus_labels) != 1:
            return False
        j_prime = minus_labels.pop()
        if j_prime == phi[eps + (1,)][len(eps)]:
            return False
        for delta in _suffixes(k - len(eps) - 1):
            if j_prime < J(phi[eps], phi[eps + (1,) + delta]):
                return False
    return True


def _suffixes(max_height: int) -> list[Vertex]:
    out: list[Vertex] = []
    for h in range(max_height + 1):
        out.extend(itertools.product((-1, 1), repeat=h))
    return out


# ---------------------------------------------------------------------------
# Graph spaces


@dataclass(frozen=True)
class GraphSpace:
    """A finite connected graph with unit edge weights and its path metric."""

    n: int
    edges: tuple[tuple[int, int], ...]
    dist: np.ndarray = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        if self.dist is None:
            object.__setattr__(self, "dist", _apsp(self.n, self.edges))
        d = self.dist
        if not np.isfinite(d).all():
            raise TreeSpecError("graph is not connected")
        if not np.array_equal(d, d.T) or np.diagonal(d).any():
            raise TreeSpecError("invalid distance table")

    def distance(self, i: int, j: int) -> float:
        return float(self.dist[i, j])


def _apsp(n: int, edges) -> np.ndarray:
    rows = [e[0] for e in edges] + [e[1] for e in edges]
    cols = [e[1] for e in edges] + [e[0] for e in edges]
    data = np.ones(len(rows))
    adj = csr_matrix((data, (rows, cols)), shape=(n, n))
    return shortest_path(adj, method="D", unweighted=True)


def apsp_bfs(n: int, edges) -> np.ndarray:
    """Independent all-pairs shortest paths by repeated BFS (test oracle)."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    out = np.full((n, n), np.inf)
    for src in range(n):
        out[src, src] = 0
        frontier = [src]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if not np.isfinite(out[src, w]):
                        out[src, w] = d
                        nxt.append(w)
            frontier = nxt
    return out


@functools.lru_cache(maxsize=64)
def tree_graph(spec: TreeSpec) -> tuple[GraphSpace, dict[Vertex, int]]:
    """The tree itself as a GraphSpace, with its vertex index mapping."""
    verts = vertices(spec)
    index = {v: i for i, v in enumerate(verts)}
    edges = tuple(
        (index[v[:-1]], index[v])
        for v in verts
        if v
    )
    return GraphSpace(len(verts), edges), index


def _replace_edges(n: int, edges, block) -> tuple[int, list[tuple[int, int]]]:
    """Replace every edge (u, v) by a fixed block of fresh internal vertices.

    `block(u, v, fresh)` returns new edges given a function allocating fresh
    vertex ids.
    """
    new_edges: list[tuple[int, int]] = []
    counter = [n]

    def fresh() -> int:
        counter[0] += 1
        return counter[0] - 1

    for u, v in edges:
        new_edges.extend(block(u, v, fresh))
    return counter[0], new_edges


def diamond_graph(k: int, cap: int = _GRAPH_VERTEX_CAP) -> GraphSpace:
    """Level-k diamond graph: iterated replacement of each edge by a 4-cycle."""
    if k < 0:
        raise TreeSpecError("k must be nonnegative")
    n, edges = 2, [(0, 1)]
    for _ in range(k):
        def block(u, v, fresh):
            a, b = fresh(), fresh()
            return [(u, a), (a, v), (u, b), (b, v)]
        n, edges = _replace_edges(n, edges, block)
        if n > cap:
            raise TreeSpecError(f"vertex count {n} exceeds cap {cap}")
    return GraphSpace(n, tuple(edges))


def laakso_graph(k: int, cap: int = _GRAPH_VERTEX_CAP) -> GraphSpace:
    """Level-k Laakso graph: iterated replacement of each edge by the 6-edge
    block with a split middle segment."""
    if k < 0:
        raise TreeSpecError("k must be nonnegative")
    n, edges = 2, [(0, 1)]
    for _ in range(k):
        def block(u, v, fresh):
            a, b1, b2, c = fresh(), fresh(), fresh(), fresh()
            return [(u, a), (a, b1), (a, b2), (b1, c), (b2, c), (c, v)]
        n, edges = _replace_edges(n, edges, block)
        if n > cap:
            raise TreeSpecError(f"vertex count {n} exceeds cap {cap}")
    return GraphSpace(n, tuple(edges))
