"""Weighted undirected graphs with a designated boundary (exit) vertex set."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import (
    Disconnected,
    DuplicateEdge,
    EmptyBoundary,
    NonPositiveWeight,
    SelfLoop,
)


@dataclass(eq=False)
class WeightedGraph:
    """Finite simple connected undirected graph with positive symmetric weights.

    Instances are immutable after construction and safe to share across
    threads.  Every adjacency is stored twice as a directed arc, and the arc
    arrays are sorted by (destination, source) so that per-vertex reductions
    can run as ``reduceat`` segments aligned with vertex ids.
    """

    vertex_count: int
    edge_list: np.ndarray       # (m, 2) int, each undirected edge once, a < b
    edge_weights: np.ndarray    # (m,) float
    boundary: np.ndarray        # sorted vertex ids, non-empty
    arc_src: np.ndarray         # (2m,) int
    arc_dst: np.ndarray         # (2m,) int
    arc_weight: np.ndarray      # (2m,) float
    arc_starts: np.ndarray      # (n,) reduceat offsets, one segment per vertex
    degrees: np.ndarray         # (n,) int
    is_boundary: np.ndarray     # (n,) bool
    interior: np.ndarray        # sorted vertex ids not in the boundary
    arc_touches_boundary: np.ndarray = field(repr=False)  # (2m,) bool
    weight_csr: csr_matrix = field(repr=False)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.vertex_count else 0

    def neighbors(self, x: int) -> np.ndarray:
        """Sorted neighbor ids of vertex x."""
        lo = self.arc_starts[x]
        hi = self.arc_starts[x + 1] if x + 1 < self.vertex_count else self.arc_src.size
        return self.arc_src[lo:hi]

    def weight_between(self, x: int, y: int) -> float:
        """Weight of the edge x ~ y; raises KeyError if not adjacent."""
        lo = self.arc_starts[x]
        hi = self.arc_starts[x + 1] if x + 1 < self.vertex_count else self.arc_src.size
        idx = np.searchsorted(self.arc_src[lo:hi], y)
        if idx < hi - lo and self.arc_src[lo + idx] == y:
            return float(self.arc_weight[lo + idx])
        raise KeyError(f"vertices {x} and {y} are not adjacent")


def build_graph(vertex_count, edges, boundary) -> WeightedGraph:
    """Validate and assemble a WeightedGraph.

    ``edges`` is an iterable of (x, y, w); each undirected edge is given once
    and mirrored internally.  Construction rejects self loops, duplicate
    edges, non-positive weights, disconnected graphs, and empty boundaries,
    naming the offending element.
    """
    n = int(vertex_count)
    if n < 1:
        raise ValueError("vertex_count must be a positive integer")

    seen: set[tuple[int, int]] = set()
    pairs: list[tuple[int, int]] = []
    weights: list[float] = []
    for x, y, w in edges:
        x, y, w = int(x), int(y), float(w)
        if not (0 <= x < n and 0 <= y < n):
            raise ValueError(f"edge ({x}, {y}) has an endpoint outside 0..{n - 1}")
        if x == y:
            raise SelfLoop(f"edge ({x}, {y}) is a self-loop")
        if not (w > 0.0) or not np.isfinite(w):
            raise NonPositiveWeight(f"edge ({x}, {y}) has weight {w}")
        key = (min(x, y), max(x, y))
        if key in seen:
            raise DuplicateEdge(f"edge {key} appears more than once")
        seen.add(key)
        pairs.append(key)
        weights.append(w)

    boundary_ids = np.unique(np.asarray(sorted(int(b) for b in boundary), dtype=np.int64))
    if boundary_ids.size == 0:
        raise EmptyBoundary("the boundary vertex set is empty")
    if boundary_ids[0] < 0 or boundary_ids[-1] >= n:
        raise ValueError("boundary contains a vertex id outside 0..n-1")

    m = len(pairs)
    edge_arr = np.asarray(pairs, dtype=np.int64).reshape(m, 2)
    w_arr = np.asarray(weights, dtype=float)

    if n > 1:
        if m == 0:
            raise Disconnected("graph with more than one vertex has no edges")
        sym = csr_matrix(
            (np.concatenate([w_arr, w_arr]),
             (np.concatenate([edge_arr[:, 0], edge_arr[:, 1]]),
              np.concatenate([edge_arr[:, 1], edge_arr[:, 0]]))),
            shape=(n, n),
        )
        n_comp, labels = connected_components(sym, directed=False)
        if n_comp != 1:
            outside = int(np.flatnonzero(labels != labels[0])[0])
            raise Disconnected(
                f"graph splits into {n_comp} components; vertex {outside} is "
                f"not reachable from vertex 0"
            )
    else:
        sym = csr_matrix((n, n))

    arc_src = np.concatenate([edge_arr[:, 0], edge_arr[:, 1]])
    arc_dst = np.concatenate([edge_arr[:, 1], edge_arr[:, 0]])
    arc_w = np.concatenate([w_arr, w_arr])
    order = np.lexsort((arc_src, arc_dst))
    arc_src, arc_dst, arc_w = arc_src[order], arc_dst[order], arc_w[order]
    arc_starts = np.searchsorted(arc_dst, np.arange(n, dtype=np.int64))

    degrees = np.bincount(arc_dst, minlength=n)
    if n > 1 and degrees.min() == 0:
        # unreachable given the connectivity check, kept as a hard invariant
        raise Disconnected("isolated vertex survived connectivity validation")

    is_boundary = np.zeros(n, dtype=bool)
    is_boundary[boundary_ids] = True
    interior = np.flatnonzero(~is_boundary)
    touches = is_boundary[arc_src] | is_boundary[arc_dst]

    return WeightedGraph(
        vertex_count=n,
        edge_list=edge_arr,
        edge_weights=w_arr,
        boundary=boundary_ids,
        arc_src=arc_src,
        arc_dst=arc_dst,
        arc_weight=arc_w,
        arc_starts=arc_starts,
        degrees=degrees,
        is_boundary=is_boundary,
        interior=interior,
        arc_touches_boundary=touches,
        weight_csr=sym,
    )


def max_degree(g: WeightedGraph) -> int:
    """Largest neighbor count over all vertices (the D of the CFL condition)."""
    return g.max_degree


def geodesic_distance(g: WeightedGraph, x: int, y: int) -> float:
    """Minimal total edge weight over paths from x to y."""
    if x == y:
        return 0.0
    dist = dijkstra(g.weight_csr, directed=False, indices=x)
    return float(dist[y])


def boundary_distance(g: WeightedGraph) -> np.ndarray:
    """Per-vertex geodesic distance to the nearest boundary vertex."""
    if g.vertex_count == 1:
        return np.zeros(1)
    dist = dijkstra(g.weight_csr, directed=False, indices=g.boundary, min_only=True)
    dist[g.boundary] = 0.0
    return dist
