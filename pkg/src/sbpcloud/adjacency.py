"""Connectivity graphs over point clouds.

Four notions of adjacency are provided: fixed Euclidean radius (the
production method), Euclidean minimum spanning tree (kept only to
demonstrate that it produces non-convergent operators), and Delaunay
neighbors of degree 1 or 2. All graphs are simple: symmetric, 0/1,
zero diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree
from scipy.spatial import Delaunay, QhullError, cKDTree

from .errors import ConnectivityError, ParameterError
from .geometry import DomainSpec, PointCloud


@dataclass(frozen=True)
class AdjacencyGraph:
    """Symmetric simple graph over ``n`` nodes.

    ``edges`` holds each undirected edge once as a row ``(i, j)`` with
    ``i < j``, sorted lexicographically.
    """

    n: int
    edges: np.ndarray  # (m, 2) int64
    method: str
    radius: float | None = None

    def __post_init__(self):
        self.edges.setflags(write=False)

    @property
    def edge_count(self) -> int:
        return self.edges.shape[0]

    def matrix(self) -> sp.csr_matrix:
        """0/1 adjacency matrix in CSR format."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        data = np.ones(rows.shape[0])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def degrees(self) -> np.ndarray:
        counts = np.zeros(self.n, dtype=np.int64)
        np.add.at(counts, self.edges[:, 0], 1)
        np.add.at(counts, self.edges[:, 1], 1)
        return counts


def _canonical_edges(pairs: np.ndarray) -> np.ndarray:
    """Deduplicate and sort undirected pairs into canonical (i < j) form."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    lo = pairs.min(axis=1)
    hi = pairs.max(axis=1)
    keep = lo != hi
    stacked = np.column_stack([lo[keep], hi[keep]])
    return np.unique(stacked, axis=0)


def _check_connected(graph: AdjacencyGraph) -> None:
    n_comp, labels = connected_components(graph.matrix(), directed=False)
    if n_comp != 1:
        # report a representative from the smallest component
        sizes = np.bincount(labels)
        orphan = int(np.flatnonzero(labels == np.argmin(sizes))[0])
        raise ConnectivityError(
            f"{graph.method} graph has {n_comp} components "
            f"(e.g. node {orphan} is separated from node 0)",
            orphan=orphan,
        )


def is_connected(graph: AdjacencyGraph) -> bool:
    if graph.n <= 1:
        return True
    n_comp, _ = connected_components(graph.matrix(), directed=False)
    return n_comp == 1


def radius_adjacency(cloud: PointCloud, r: float) -> AdjacencyGraph:
    """Connect every pair of nodes at Euclidean distance in (0, r].

    Uses a KD-tree pair query; never forms the dense distance matrix.
    """
    if r <= 0:
        raise ParameterError(f"radius must be positive, got {r}")
    pts = cloud.points
    pairs = cKDTree(pts).query_pairs(r, output_type="ndarray")
    if pairs.size:
        d = np.linalg.norm(pts[pairs[:, 0]] - pts[pairs[:, 1]], axis=1)
        pairs = pairs[d > 0.0]
    graph = AdjacencyGraph(cloud.n, _canonical_edges(pairs), "euclidean_radius", radius=r)
    _check_connected(graph)
    return graph


# Shear factor of the symbolic perturbation applied before triangulation.
# Grid-aligned clouds have cocircular quadruples everywhere; an arbitrary
# per-quadruple tie-break gives stencils that vary node to node, which
# destroys the convergence of the resulting operators. A global shear breaks
# every tie the same way, so the triangulation is uniform away from the
# boundary. It must dominate floating-point noise in the incircle test but
# stay far below genuine incircle margins.
_TIE_BREAK_SHEAR = 1e-7


def _delaunay_edges(pts: np.ndarray) -> np.ndarray:
    """Undirected edge list of a Delaunay triangulation.

    Triangulates a sheared copy of the points ((x, y) -> (x + shear*y, y))
    so that cocircular ties are broken deterministically and consistently;
    edge indices refer to the original points. Degenerate inputs (e.g. all
    points collinear) fall back to the complete graph, which is the correct
    limit for the tiny clouds where this can occur.
    """
    sheared = np.column_stack([pts[:, 0] + _TIE_BREAK_SHEAR * pts[:, 1], pts[:, 1]])
    try:
        tri = Delaunay(sheared)
    except QhullError:
        if pts.shape[0] > 2000:
            raise
        n = pts.shape[0]
        i, j = np.triu_indices(n, k=1)
        return np.column_stack([i, j]).astype(np.int64)
    s = tri.simplices
    pairs = np.vstack([s[:, [0, 1]], s[:, [1, 2]], s[:, [0, 2]]])
    return _canonical_edges(pairs)


def mst_adjacency(cloud: PointCloud) -> AdjacencyGraph:
    """Euclidean minimum spanning tree; exactly n - 1 edges.

    The EMST is a subgraph of the Delaunay triangulation, so the tree is
    computed on Delaunay candidate edges only.
    """
    pts = cloud.points
    n = pts.shape[0]
    if n < 2:
        raise ParameterError("minimum spanning tree needs at least 2 nodes")
    edges = _delaunay_edges(pts)
    d = np.linalg.norm(pts[edges[:, 0]] - pts[edges[:, 1]], axis=1)
    g = sp.csr_matrix((d, (edges[:, 0], edges[:, 1])), shape=(n, n))
    tree = minimum_spanning_tree(g).tocoo()
    pairs = np.column_stack([tree.row, tree.col])
    return AdjacencyGraph(n, _canonical_edges(pairs), "mst")


def _segment_crosses_hole(pts: np.ndarray, edges: np.ndarray, spec: DomainSpec) -> np.ndarray:
    """Boolean mask of edges whose segment enters some hole's interior."""
    p = pts[edges[:, 0]]
    q = pts[edges[:, 1]]
    pq = q - p
    seg2 = np.einsum("ij,ij->i", pq, pq)
    crosses = np.zeros(edges.shape[0], dtype=bool)
    for hole in spec.holes:
        c = np.array([hole.cx, hole.cy])
        t = np.einsum("ij,ij->i", c - p, pq) / np.where(seg2 > 0, seg2, 1.0)
        t = np.clip(t, 0.0, 1.0)
        closest = p + t[:, None] * pq
        d = np.linalg.norm(closest - c, axis=1)
        # strict interior test with a relative guard so tangent contact
        # (d == hole radius) does not count as a crossing
        crosses |= d < hole.radius * (1.0 - 1e-12)
    return crosses


def delaunay_adjacency(
    cloud: PointCloud, degree: int, spec: DomainSpec | None = None
) -> AdjacencyGraph:
    """Delaunay neighbors (degree 1) or neighbors-of-neighbors (degree 2).

    On punctured domains, edges whose segment cuts through a hole are
    removed after triangulation, before the degree-2 closure, and again
    after the closure (the closure can re-introduce crossing pairs).
    """
    if degree not in (1, 2):
        raise ParameterError(f"degree must be 1 or 2, got {degree}")
    pts = cloud.points
    edges = _delaunay_edges(pts)
    if spec is not None and spec.holes:
        edges = edges[~_segment_crosses_hole(pts, edges, spec)]
    if degree == 2:
        a = sp.csr_matrix(
            (np.ones(2 * edges.shape[0]),
             (np.concatenate([edges[:, 0], edges[:, 1]]),
              np.concatenate([edges[:, 1], edges[:, 0]]))),
            shape=(cloud.n, cloud.n),
        )
        two_hop = (a @ a).tocoo()
        pairs = np.vstack([edges, np.column_stack([two_hop.row, two_hop.col])])
        edges = _canonical_edges(pairs)
        if spec is not None and spec.holes:
            edges = edges[~_segment_crosses_hole(pts, edges, spec)]
    graph = AdjacencyGraph(cloud.n, edges, f"delaunay{degree}")
    _check_connected(graph)
    return graph


def save_graph(graph: AdjacencyGraph, edge_path, header_path) -> None:
    """Write an edge list ("i j" per line, 0-based) plus a JSON header."""
    import json

    with open(edge_path, "w") as fh:
        for i, j in graph.edges:
            fh.write(f"{i} {j}\n")
    with open(header_path, "w") as fh:
        json.dump({"N": graph.n, "method": graph.method, "r": graph.radius}, fh, indent=2)
        fh.write("\n")
