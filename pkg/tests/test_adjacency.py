import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbpcloud import presets
from sbpcloud.adjacency import (
    AdjacencyGraph,
    delaunay_adjacency,
    is_connected,
    mst_adjacency,
    radius_adjacency,
)
from sbpcloud.errors import ConnectivityError, ParameterError
from sbpcloud.geometry import PointCloud


def cloud_from_points(pts):
    pts = np.asarray(pts, dtype=float)
    return PointCloud(
        interior=pts,
        boundary=np.empty((0, 2)),
        normals=np.empty((0, 2)),
        weights=np.empty(0),
        volume=1.0,
        diameter=float(np.ptp(pts)) or 1.0,
    )


def brute_force_radius_edges(pts, r):
    n = len(pts)
    out = set()
    for i in range(n):
        for j in range(i + 1, n):
            d = np.hypot(*(pts[i] - pts[j]))
            if 0.0 < d <= r:
                out.add((i, j))
    return out


def test_collinear_radius():
    graph = radius_adjacency(cloud_from_points([[0, 0], [1, 0], [2, 0]]), 1.5)
    assert set(map(tuple, graph.edges)) == {(0, 1), (1, 2)}


def test_radius_too_small_disconnects():
    with pytest.raises(ConnectivityError) as err:
        radius_adjacency(cloud_from_points([[0, 0], [1, 0], [2, 0]]), 0.5)
    assert err.value.orphan is not None


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_radius_matches_brute_force(data):
    n = data.draw(st.integers(2, 120))
    seed = data.draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, (n, 2))
    r = data.draw(st.floats(0.05, 3.0))
    expected = brute_force_radius_edges(pts, r)
    try:
        graph = radius_adjacency(cloud_from_points(pts), r)
    except ConnectivityError:
        # brute-force union-find confirms the graph really is disconnected
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, j in expected:
            parent[find(i)] = find(j)
        assert len({find(i) for i in range(n)}) > 1
        return
    assert set(map(tuple, graph.edges)) == expected


def test_mst_collinear_path():
    graph = mst_adjacency(cloud_from_points([[0, 0], [1, 0], [2, 0]]))
    assert set(map(tuple, graph.edges)) == {(0, 1), (1, 2)}


def test_mst_square_plus_center_spokes():
    pts = [[1, 1], [1, -1], [-1, 1], [-1, -1], [0, 0]]
    graph = mst_adjacency(cloud_from_points(pts))
    # center is nearest to every corner (sqrt(2) < 2), so the tree is 4 spokes
    assert set(map(tuple, graph.edges)) == {(0, 4), (1, 4), (2, 4), (3, 4)}


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 200), st.integers(0, 2**31 - 1))
def test_mst_edge_count(n, seed):
    pts = np.random.default_rng(seed).uniform(-1, 1, (n, 2))
    graph = mst_adjacency(cloud_from_points(pts))
    assert graph.edge_count == n - 1
    assert is_connected(graph)


def test_delaunay_quad_has_five_edges():
    pts = [[0, 0], [1, 0], [1.1, 1], [-0.2, 0.9]]
    graph = delaunay_adjacency(cloud_from_points(pts), 1)
    assert graph.edge_count == 5


def test_delaunay2_superset_of_delaunay1(small_disk_cloud):
    g1 = delaunay_adjacency(small_disk_cloud, 1)
    g2 = delaunay_adjacency(small_disk_cloud, 2)
    e1 = set(map(tuple, g1.edges))
    e2 = set(map(tuple, g2.edges))
    assert e1 <= e2
    assert len(e2) > len(e1)


def test_delaunay_invalid_degree(small_disk_cloud):
    with pytest.raises(ParameterError):
        delaunay_adjacency(small_disk_cloud, 3)


def _segment_hole_distance(p, q, c):
    pq = q - p
    t = np.clip(np.dot(c - p, pq) / np.dot(pq, pq), 0.0, 1.0)
    return np.hypot(*(p + t * pq - c))


@pytest.mark.parametrize("degree", [1, 2])
def test_punctured_delaunay_avoids_holes(degree, small_punctured_cloud):
    spec = presets.punctured_spec()
    graph = delaunay_adjacency(small_punctured_cloud, degree, spec)
    pts = small_punctured_cloud.points
    for hole in spec.holes:
        c = np.array([hole.cx, hole.cy])
        for i, j in graph.edges:
            d = _segment_hole_distance(pts[i], pts[j], c)
            assert d >= hole.radius * (1.0 - 1e-12)


def test_symmetry_and_no_self_loops(small_disk_cloud):
    for build in (
        lambda: radius_adjacency(small_disk_cloud, presets.neighbor_radius(25)),
        lambda: mst_adjacency(small_disk_cloud),
        lambda: delaunay_adjacency(small_disk_cloud, 1),
        lambda: delaunay_adjacency(small_disk_cloud, 2),
    ):
        graph = build()
        assert (graph.edges[:, 0] < graph.edges[:, 1]).all()
        mat = graph.matrix()
        assert (mat != mat.T).nnz == 0
        assert mat.diagonal().sum() == 0


def test_is_connected_examples():
    path = AdjacencyGraph(3, np.array([[0, 1], [1, 2]]), "manual")
    assert is_connected(path)
    disjoint = AdjacencyGraph(4, np.array([[0, 1], [2, 3]]), "manual")
    assert not is_connected(disjoint)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 60), st.integers(0, 2**31 - 1))
def test_is_connected_matches_networkx(n, seed):
    import networkx as nx

    rng = np.random.default_rng(seed)
    m = rng.integers(0, max(1, n * (n - 1) // 4))
    edges = set()
    for _ in range(m):
        i, j = rng.integers(0, n, 2)
        if i != j:
            edges.add((min(i, j), max(i, j)))
    graph = AdjacencyGraph(n, np.array(sorted(edges)).reshape(-1, 2), "manual")
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    assert is_connected(graph) == nx.is_connected(g)


def test_graph_export(tmp_path, small_disk_cloud):
    from sbpcloud.adjacency import save_graph
    import json

    graph = radius_adjacency(small_disk_cloud, presets.neighbor_radius(25))
    save_graph(graph, tmp_path / "edges.txt", tmp_path / "graph.json")
    lines = (tmp_path / "edges.txt").read_text().strip().splitlines()
    assert len(lines) == graph.edge_count
    header = json.loads((tmp_path / "graph.json").read_text())
    assert header["N"] == small_disk_cloud.n
    assert header["method"] == "euclidean_radius"
