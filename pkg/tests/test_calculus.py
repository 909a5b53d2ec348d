import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbpcloud import calculus
from sbpcloud.calculus import (
    TEST_FUNCTIONS,
    apply_derivative,
    convergence_study,
    log2_rates,
    max_abs_in_region,
    weighted_l2_norm,
    write_study_csv,
)
from sbpcloud.errors import ParameterError
from sbpcloud.geometry import build_disk_cloud


def test_constants_differentiate_to_zero(small_disk_ops):
    ones = np.ones(small_disk_ops.cloud.n)
    for axis in "xy":
        assert np.abs(apply_derivative(small_disk_ops, axis, ones)).max() <= 1e-8


def test_weighted_l2_examples():
    assert weighted_l2_norm(np.ones(5), np.zeros(5)) == 0.0
    # constant field on the uniform-norm disk: sqrt(Vol)
    cloud = build_disk_cloud(13, 13, 20, 3.0)
    h = np.full(cloud.n, 9 * math.pi / cloud.n)
    assert weighted_l2_norm(h, np.ones(cloud.n)) == pytest.approx(math.sqrt(9 * math.pi))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 100), st.integers(0, 2**31 - 1))
def test_weighted_l2_matches_direct_sum(n, seed):
    rng = np.random.default_rng(seed)
    h = rng.uniform(0.01, 2.0, n)
    v = rng.normal(size=n)
    direct = math.sqrt(sum(h[i] * v[i] ** 2 for i in range(n)))
    assert weighted_l2_norm(h, v) == pytest.approx(direct, rel=1e-12)


def test_region_max(small_disk_cloud):
    values = np.zeros(small_disk_cloud.n)
    assert max_abs_in_region(small_disk_cloud, values, lambda x, y: x < 1e9) == 0.0
    values[3] = -2.5
    pts = small_disk_cloud.points
    only_node_3 = lambda x, y: (x == pts[3, 0]) & (y == pts[3, 1])
    assert max_abs_in_region(small_disk_cloud, values, only_node_3) == 2.5
    with pytest.raises(ParameterError):
        max_abs_in_region(small_disk_cloud, values, lambda x, y: x > 1e9)


def test_log2_rates():
    assert log2_rates([0.4, 0.2, 0.1]) == [None, pytest.approx(1.0), pytest.approx(1.0)]


def test_bump_derivatives_match_finite_differences():
    fn = TEST_FUNCTIONS["bump"]
    rng = np.random.default_rng(7)
    x = rng.uniform(-3, 3, 50)
    y = rng.uniform(-3, 3, 50)
    eps = 1e-6
    fd_x = (fn.f(x + eps, y) - fn.f(x - eps, y)) / (2 * eps)
    fd_y = (fn.f(x, y + eps) - fn.f(x, y - eps)) / (2 * eps)
    np.testing.assert_allclose(fn.dx(x, y), fd_x, atol=1e-7)
    np.testing.assert_allclose(fn.dy(x, y), fd_y, atol=1e-7)


def test_linear_function_derivatives():
    fn = TEST_FUNCTIONS["linear"]
    x = np.array([0.5, -2.0])
    y = np.array([1.0, 3.0])
    np.testing.assert_array_equal(fn.f(x, y), x)
    np.testing.assert_array_equal(fn.dx(x, y), [1.0, 1.0])
    np.testing.assert_array_equal(fn.dy(x, y), [0.0, 0.0])


def test_convergence_study_and_csv(tmp_path, small_disk_ops):
    build = lambda g: small_disk_ops  # same ops twice: rates are exactly 0
    rows = convergence_study([1, 2], build, TEST_FUNCTIONS["linear"], "x")
    assert rows[0].rate is None
    assert rows[1].rate == pytest.approx(0.0, abs=1e-12)
    path = tmp_path / "study.csv"
    write_study_csv(rows, path)
    header, *lines = path.read_text().strip().splitlines()
    assert header == "grid,N,error,rate"
    assert len(lines) == 2
    with pytest.raises(ParameterError):
        convergence_study([1], build, TEST_FUNCTIONS["linear"], "x")


def test_derivative_error_requires_norm(small_disk_cloud):
    from sbpcloud import presets
    from sbpcloud.adjacency import radius_adjacency
    from sbpcloud.sbp_core import assemble_sbp

    graph = radius_adjacency(small_disk_cloud, presets.neighbor_radius(25))
    bare = assemble_sbp(small_disk_cloud, graph)
    with pytest.raises(ValueError):
        apply_derivative(bare, "x", np.ones(small_disk_cloud.n))
