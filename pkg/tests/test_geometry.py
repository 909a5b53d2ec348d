import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbpcloud import presets
from sbpcloud.errors import ParameterError
from sbpcloud.geometry import (
    DomainSpec,
    Hole,
    PointCloud,
    build_disk_cloud,
    build_punctured_disk_cloud,
    load_cloud_csv,
    save_cloud_csv,
)


def test_tiny_disk_symmetry():
    # 3x3 background grid on the unit disk: only the center survives
    cloud = build_disk_cloud(3, 3, 4, 1.0)
    assert cloud.n_interior == 1
    np.testing.assert_allclose(cloud.interior[0], [0.0, 0.0])
    assert cloud.n_boundary == 4
    np.testing.assert_allclose(
        cloud.boundary, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15
    )
    np.testing.assert_allclose(cloud.normals, cloud.boundary, atol=1e-15)


def test_figure_layout_weights():
    cloud = build_disk_cloud(25, 25, 75, 3.0)
    np.testing.assert_allclose(cloud.weights, 6 * math.pi / 75)
    assert cloud.volume == pytest.approx(9 * math.pi)
    assert cloud.diameter == 6.0


def test_grid5_reference_count():
    # the 1200/4000 disk grid has exactly 1132984 nodes
    cloud = build_disk_cloud(1200, 1200, 4000, 3.0)
    assert cloud.n == 1132984


def test_grid1_count_shared_by_experiments():
    # frozen from direct enumeration of the strict-interior predicate
    cloud = presets.build_cloud("disk", 1)
    xs = np.linspace(-3.0, 3.0, 75)
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    expected = int((gx**2 + gy**2 < 9.0).sum())
    assert cloud.n_interior == expected
    assert cloud.n == expected + 250


def test_normal_closure_residual_disk():
    cloud = build_disk_cloud(40, 40, 111, 2.0)
    per = cloud.boundary_perimeter()
    assert abs((cloud.weights * cloud.normals[:, 0]).sum()) <= 1e-10 * per
    assert abs((cloud.weights * cloud.normals[:, 1]).sum()) <= 1e-10 * per


def test_punctured_layout():
    spec = presets.punctured_spec()
    cloud = build_punctured_disk_cloud(25, 25, 75, 30, spec)
    assert cloud.n_boundary == 75 + 3 * 30
    # hole 3 is centered at (1.5, 0); its first node sits at angle 0 with
    # the normal pointing back toward the hole center
    hole = spec.holes[2]
    assert hole.cx == pytest.approx(1.5)
    assert hole.cy == pytest.approx(0.0, abs=1e-15)
    idx = 75 + 2 * 30
    np.testing.assert_allclose(cloud.boundary[idx], [1.5 + hole.radius, 0.0], atol=1e-14)
    np.testing.assert_allclose(cloud.normals[idx], [-1.0, 0.0], atol=1e-14)
    # every interior point is outside every hole and inside the disk
    assert spec.contains(cloud.interior[:, 0], cloud.interior[:, 1]).all()
    assert cloud.volume == pytest.approx(9 * math.pi - 3 * math.pi * (2.0 / 3.0) ** 2)


def test_punctured_normal_closure():
    cloud = build_punctured_disk_cloud(25, 25, 75, 30, presets.punctured_spec())
    per = cloud.boundary_perimeter()
    assert abs((cloud.weights * cloud.normals[:, 0]).sum()) <= 1e-10 * per
    assert abs((cloud.weights * cloud.normals[:, 1]).sum()) <= 1e-10 * per


@settings(max_examples=25, deadline=None)
@given(
    n_xy=st.integers(5, 60),
    n_b=st.integers(3, 200),
    radius=st.floats(0.1, 50.0, allow_nan=False),
)
def test_disk_cloud_properties(n_xy, n_b, radius):
    cloud = build_disk_cloud(n_xy, n_xy, n_b, radius)
    assert (cloud.interior[:, 0] ** 2 + cloud.interior[:, 1] ** 2 < radius**2).all()
    np.testing.assert_allclose(np.hypot(cloud.normals[:, 0], cloud.normals[:, 1]), 1.0, atol=1e-12)
    assert (cloud.weights > 0).all()
    br = np.hypot(cloud.boundary[:, 0], cloud.boundary[:, 1])
    np.testing.assert_allclose(br, radius, atol=1e-12 * radius)
    assert abs((cloud.weights * cloud.normals[:, 0]).sum()) <= 1e-10 * cloud.boundary_perimeter()


def test_determinism():
    a = build_disk_cloud(33, 33, 97, 1.7)
    b = build_disk_cloud(33, 33, 97, 1.7)
    assert np.array_equal(a.interior, b.interior)
    assert np.array_equal(a.boundary, b.boundary)
    assert np.array_equal(a.weights, b.weights)


def test_monotone_refinement():
    n1 = build_disk_cloud(75, 75, 250, 3.0).n
    n2 = build_disk_cloud(150, 150, 500, 3.0).n
    assert n2 >= 3 * n1


def test_parameter_errors():
    with pytest.raises(ParameterError):
        build_disk_cloud(1, 25, 75, 3.0)
    with pytest.raises(ParameterError):
        build_disk_cloud(25, 25, 2, 3.0)
    with pytest.raises(ParameterError):
        build_disk_cloud(25, 25, 75, -1.0)
    with pytest.raises(ParameterError):
        DomainSpec(3.0, (Hole(2.5, 0.0, 1.0),))  # touches the outer boundary
    with pytest.raises(ParameterError):
        DomainSpec(3.0, (Hole(0.0, 0.0, 0.5), Hole(0.5, 0.0, 0.5)))  # overlap
    with pytest.raises(ParameterError):
        build_punctured_disk_cloud(25, 25, 75, 2, presets.punctured_spec())


def test_cloud_csv_roundtrip(tmp_path):
    cloud = build_disk_cloud(9, 9, 12, 2.0)
    path = tmp_path / "cloud.csv"
    save_cloud_csv(cloud, path)
    back = load_cloud_csv(path, volume=cloud.volume, diameter=cloud.diameter)
    assert np.array_equal(back.interior, cloud.interior)
    assert np.array_equal(back.boundary, cloud.boundary)
    assert np.array_equal(back.normals, cloud.normals)
    assert np.array_equal(back.weights, cloud.weights)
    assert back.volume == cloud.volume


def test_cloud_arrays_read_only(small_disk_cloud: PointCloud):
    with pytest.raises(ValueError):
        small_disk_cloud.interior[0, 0] = 99.0
