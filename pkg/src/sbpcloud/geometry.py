"""Point clouds on circular domains, with boundary normals and quadrature weights.

Two domain families are supported: a disk of radius R, and the same disk with
circular holes cut out of the interior. Interior nodes come from a uniform
background grid restricted to the (open) domain; boundary nodes are equispaced
on each circle. Every boundary node carries a unit outward normal and an
arc-length quadrature weight, so that sums of ``w * n_x`` approximate the
boundary integral of ``n_x`` (which vanishes on closed curves).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class Hole:
    """Circular exclusion of the given radius around (cx, cy)."""

    cx: float
    cy: float
    radius: float


@dataclass(frozen=True)
class DomainSpec:
    """Disk of ``outer_radius`` minus the interiors of ``holes``."""

    outer_radius: float
    holes: tuple[Hole, ...] = ()

    def __post_init__(self):
        if self.outer_radius <= 0:
            raise ParameterError(f"outer_radius must be positive, got {self.outer_radius}")
        for h in self.holes:
            if h.radius <= 0:
                raise ParameterError(f"hole radius must be positive, got {h.radius}")
            if math.hypot(h.cx, h.cy) + h.radius >= self.outer_radius:
                raise ParameterError(
                    f"hole at ({h.cx}, {h.cy}) touches or crosses the outer boundary"
                )
        for i, a in enumerate(self.holes):
            for b in self.holes[i + 1 :]:
                if math.hypot(a.cx - b.cx, a.cy - b.cy) <= a.radius + b.radius:
                    raise ParameterError("holes must be pairwise disjoint")

    @property
    def volume(self) -> float:
        return math.pi * self.outer_radius**2 - sum(math.pi * h.radius**2 for h in self.holes)

    @property
    def diameter(self) -> float:
        return 2.0 * self.outer_radius

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Strict interior predicate, vectorized over coordinates."""
        inside = x * x + y * y < self.outer_radius**2
        for h in self.holes:
            inside &= (x - h.cx) ** 2 + (y - h.cy) ** 2 > h.radius**2
        return inside


@dataclass(frozen=True)
class PointCloud:
    """Interior and boundary nodes of a domain.

    Nodes are indexed with all interior points first, then all boundary
    points, so global node ``i`` is a boundary node iff ``i >= n_interior``.
    Arrays are read-only; clouds are safe to share between threads.
    """

    interior: np.ndarray  # (n_interior, 2)
    boundary: np.ndarray  # (n_boundary, 2)
    normals: np.ndarray  # (n_boundary, 2), unit outward
    weights: np.ndarray  # (n_boundary,), arc length per node
    volume: float
    diameter: float

    def __post_init__(self):
        for arr in (self.interior, self.boundary, self.normals, self.weights):
            arr.setflags(write=False)

    @property
    def n_interior(self) -> int:
        return self.interior.shape[0]

    @property
    def n_boundary(self) -> int:
        return self.boundary.shape[0]

    @property
    def n(self) -> int:
        return self.n_interior + self.n_boundary

    @property
    def points(self) -> np.ndarray:
        """All node coordinates, interior block first, shape (n, 2)."""
        return np.vstack([self.interior, self.boundary])

    @property
    def boundary_indices(self) -> np.ndarray:
        return np.arange(self.n_interior, self.n)

    def boundary_perimeter(self) -> float:
        return float(self.weights.sum())


def _background_grid(n_x: int, n_y: int, radius: float) -> np.ndarray:
    # n_x (resp. n_y) evenly spaced coordinates from -R to R inclusive.
    # This convention reproduces the reference node counts (e.g. the
    # 1200x1200/4000 disk grid has exactly 1132984 nodes).
    xs = np.linspace(-radius, radius, n_x)
    ys = np.linspace(-radius, radius, n_y)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def _circle_nodes(cx: float, cy: float, radius: float, count: int) -> tuple[np.ndarray, np.ndarray]:
    """``count`` equispaced nodes starting at angle 0, counter-clockwise."""
    theta = 2.0 * np.pi * np.arange(count) / count
    unit = np.column_stack([np.cos(theta), np.sin(theta)])
    return np.column_stack([cx + radius * unit[:, 0], cy + radius * unit[:, 1]]), unit


def _check_counts(n_x: int, n_y: int, n_b: int, radius: float) -> None:
    if n_x < 2 or n_y < 2:
        raise ParameterError(f"need n_x, n_y >= 2, got ({n_x}, {n_y})")
    if n_b < 3:
        raise ParameterError(f"need n_b >= 3, got {n_b}")
    if radius <= 0:
        raise ParameterError(f"radius must be positive, got {radius}")


def build_disk_cloud(n_x: int, n_y: int, n_b: int, radius: float) -> PointCloud:
    """Point cloud on the disk of the given radius.

    Interior nodes are background-grid points strictly inside the disk;
    boundary nodes are ``n_b`` equispaced points on the circle with outward
    normal ``position / radius`` and weight ``2*pi*radius / n_b``.
    """
    _check_counts(n_x, n_y, n_b, radius)
    grid = _background_grid(n_x, n_y, radius)
    inside = grid[:, 0] ** 2 + grid[:, 1] ** 2 < radius**2
    bpts, unit = _circle_nodes(0.0, 0.0, radius, n_b)
    weights = np.full(n_b, 2.0 * np.pi * radius / n_b)
    return PointCloud(
        interior=grid[inside],
        boundary=bpts,
        normals=unit,
        weights=weights,
        volume=math.pi * radius**2,
        diameter=2.0 * radius,
    )


def build_punctured_disk_cloud(
    n_x: int, n_y: int, n_b: int, n_i: int, spec: DomainSpec
) -> PointCloud:
    """Point cloud on a disk with circular holes.

    Interior grid points inside any hole are dropped. Each hole contributes
    ``n_i`` equispaced boundary nodes whose normals point toward the hole
    center (outward of the domain), with weight ``circumference / n_i``.
    """
    _check_counts(n_x, n_y, n_b, spec.outer_radius)
    if not spec.holes:
        raise ParameterError("spec must have at least one hole; use build_disk_cloud otherwise")
    if n_i < 3:
        raise ParameterError(f"need n_i >= 3, got {n_i}")

    radius = spec.outer_radius
    grid = _background_grid(n_x, n_y, radius)
    interior = grid[spec.contains(grid[:, 0], grid[:, 1])]

    outer_pts, outer_unit = _circle_nodes(0.0, 0.0, radius, n_b)
    bpts = [outer_pts]
    normals = [outer_unit]
    weights = [np.full(n_b, 2.0 * np.pi * radius / n_b)]
    for hole in spec.holes:
        pts, unit = _circle_nodes(hole.cx, hole.cy, hole.radius, n_i)
        bpts.append(pts)
        normals.append(-unit)  # outward of the domain means into the hole
        weights.append(np.full(n_i, 2.0 * np.pi * hole.radius / n_i))

    return PointCloud(
        interior=interior,
        boundary=np.vstack(bpts),
        normals=np.vstack(normals),
        weights=np.concatenate(weights),
        volume=spec.volume,
        diameter=spec.diameter,
    )


def save_cloud_csv(cloud: PointCloud, path) -> None:
    """Write the cloud as rows ``kind, x, y, n_x, n_y, w``.

    Interior rows carry zero normals and weight.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "x", "y", "n_x", "n_y", "w"])
        for x, y in cloud.interior:
            writer.writerow(["interior", repr(float(x)), repr(float(y)), "0", "0", "0"])
        for (x, y), (nx, ny), w in zip(cloud.boundary, cloud.normals, cloud.weights):
            writer.writerow(["boundary", repr(float(x)), repr(float(y)), repr(float(nx)), repr(float(ny)), repr(float(w))])


def load_cloud_csv(path, volume: float | None = None, diameter: float | None = None) -> PointCloud:
    """Read a cloud written by :func:`save_cloud_csv`.

    Volume and diameter are not stored in the CSV; callers that need them
    (e.g. for uniform norm weights) must pass them explicitly, otherwise
    they are estimated from the bounding circle of the points.
    """
    interior, boundary, normals, weights = [], [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:3] != ["kind", "x", "y"]:
            raise ParameterError(f"unrecognized cloud CSV header: {header}")
        for row in reader:
            kind, x, y, nx, ny, w = row
            if kind == "interior":
                interior.append((float(x), float(y)))
            elif kind == "boundary":
                boundary.append((float(x), float(y)))
                normals.append((float(nx), float(ny)))
                weights.append(float(w))
            else:
                raise ParameterError(f"unrecognized node kind: {kind!r}")
    pts = np.array(interior + boundary)
    radius = float(np.max(np.hypot(pts[:, 0], pts[:, 1])))
    return PointCloud(
        interior=np.array(interior, dtype=float).reshape(-1, 2),
        boundary=np.array(boundary, dtype=float).reshape(-1, 2),
        normals=np.array(normals, dtype=float).reshape(-1, 2),
        weights=np.array(weights, dtype=float),
        volume=volume if volume is not None else math.pi * radius**2,
        diameter=diameter if diameter is not None else 2.0 * radius,
    )
