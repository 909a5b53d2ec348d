"""Named grids, domains, and cached operator pipelines for the experiments.

Grid presets follow the refinement ladder used throughout the accuracy and
PDE studies: the background grid doubles in each direction from one grid to
the next, boundary node counts double alongside.
"""

from __future__ import annotations

import math
from functools import lru_cache

from . import norm
from .adjacency import delaunay_adjacency, mst_adjacency, radius_adjacency
from .errors import ParameterError
from .geometry import DomainSpec, Hole, PointCloud, build_disk_cloud, build_punctured_disk_cloud
from .sbp_core import SbpOperatorSet, assemble_sbp

DISK_RADIUS = 3.0
RADIUS_FACTOR = 2.5

# grid label -> (n_x = n_y, n_b); punctured grids add n_i per hole
DISK_GRIDS = {1: (75, 250), 2: (150, 500), 3: (300, 1000), 4: (600, 2000), 5: (1200, 4000)}
PUNCTURED_GRIDS = {
    1: (75, 250, 60),
    2: (150, 500, 120),
    3: (300, 1000, 240),
    4: (600, 2000, 480),
    5: (1200, 4000, 960),
}


def neighbor_radius(n_x: int, diameter: float = 2 * DISK_RADIUS) -> float:
    """Distance threshold for radius adjacency: 2.5 * diameter / n_x."""
    return RADIUS_FACTOR * diameter / n_x


def punctured_spec(radius: float = DISK_RADIUS) -> DomainSpec:
    """Disk with three holes of radius 2/3 centered 1.5 from the origin."""
    holes = tuple(
        Hole(1.5 * math.cos(2 * math.pi * i / 3), 1.5 * math.sin(2 * math.pi * i / 3), 2.0 / 3.0)
        for i in (1, 2, 3)
    )
    return DomainSpec(outer_radius=radius, holes=holes)


@lru_cache(maxsize=None)
def build_cloud(domain: str, grid: int) -> PointCloud:
    if domain == "disk":
        n_xy, n_b = DISK_GRIDS[grid]
        return build_disk_cloud(n_xy, n_xy, n_b, DISK_RADIUS)
    if domain == "punctured":
        n_xy, n_b, n_i = PUNCTURED_GRIDS[grid]
        return build_punctured_disk_cloud(n_xy, n_xy, n_b, n_i, punctured_spec())
    raise ParameterError(f"unknown domain {domain!r}")


def build_graph(cloud: PointCloud, method: str, domain: str, grid: int):
    n_xy = (DISK_GRIDS if domain == "disk" else PUNCTURED_GRIDS)[grid][0]
    if method == "radius":
        return radius_adjacency(cloud, neighbor_radius(n_xy))
    if method == "mst":
        return mst_adjacency(cloud)
    if method in ("delaunay1", "delaunay2"):
        spec = punctured_spec() if domain == "punctured" else None
        return delaunay_adjacency(cloud, int(method[-1]), spec)
    raise ParameterError(f"unknown adjacency method {method!r}")


@lru_cache(maxsize=32)
def _bare_operators(domain: str, grid: int, method: str) -> SbpOperatorSet:
    cloud = build_cloud(domain, grid)
    graph = build_graph(cloud, method, domain, grid)
    return assemble_sbp(cloud, graph)


@lru_cache(maxsize=64)
def build_operators(
    domain: str, grid: int, method: str = "radius", norm_kind: str = "optimized"
) -> SbpOperatorSet:
    """Cloud -> adjacency -> SBP set -> norm, cached on all arguments.

    The expensive norm-free assembly is shared between norm kinds.
    """
    return norm.attach_norm(_bare_operators(domain, grid, method), norm_kind)


def clear_caches() -> None:
    build_cloud.cache_clear()
    _bare_operators.cache_clear()
    build_operators.cache_clear()
