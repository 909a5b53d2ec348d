import numpy as np
import pytest

from sbpcloud import norm, presets
from sbpcloud.adjacency import radius_adjacency
from sbpcloud.geometry import build_disk_cloud
from sbpcloud.sbp_core import assemble_sbp


@pytest.fixture(scope="session")
def small_disk_cloud():
    """Desk-scale disk cloud (~450 nodes) used across the unit tests."""
    return build_disk_cloud(25, 25, 75, 3.0)


@pytest.fixture(scope="session")
def small_disk_ops(small_disk_cloud):
    graph = radius_adjacency(small_disk_cloud, presets.neighbor_radius(25))
    return norm.attach_norm(assemble_sbp(small_disk_cloud, graph), "optimized")


@pytest.fixture(scope="session")
def small_punctured_cloud():
    from sbpcloud.geometry import build_punctured_disk_cloud

    return build_punctured_disk_cloud(25, 25, 75, 30, presets.punctured_spec())


def random_admissible_states(rng, n, gamma=1.4):
    """Euler states with rho in [0.1, 3], |v| <= 2, p in [0.05, 5]."""
    rho = rng.uniform(0.1, 3.0, n)
    v1 = rng.uniform(-2.0, 2.0, n)
    v2 = rng.uniform(-2.0, 2.0, n)
    p = rng.uniform(0.05, 5.0, n)
    rho_e = p / (gamma - 1.0) + 0.5 * rho * (v1**2 + v2**2)
    return np.stack([rho, rho * v1, rho * v2, rho_e], axis=-1)


def random_unit_normals(rng, n):
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)
