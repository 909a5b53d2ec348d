"""Diagonal norm matrices completing D = H^{-1} Q.

Two choices: a per-node optimized norm that makes D differentiate the
coordinate functions as accurately as possible, and a uniform norm that
spreads the domain volume evenly over the nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import PointCloud
from .sbp_core import SbpOperatorSet


@dataclass(frozen=True)
class NormChoice:
    """Which norm completes the operator set; ``floor`` bounds the weights."""

    kind: str = "optimized"  # "optimized" | "uniform"

    def weights(self, ops: SbpOperatorSet) -> np.ndarray:
        if self.kind == "optimized":
            return optimized_norm_weights(ops)
        if self.kind == "uniform":
            return uniform_norm_weights(ops.cloud)
        raise ValueError(f"unknown norm kind {self.kind!r}")


def norm_weight_floor(n: int) -> float:
    """Lower bound enforced on optimized weights (dimensionless, 1/N^2)."""
    return 1.0 / n**2


def optimize_weights(target_x: np.ndarray, target_y: np.ndarray, n: int) -> np.ndarray:
    """Exact minimizer of ||t_x - w||^2/2 + ||t_y - w||^2/2 over w >= 1/n^2.

    The objective is separable per component, so the bound-constrained QP
    has the closed-form solution ``w_i = max((t_x,i + t_y,i)/2, 1/n^2)``;
    no iterative conic solver is needed.
    """
    return np.maximum(0.5 * (np.asarray(target_x) + np.asarray(target_y)), norm_weight_floor(n))


def optimized_norm_weights(ops: SbpOperatorSet) -> np.ndarray:
    """Norm diagonal that best matches Q_x x and Q_y y (accuracy on linears)."""
    pts = ops.cloud.points
    return optimize_weights(ops.qx @ pts[:, 0], ops.qy @ pts[:, 1], ops.cloud.n)


def uniform_norm_weights(cloud: PointCloud) -> np.ndarray:
    """All weights Vol(domain)/N, so that 1^T H 1 equals the domain volume."""
    return np.full(cloud.n, cloud.volume / cloud.n)


def attach_norm(ops: SbpOperatorSet, kind: str = "optimized") -> SbpOperatorSet:
    """Return a copy of the operator set with the requested norm attached."""
    return ops.with_norm(NormChoice(kind).weights(ops))
