"""Applying the differentiation operators and measuring their accuracy."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ParameterError
from .geometry import PointCloud
from .sbp_core import SbpOperatorSet


def apply_derivative(ops: SbpOperatorSet, axis: str, values: np.ndarray) -> np.ndarray:
    """Nodal derivative approximation H^{-1} (Q u) along "x" or "y"."""
    if ops.h is None:
        raise ValueError("operator set has no norm attached; call attach_norm first")
    q = {"x": ops.qx, "y": ops.qy}[axis]
    return (q @ values) / ops.h


def weighted_l2_norm(weights: np.ndarray, values: np.ndarray) -> float:
    """Discrete L2 norm sqrt(v^T H v) for a diagonal norm matrix."""
    return math.sqrt(float(values @ (weights * values)))


def max_abs_in_region(
    cloud: PointCloud, values: np.ndarray, predicate: Callable[[np.ndarray, np.ndarray], np.ndarray]
) -> float:
    """Max |value| over nodes selected by a coordinate predicate."""
    pts = cloud.points
    mask = np.asarray(predicate(pts[:, 0], pts[:, 1]), dtype=bool)
    if not mask.any():
        raise ParameterError("region predicate selects no nodes")
    return float(np.max(np.abs(values[mask])))


# ---------------------------------------------------------------------------
# Built-in test functions for the accuracy studies. The second one is an
# oscillatory Gaussian bump whose partial derivatives decay like
# exp(-(x^2+y^2)), so they are nearly zero at the outer boundary of the
# radius-3 disk; differentiating it probes the interior stencils almost
# exclusively.


def linear_fn(x, y):
    return np.broadcast_to(np.asarray(x, dtype=float), np.broadcast_shapes(np.shape(x), np.shape(y))).copy()


def linear_fn_dx(x, y):
    return np.ones(np.broadcast_shapes(np.shape(x), np.shape(y)))


def linear_fn_dy(x, y):
    return np.zeros(np.broadcast_shapes(np.shape(x), np.shape(y)))


def bump_fn(x, y):
    return 4.0 * np.sin(x) * np.sin(y) * np.exp(-(x**2 + y**2))


def bump_fn_dx(x, y):
    # d/dx (exp(-x^2) sin x) = exp(-x^2) (cos x - 2x sin x)
    return 4.0 * np.sin(y) * np.exp(-(x**2 + y**2)) * (np.cos(x) - 2.0 * x * np.sin(x))


def bump_fn_dy(x, y):
    return 4.0 * np.sin(x) * np.exp(-(x**2 + y**2)) * (np.cos(y) - 2.0 * y * np.sin(y))


@dataclass(frozen=True)
class TestFunction:
    name: str
    f: Callable
    dx: Callable
    dy: Callable

    def derivative(self, axis: str) -> Callable:
        return {"x": self.dx, "y": self.dy}[axis]


TEST_FUNCTIONS = {
    "linear": TestFunction("linear", linear_fn, linear_fn_dx, linear_fn_dy),
    "bump": TestFunction("bump", bump_fn, bump_fn_dx, bump_fn_dy),
}


# ---------------------------------------------------------------------------
# Convergence studies


def log2_rates(errors: Sequence[float]) -> list[float | None]:
    """Pairwise rates log2(e_{i-1}/e_i); None for the first entry."""
    rates: list[float | None] = [None]
    for prev, cur in zip(errors, errors[1:]):
        rates.append(math.log2(prev / cur))
    return rates


@dataclass(frozen=True)
class StudyRow:
    grid: int
    n: int
    error: float
    rate: float | None


def derivative_error(ops: SbpOperatorSet, fn: TestFunction, axis: str) -> float:
    """Weighted L2 error of the discrete derivative of ``fn`` along ``axis``."""
    pts = ops.cloud.points
    approx = apply_derivative(ops, axis, fn.f(pts[:, 0], pts[:, 1]))
    exact = fn.derivative(axis)(pts[:, 0], pts[:, 1])
    return weighted_l2_norm(ops.h, approx - exact)


def convergence_study(
    grids: Sequence[int],
    builder: Callable[[int], SbpOperatorSet],
    fn: TestFunction,
    axis: str = "x",
) -> list[StudyRow]:
    """Errors and pairwise log2 rates of a derivative test across grids.

    ``builder`` maps a grid label to an operator set with norm attached.
    """
    if len(grids) < 2:
        raise ParameterError("a convergence study needs at least 2 grids")
    errors = []
    ns = []
    for g in grids:
        ops = builder(g)
        errors.append(derivative_error(ops, fn, axis))
        ns.append(ops.cloud.n)
    rates = log2_rates(errors)
    return [StudyRow(g, n, e, r) for g, n, e, r in zip(grids, ns, errors, rates)]


def write_study_csv(rows: Sequence[StudyRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["grid", "N", "error", "rate"])
        for row in rows:
            writer.writerow(
                [row.grid, row.n, f"{row.error:.6e}", "" if row.rate is None else f"{row.rate:.4f}"]
            )
