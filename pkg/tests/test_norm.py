import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbpcloud import norm
from sbpcloud.geometry import build_disk_cloud


def test_closed_form_examples():
    # unconstrained average above the bound
    w = norm.optimize_weights(np.array([0.2]), np.array([0.4]), 10)
    assert w[0] == pytest.approx(0.3)
    # bound active
    w = norm.optimize_weights(np.array([-1.0]), np.array([-1.0]), 10)
    assert w[0] == pytest.approx(0.01)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 500), st.integers(0, 2**31 - 1))
def test_kkt_conditions(n, seed):
    rng = np.random.default_rng(seed)
    tx = rng.normal(scale=0.1, size=n)
    ty = rng.normal(scale=0.1, size=n)
    w = norm.optimize_weights(tx, ty, n)
    floor = norm.norm_weight_floor(n)
    avg = 0.5 * (tx + ty)
    at_floor = w == floor
    np.testing.assert_allclose(w[~at_floor], avg[~at_floor])
    assert (avg[at_floor] <= floor + 1e-15).all()
    assert (w >= floor).all()


def objective(tx, ty, w):
    return 0.5 * np.sum((tx - w) ** 2) + 0.5 * np.sum((ty - w) ** 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 50), st.integers(0, 2**31 - 1))
def test_local_optimality_against_perturbations(n, seed):
    rng = np.random.default_rng(seed)
    tx = rng.normal(scale=0.1, size=n)
    ty = rng.normal(scale=0.1, size=n)
    w = norm.optimize_weights(tx, ty, n)
    floor = norm.norm_weight_floor(n)
    base = objective(tx, ty, w)
    for i in rng.integers(0, n, size=min(n, 5)):
        for eps in (1e-4, -1e-4):
            trial = w.copy()
            trial[i] = max(trial[i] + eps, floor)
            assert objective(tx, ty, trial) >= base - 1e-15


def projected_gradient(tx, ty, n, iters=20000, tol=1e-12):
    """Independent QP oracle: projected gradient descent on the same problem."""
    floor = norm.norm_weight_floor(n)
    w = np.maximum(np.zeros_like(tx) + floor, floor)
    step = 0.25  # objective Hessian is 2I, any step < 1/2 converges
    for _ in range(iters):
        grad = 2.0 * w - tx - ty
        new = np.maximum(w - step * grad, floor)
        if np.abs(new - w).max() < tol:
            w = new
            break
        w = new
    return w


def test_matches_projected_gradient_oracle(small_disk_ops):
    pts = small_disk_ops.cloud.points
    tx = small_disk_ops.qx @ pts[:, 0]
    ty = small_disk_ops.qy @ pts[:, 1]
    n = small_disk_ops.cloud.n
    w_closed = norm.optimize_weights(tx, ty, n)
    w_pg = projected_gradient(tx, ty, n)
    np.testing.assert_allclose(w_closed, w_pg, atol=1e-8)


def test_uniform_weights():
    cloud = build_disk_cloud(13, 13, 20, 3.0)
    w = norm.uniform_norm_weights(cloud)
    assert w.shape == (cloud.n,)
    np.testing.assert_allclose(w, 9 * math.pi / cloud.n)
    assert w.sum() == pytest.approx(9 * math.pi)


def test_uniform_weights_hole_corrected():
    from sbpcloud import presets
    from sbpcloud.geometry import build_punctured_disk_cloud

    cloud = build_punctured_disk_cloud(25, 25, 75, 30, presets.punctured_spec())
    w = norm.uniform_norm_weights(cloud)
    assert w.sum() == pytest.approx(cloud.volume)
    assert cloud.volume < 9 * math.pi


def test_attach_norm_requires_positive(small_disk_ops):
    with pytest.raises(ValueError):
        small_disk_ops.with_norm(np.zeros(small_disk_ops.cloud.n))


def test_norm_choice_dispatch(small_disk_ops):
    w_opt = norm.NormChoice("optimized").weights(small_disk_ops)
    w_unif = norm.NormChoice("uniform").weights(small_disk_ops)
    assert w_opt.shape == w_unif.shape
    with pytest.raises(ValueError):
        norm.NormChoice("bogus").weights(small_disk_ops)
