"""Compiled edge-loop kernels for the semi-discrete right-hand side.

One fused pass per edge (flux evaluation + antisymmetric scatter) instead
of a chain of large numpy temporaries; this is the solver's hot loop. All
kernels accumulate ``du[i] += 2*w*f`` and ``du[j] -= 2*w*f`` for each
undirected edge and must match the generic numpy path bit-for-bit in
structure (the equivalence is pinned by a test). Falls back to None when
numba is unavailable; callers must check.
"""

from __future__ import annotations

try:
    import numba

    _njit = numba.njit(cache=True, fastmath=False)
except ImportError:  # pragma: no cover - numba is a soft dependency
    numba = None

    def _njit(fn):
        return None


import numpy as np


@_njit
def advection_llf_edges(edge_i, edge_j, norm, unit, u, a, b, du):
    for e in range(edge_i.shape[0]):
        i = edge_i[e]
        j = edge_j[e]
        nx = unit[e, 0]
        ny = unit[e, 1]
        an = a * nx + b * ny
        lam = abs(an)
        f = 0.5 * an * (u[i, 0] + u[j, 0]) - 0.5 * lam * (u[j, 0] - u[i, 0])
        w = 2.0 * norm[e] * f
        du[i, 0] += w
        du[j, 0] -= w


@_njit
def advection_central_edges(edge_i, edge_j, norm, unit, u, a, b, du):
    for e in range(edge_i.shape[0]):
        i = edge_i[e]
        j = edge_j[e]
        an = a * unit[e, 0] + b * unit[e, 1]
        f = 0.5 * an * (u[i, 0] + u[j, 0])
        w = 2.0 * norm[e] * f
        du[i, 0] += w
        du[j, 0] -= w


@_njit
def _euler_normal_flux(u, k, nx, ny, gamma, out):
    rho = u[k, 0]
    m1 = u[k, 1]
    m2 = u[k, 2]
    en = u[k, 3]
    v1 = m1 / rho
    v2 = m2 / rho
    p = (gamma - 1.0) * (en - 0.5 * (m1 * v1 + m2 * v2))
    vn = v1 * nx + v2 * ny
    out[0] = rho * vn
    out[1] = m1 * vn + p * nx
    out[2] = m2 * vn + p * ny
    out[3] = (en + p) * vn


@_njit
def euler_llf_edges(edge_i, edge_j, norm, unit, u, gamma, du):
    fl = np.empty(4)
    fr = np.empty(4)
    for e in range(edge_i.shape[0]):
        i = edge_i[e]
        j = edge_j[e]
        nx = unit[e, 0]
        ny = unit[e, 1]
        _euler_normal_flux(u, i, nx, ny, gamma, fl)
        _euler_normal_flux(u, j, nx, ny, gamma, fr)
        rho_l = u[i, 0]
        rho_r = u[j, 0]
        v1_l = u[i, 1] / rho_l
        v2_l = u[i, 2] / rho_l
        v1_r = u[j, 1] / rho_r
        v2_r = u[j, 2] / rho_r
        p_l = (gamma - 1.0) * (u[i, 3] - 0.5 * rho_l * (v1_l * v1_l + v2_l * v2_l))
        p_r = (gamma - 1.0) * (u[j, 3] - 0.5 * rho_r * (v1_r * v1_r + v2_r * v2_r))
        vn_l = v1_l * nx + v2_l * ny
        vn_r = v1_r * nx + v2_r * ny
        c_l = np.sqrt(gamma * p_l / rho_l)
        c_r = np.sqrt(gamma * p_r / rho_r)
        lam = max(abs(vn_l) + c_l, abs(vn_r) + c_r)
        w = 2.0 * norm[e]
        for c in range(4):
            f = 0.5 * (fl[c] + fr[c]) - 0.5 * lam * (u[j, c] - u[i, c])
            du[i, c] += w * f
            du[j, c] -= w * f


@_njit
def euler_central_edges(edge_i, edge_j, norm, unit, u, gamma, du):
    fl = np.empty(4)
    fr = np.empty(4)
    for e in range(edge_i.shape[0]):
        i = edge_i[e]
        j = edge_j[e]
        nx = unit[e, 0]
        ny = unit[e, 1]
        _euler_normal_flux(u, i, nx, ny, gamma, fl)
        _euler_normal_flux(u, j, nx, ny, gamma, fr)
        w = 2.0 * norm[e]
        for c in range(4):
            f = 0.5 * (fl[c] + fr[c])
            du[i, c] += w * f
            du[j, c] -= w * f


@_njit
def euler_hllc_edges(edge_i, edge_j, norm, unit, u, gamma, du):
    fl = np.empty(4)
    fr = np.empty(4)
    f = np.empty(4)
    star = np.empty(4)
    for e in range(edge_i.shape[0]):
        i = edge_i[e]
        j = edge_j[e]
        nx = unit[e, 0]
        ny = unit[e, 1]
        rho_l = u[i, 0]
        rho_r = u[j, 0]
        v1_l = u[i, 1] / rho_l
        v2_l = u[i, 2] / rho_l
        v1_r = u[j, 1] / rho_r
        v2_r = u[j, 2] / rho_r
        p_l = (gamma - 1.0) * (u[i, 3] - 0.5 * rho_l * (v1_l * v1_l + v2_l * v2_l))
        p_r = (gamma - 1.0) * (u[j, 3] - 0.5 * rho_r * (v1_r * v1_r + v2_r * v2_r))
        vn_l = v1_l * nx + v2_l * ny
        vn_r = v1_r * nx + v2_r * ny
        c_l = np.sqrt(gamma * p_l / rho_l)
        c_r = np.sqrt(gamma * p_r / rho_r)
        s_l = min(vn_l - c_l, vn_r - c_r)
        s_r = max(vn_l + c_l, vn_r + c_r)
        s_star = (p_r - p_l + rho_l * vn_l * (s_l - vn_l) - rho_r * vn_r * (s_r - vn_r)) / (
            rho_l * (s_l - vn_l) - rho_r * (s_r - vn_r)
        )
        if s_l >= 0.0:
            _euler_normal_flux(u, i, nx, ny, gamma, f)
        elif s_star >= 0.0:
            _euler_normal_flux(u, i, nx, ny, gamma, fl)
            factor = rho_l * (s_l - vn_l) / (s_l - s_star)
            star[0] = factor
            star[1] = factor * (v1_l + (s_star - vn_l) * nx)
            star[2] = factor * (v2_l + (s_star - vn_l) * ny)
            star[3] = factor * (
                u[i, 3] / rho_l + (s_star - vn_l) * (s_star + p_l / (rho_l * (s_l - vn_l)))
            )
            for c in range(4):
                f[c] = fl[c] + s_l * (star[c] - u[i, c])
        elif s_r >= 0.0:
            _euler_normal_flux(u, j, nx, ny, gamma, fr)
            factor = rho_r * (s_r - vn_r) / (s_r - s_star)
            star[0] = factor
            star[1] = factor * (v1_r + (s_star - vn_r) * nx)
            star[2] = factor * (v2_r + (s_star - vn_r) * ny)
            star[3] = factor * (
                u[j, 3] / rho_r + (s_star - vn_r) * (s_star + p_r / (rho_r * (s_r - vn_r)))
            )
            for c in range(4):
                f[c] = fr[c] + s_r * (star[c] - u[j, c])
        else:
            _euler_normal_flux(u, j, nx, ny, gamma, f)
        w = 2.0 * norm[e]
        for c in range(4):
            du[i, c] += w * f[c]
            du[j, c] -= w * f[c]


HAVE_NUMBA = numba is not None
