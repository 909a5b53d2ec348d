"""Conservation-law systems, numerical fluxes, and boundary-state maps.

States are numpy arrays whose last axis holds the conserved components
(1 for scalar advection, 4 for compressible Euler), so every routine here
vectorizes over an arbitrary batch of node pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ParameterError, StateError


@dataclass(frozen=True)
class Advection:
    """Scalar advection u_t + a u_x + b u_y = 0."""

    a: float = 1.0
    b: float = 0.5
    n_components: int = 1

    def flux_x(self, u: np.ndarray) -> np.ndarray:
        return self.a * u

    def flux_y(self, u: np.ndarray) -> np.ndarray:
        return self.b * u

    def wavespeed_bound(self, u_l, u_r, n) -> np.ndarray:
        """|velocity . n|, independent of the states."""
        lam = np.abs(self.a * n[..., 0] + self.b * n[..., 1])
        return np.broadcast_to(lam, u_l.shape[:-1]).copy()

    def max_nodal_speed(self, u: np.ndarray) -> float:
        return float(np.hypot(self.a, self.b))

    def admissible(self, u: np.ndarray) -> np.ndarray:
        return np.ones(u.shape[:-1], dtype=bool)

    def check_admissible(self, u: np.ndarray, context: str = "") -> None:
        return None


@dataclass(frozen=True)
class Euler:
    """2D compressible Euler equations with ideal-gas pressure closure.

    Conserved variables (rho, rho v1, rho v2, rho e), where e is the
    specific total energy; p = (gamma-1)(rho e - rho |v|^2 / 2).
    """

    gamma: float = 1.4
    n_components: int = 4

    def pressure(self, u: np.ndarray) -> np.ndarray:
        rho = u[..., 0]
        kinetic = 0.5 * (u[..., 1] ** 2 + u[..., 2] ** 2) / rho
        return (self.gamma - 1.0) * (u[..., 3] - kinetic)

    def sound_speed(self, u: np.ndarray) -> np.ndarray:
        return np.sqrt(self.gamma * self.pressure(u) / u[..., 0])

    def primitive(self, u: np.ndarray):
        rho = u[..., 0]
        return rho, u[..., 1] / rho, u[..., 2] / rho, self.pressure(u)

    def conserved(self, rho, v1, v2, p) -> np.ndarray:
        rho_e = p / (self.gamma - 1.0) + 0.5 * rho * (v1**2 + v2**2)
        return np.stack(np.broadcast_arrays(rho, rho * v1, rho * v2, rho_e), axis=-1)

    def flux_x(self, u: np.ndarray) -> np.ndarray:
        rho, v1, v2, p = self.primitive(u)
        return np.stack([u[..., 1], u[..., 1] * v1 + p, u[..., 2] * v1, (u[..., 3] + p) * v1], axis=-1)

    def flux_y(self, u: np.ndarray) -> np.ndarray:
        rho, v1, v2, p = self.primitive(u)
        return np.stack([u[..., 2], u[..., 1] * v2, u[..., 2] * v2 + p, (u[..., 3] + p) * v2], axis=-1)

    def wavespeed_bound(self, u_l, u_r, n) -> np.ndarray:
        """Davis estimate: max(|v_L.n| + c_L, |v_R.n| + c_R)."""
        vn_l = (u_l[..., 1] * n[..., 0] + u_l[..., 2] * n[..., 1]) / u_l[..., 0]
        vn_r = (u_r[..., 1] * n[..., 0] + u_r[..., 2] * n[..., 1]) / u_r[..., 0]
        return np.maximum(
            np.abs(vn_l) + self.sound_speed(u_l), np.abs(vn_r) + self.sound_speed(u_r)
        )

    def max_nodal_speed(self, u: np.ndarray) -> float:
        speed = np.hypot(u[..., 1], u[..., 2]) / u[..., 0]
        return float(np.max(speed + self.sound_speed(u)))

    def admissible(self, u: np.ndarray) -> np.ndarray:
        internal = u[..., 3] - 0.5 * (u[..., 1] ** 2 + u[..., 2] ** 2) / u[..., 0]
        return (u[..., 0] > 0.0) & (internal > 0.0)

    def check_admissible(self, u: np.ndarray, context: str = "") -> None:
        ok = self.admissible(u)
        if not ok.all():
            node = int(np.flatnonzero(~ok.ravel())[0])
            bad = u.reshape(-1, self.n_components)[node]
            raise StateError(
                f"inadmissible state{' ' + context if context else ''} at node {node}: "
                f"rho={bad[0]:.6g}, rho_e={bad[3]:.6g}",
                node=node,
            )


# ---------------------------------------------------------------------------
# Numerical fluxes. Signature f(eq, u_l, u_r, n) with ||n|| = 1; all return
# the flux of the normal projection F(u) . n and are conservative:
# f(u_l, u_r, n) = -f(u_r, u_l, -n).


def normal_flux(eq, u: np.ndarray, n: np.ndarray) -> np.ndarray:
    return eq.flux_x(u) * n[..., :1] + eq.flux_y(u) * n[..., 1:2]


def central_flux(eq, u_l, u_r, n, lam=None) -> np.ndarray:
    return 0.5 * (normal_flux(eq, u_l, n) + normal_flux(eq, u_r, n))


def llf_flux(eq, u_l, u_r, n, lam=None) -> np.ndarray:
    """Local Lax-Friedrichs: central average minus lambda/2 times the jump.

    ``lam`` overrides the per-pair wavespeed estimate (used for the
    global-lambda mode of the invariant-domain experiment).
    """
    eq.check_admissible(u_l, "(left flux argument)")
    eq.check_admissible(u_r, "(right flux argument)")
    if lam is None:
        lam = eq.wavespeed_bound(u_l, u_r, n)
    return central_flux(eq, u_l, u_r, n) - 0.5 * np.asarray(lam)[..., None] * (u_r - u_l)


def hllc_flux(eq: Euler, u_l, u_r, n, lam=None) -> np.ndarray:
    """Three-wave HLLC flux for the Euler equations.

    Outer wavespeeds are Davis-type bounds S_L = min(vn_L - c_L, vn_R - c_R),
    S_R = max(vn_L + c_L, vn_R + c_R); the contact speed comes from the
    standard single-star pressure relation. Velocities are handled through
    their normal projection, so the flux is rotationally invariant.
    """
    if not isinstance(eq, Euler):
        raise ParameterError("the HLLC flux is defined for the Euler equations only")
    eq.check_admissible(u_l, "(left flux argument)")
    eq.check_admissible(u_r, "(right flux argument)")
    rho_l, v1_l, v2_l, p_l = eq.primitive(u_l)
    rho_r, v1_r, v2_r, p_r = eq.primitive(u_r)
    nx, ny = n[..., 0], n[..., 1]
    vn_l = v1_l * nx + v2_l * ny
    vn_r = v1_r * nx + v2_r * ny
    c_l = np.sqrt(eq.gamma * p_l / rho_l)
    c_r = np.sqrt(eq.gamma * p_r / rho_r)

    s_l = np.minimum(vn_l - c_l, vn_r - c_r)
    s_r = np.maximum(vn_l + c_l, vn_r + c_r)
    num = p_r - p_l + rho_l * vn_l * (s_l - vn_l) - rho_r * vn_r * (s_r - vn_r)
    den = rho_l * (s_l - vn_l) - rho_r * (s_r - vn_r)
    s_star = num / den

    def star_state(u, rho, vn, p, s):
        factor = rho * (s - vn) / (s - s_star)
        v_star1 = u[..., 1] / rho + (s_star - vn) * nx
        v_star2 = u[..., 2] / rho + (s_star - vn) * ny
        e_star = u[..., 3] / rho + (s_star - vn) * (s_star + p / (rho * (s - vn)))
        return factor[..., None] * np.stack(
            [np.ones_like(rho), v_star1, v_star2, e_star], axis=-1
        )

    f_l = normal_flux(eq, u_l, n)
    f_r = normal_flux(eq, u_r, n)
    f_star_l = f_l + s_l[..., None] * (star_state(u_l, rho_l, vn_l, p_l, s_l) - u_l)
    f_star_r = f_r + s_r[..., None] * (star_state(u_r, rho_r, vn_r, p_r, s_r) - u_r)

    out = np.where(
        (s_l >= 0.0)[..., None],
        f_l,
        np.where((s_star >= 0.0)[..., None], f_star_l, np.where((s_r >= 0.0)[..., None], f_star_r, f_r)),
    )
    return out


NUMERICAL_FLUXES = {"central": central_flux, "llf": llf_flux, "hllc": hllc_flux}


# ---------------------------------------------------------------------------
# Boundary conditions


@dataclass(frozen=True)
class BoundaryCondition:
    """How ghost/boundary states are produced for the weak boundary term.

    kinds:
      * ``dirichlet_exact`` - prescribed state at every boundary node;
      * ``inflow_dirichlet`` - prescribed state only where the advection
        velocity enters the domain ((a, b) . n < 0), interior value elsewhere;
      * ``slip_wall`` - mirror state with the normal velocity reversed.

    ``state_fn(x, y, t)`` returns the prescribed state array (nodes, n_comp)
    for the dirichlet kinds.
    """

    kind: str
    state_fn: Callable | None = None

    def __post_init__(self):
        if self.kind not in ("dirichlet_exact", "inflow_dirichlet", "slip_wall"):
            raise ParameterError(f"unknown boundary condition kind {self.kind!r}")
        if self.kind != "slip_wall" and self.state_fn is None:
            raise ParameterError(f"{self.kind} needs a prescribed state function")


def boundary_states(
    bc: BoundaryCondition, eq, u_boundary: np.ndarray, points: np.ndarray,
    normals: np.ndarray, t: float,
) -> np.ndarray:
    """Ghost states at the boundary nodes for the weak boundary term.

    ``u_boundary`` is the (n_boundary, n_comp) slice of the current state at
    the boundary nodes; points/normals are the matching cloud arrays.
    """
    if bc.kind == "slip_wall":
        if isinstance(eq, Advection):
            raise ParameterError("slip walls are not meaningful for scalar advection")
        vn = u_boundary[..., 1] * normals[..., 0] + u_boundary[..., 2] * normals[..., 1]
        mirrored = u_boundary.copy()
        mirrored[..., 1] -= 2.0 * vn * normals[..., 0]
        mirrored[..., 2] -= 2.0 * vn * normals[..., 1]
        return mirrored
    prescribed = np.asarray(bc.state_fn(points[:, 0], points[:, 1], t), dtype=float)
    if prescribed.ndim == 1:
        prescribed = prescribed[:, None]
    if bc.kind == "dirichlet_exact":
        return prescribed
    # inflow_dirichlet: prescribe only where the velocity enters the domain
    vel_n = eq.a * normals[:, 0] + eq.b * normals[:, 1]
    out = u_boundary.copy()
    inflow = vel_n < 0.0
    out[inflow] = prescribed[inflow]
    return out
