"""The benchmark problems: advection wave, Euler density waves, explosion."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ParameterError
from .physics import Advection, BoundaryCondition, Euler


@dataclass(frozen=True)
class Problem:
    """An equation with initial data and (optionally) an exact solution.

    ``exact(x, y, t)`` returns the state array (nodes, n_comp); ``None``
    when no closed-form solution exists (explosion).
    """

    name: str
    eq: object
    exact: Callable | None
    initial: Callable
    default_flux: str
    default_bc: str
    t_final: float


def _advection_exact(a: float, b: float):
    def exact(x, y, t):
        return (np.sin(np.pi / 6.0 * (x - t)) * np.sin(np.pi / 6.0 * (y - 0.5 * t)))[..., None]

    return exact


def make_advection(a: float = 1.0, b: float = 0.5, t_final: float = 0.7) -> Problem:
    eq = Advection(a, b)
    exact = _advection_exact(a, b)
    return Problem(
        name="advection_wave",
        eq=eq,
        exact=exact,
        initial=lambda x, y: exact(x, y, 0.0),
        default_flux="llf",
        default_bc="inflow_dirichlet",
        t_final=t_final,
    )


def _density_wave_exact(eq: Euler, v1: float, v2: float, p: float, c0: bool):
    def exact(x, y, t):
        phase = np.sin((x + y - t * (v1 + v2)) / 3.0)
        rho = 1.0 + 0.5 * (np.abs(phase) if c0 else phase)
        return eq.conserved(rho, v1, v2, p)

    return exact


def make_density_wave(
    gamma: float = 1.4, v1: float = 0.1, v2: float = 0.2, p: float = 2.5,
    c0: bool = False, t_final: float = 0.7,
) -> Problem:
    eq = Euler(gamma)
    exact = _density_wave_exact(eq, v1, v2, p, c0)
    return Problem(
        name="euler_c0_wave" if c0 else "euler_density_wave",
        eq=eq,
        exact=exact,
        initial=lambda x, y: exact(x, y, 0.0),
        default_flux="hllc",
        default_bc="dirichlet_exact",
        t_final=t_final,
    )


def make_explosion(gamma: float = 1.4, t_final: float = 7.0) -> Problem:
    """Quiescent gas with a dense disk of radius 0.4: rho 1 inside, 0.001
    outside, p = rho^gamma, zero velocity."""
    eq = Euler(gamma)

    def initial(x, y):
        rho = np.where(x**2 + y**2 < 0.4**2, 1.0, 0.001)
        return eq.conserved(rho, 0.0, 0.0, rho**gamma)

    return Problem(
        name="euler_explosion",
        eq=eq,
        exact=None,
        initial=initial,
        default_flux="hllc",
        default_bc="slip_wall",
        t_final=t_final,
    )


PROBLEM_FACTORIES = {
    "advection_wave": make_advection,
    "euler_density_wave": make_density_wave,
    "euler_c0_wave": lambda **kw: make_density_wave(c0=True, **kw),
    "euler_explosion": make_explosion,
}


def make_problem(name: str, **kwargs) -> Problem:
    try:
        factory = PROBLEM_FACTORIES[name]
    except KeyError:
        raise ParameterError(f"unknown problem {name!r}") from None
    return factory(**kwargs)


def make_boundary_condition(kind: str, problem: Problem) -> BoundaryCondition:
    if kind == "slip_wall":
        return BoundaryCondition("slip_wall")
    if problem.exact is None:
        raise ParameterError(f"{problem.name} has no exact solution for {kind}")
    return BoundaryCondition(kind, state_fn=problem.exact)
