"""Assembly of first-order summation-by-parts operators on a point cloud.

The construction: diagonal boundary operators ``E_x, E_y`` come from
boundary quadrature weights and normals; a skew-symmetric ``S`` supported on
the adjacency graph is parameterized by a nodal potential, ``S_ij =
psi_i - psi_j``, whose row sums equal ``L psi`` for the graph Laplacian
``L``. Solving ``L psi = -E 1 / 2`` and setting ``Q = S + E / 2`` yields
operators with ``Q 1 = 0`` and ``Q + Q^T = E`` by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .adjacency import AdjacencyGraph, is_connected
from .errors import CompatibilityError, ConnectivityError, SolverError
from .geometry import PointCloud


def build_boundary_operators(cloud: PointCloud) -> tuple[np.ndarray, np.ndarray]:
    """Diagonals of E_x and E_y: weight times normal component, zero inside."""
    ex = np.zeros(cloud.n)
    ey = np.zeros(cloud.n)
    ex[cloud.n_interior :] = cloud.weights * cloud.normals[:, 0]
    ey[cloud.n_interior :] = cloud.weights * cloud.normals[:, 1]
    return ex, ey


def build_graph_laplacian(graph: AdjacencyGraph) -> sp.csr_matrix:
    """Graph Laplacian: degree on the diagonal, -1 on edges. Row sums are 0."""
    if not is_connected(graph):
        raise ConnectivityError(f"{graph.method} graph is disconnected")
    a = graph.matrix()
    deg = np.asarray(a.sum(axis=1)).ravel()
    return (sp.diags(deg) - a).tocsr()


class LaplacianSolver:
    """Solves the singular system ``L psi = b`` for connected-graph Laplacians.

    ``b`` must be orthogonal to the constant vector (the null space of L);
    the returned potential is made unique by projecting out its mean.

    Methods:
      * ``"cg"`` - Jacobi-preconditioned conjugate gradient on the consistent
        singular system, re-projecting the iterate onto the zero-mean
        subspace every iteration.
      * ``"direct"`` - sparse LU on the bordered system [[L, 1], [1^T, 0]].
      * ``"auto"`` - direct for trees and small graphs (CG converges far too
        slowly on trees), CG otherwise.
    """

    def __init__(self, laplacian: sp.spmatrix, method: str = "auto", rtol: float = 1e-13):
        self.laplacian = laplacian.tocsr()
        self.n = laplacian.shape[0]
        self.rtol = rtol
        if method == "auto":
            nnz_offdiag = self.laplacian.nnz - self.n
            is_tree = nnz_offdiag == 2 * (self.n - 1)
            method = "direct" if (is_tree or self.n <= 2000) else "cg"
        if method not in ("cg", "direct"):
            raise ValueError(f"unknown solver method {method!r}")
        self.method = method
        self._lu = None
        self._diag = None

    def _bordered_lu(self):
        if self._lu is None:
            n = self.n
            ones = np.ones(n)
            bordered = sp.bmat(
                [[self.laplacian, ones[:, None]], [ones[None, :], None]], format="csc"
            )
            self._lu = spla.splu(bordered)
        return self._lu

    def _solve_direct(self, b: np.ndarray) -> np.ndarray:
        lu = self._bordered_lu()
        rhs = np.concatenate([b, [0.0]])
        psi = lu.solve(rhs)[: self.n]
        # iterative refinement: tree potentials can span several orders of
        # magnitude, and one LU pass leaves a residual far above the target
        residual = b - self.laplacian @ psi
        best = np.abs(residual).max()
        for _ in range(5):
            if best <= 1e-13 * max(1.0, np.abs(b).max()):
                break
            psi = psi + lu.solve(np.concatenate([residual, [0.0]]))[: self.n]
            residual = b - self.laplacian @ psi
            new = np.abs(residual).max()
            if new >= best:
                break
            best = new
        return psi - psi.mean()

    def _solve_cg(self, b: np.ndarray) -> np.ndarray:
        L = self.laplacian
        if self._diag is None:
            self._diag = L.diagonal()
        inv_diag = 1.0 / self._diag
        b_norm = np.linalg.norm(b)
        target = self.rtol * b_norm
        x = np.zeros(self.n)
        r = b.copy()
        z = inv_diag * r
        p = z.copy()
        rz = r @ z
        best = np.linalg.norm(r)
        stagnant = 0
        maxiter = max(2000, 40 * int(np.sqrt(self.n)) + 200)
        for _ in range(maxiter):
            lp = L @ p
            alpha = rz / (p @ lp)
            x += alpha * p
            r -= alpha * lp
            # keep the iterate in the range of L despite roundoff drift
            x -= x.mean()
            r -= r.mean()
            r_norm = np.linalg.norm(r)
            if r_norm <= target:
                return x
            if r_norm < best * 0.999999:
                best = r_norm
                stagnant = 0
            else:
                stagnant += 1
                if stagnant > 200:
                    break
            z = inv_diag * r
            rz_new = r @ z
            p = z + (rz_new / rz) * p
            rz = rz_new
        # CG stalled; accept only if the contract tolerance is still met
        achieved = np.linalg.norm(b - L @ x)
        if achieved <= 1e-10 * b_norm:
            return x - x.mean()
        raise SolverError(
            f"conjugate gradient stalled at relative residual {achieved / b_norm:.3e} "
            f"(target {self.rtol:.1e})",
            residual=float(achieved),
        )

    def solve(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        sum_b = abs(b.sum())
        norm1 = np.abs(b).sum()
        if norm1 == 0.0:
            return np.zeros(self.n)
        if sum_b > 1e-10 * norm1:
            raise CompatibilityError(
                f"right-hand side is not mean-free: |1^T b| = {sum_b:.3e} "
                f"exceeds 1e-10 * ||b||_1 = {1e-10 * norm1:.3e}"
            )
        b = b - b.sum() / self.n
        if self.method == "direct":
            return self._solve_direct(b)
        return self._solve_cg(b)


def solve_potential(
    laplacian: sp.spmatrix, b: np.ndarray, method: str = "auto", rtol: float = 1e-13
) -> np.ndarray:
    """One-shot wrapper around :class:`LaplacianSolver`."""
    return LaplacianSolver(laplacian, method=method, rtol=rtol).solve(b)


def build_skew_operator(graph: AdjacencyGraph, potential: np.ndarray) -> sp.csr_matrix:
    """Skew matrix with entries ``potential_i - potential_j`` on graph edges."""
    i, j = graph.edges[:, 0], graph.edges[:, 1]
    vals = potential[i] - potential[j]
    rows = np.concatenate([i, j])
    cols = np.concatenate([j, i])
    data = np.concatenate([vals, -vals])
    return sp.csr_matrix((data, (rows, cols)), shape=(graph.n, graph.n))


@dataclass(frozen=True)
class SbpOperatorSet:
    """Sparse Q_x, Q_y with diagonal boundary operators and norm over one cloud.

    ``h`` is the diagonal of the norm matrix; it is None until a norm is
    attached (see :mod:`sbpcloud.norm`), at which point ``D = H^{-1} Q``
    becomes available through :meth:`sbpcloud.calculus.apply_derivative`.
    ``psi_x, psi_y`` are the potentials that generated the skew parts; they
    give exact edge-wise access to the off-diagonal entries of Q.
    """

    qx: sp.csr_matrix
    qy: sp.csr_matrix
    ex: np.ndarray
    ey: np.ndarray
    psi_x: np.ndarray
    psi_y: np.ndarray
    cloud: PointCloud
    graph: AdjacencyGraph
    h: np.ndarray | None = None

    def with_norm(self, weights: np.ndarray) -> "SbpOperatorSet":
        if weights.shape != (self.cloud.n,) or np.any(weights <= 0):
            raise ValueError("norm diagonal must be positive with one entry per node")
        return replace(self, h=weights)


def assemble_sbp(
    cloud: PointCloud, graph: AdjacencyGraph, method: str = "auto", rtol: float = 1e-13
) -> SbpOperatorSet:
    """Build Q_x, Q_y = S + E/2 for one cloud/graph pair; the norm stays unset.

    The two potentials share one Laplacian solver (and its factorization,
    when the direct path is taken).
    """
    ex, ey = build_boundary_operators(cloud)
    lap = build_graph_laplacian(graph)
    solver = LaplacianSolver(lap, method=method, rtol=rtol)
    psi_x = solver.solve(-0.5 * ex)
    psi_y = solver.solve(-0.5 * ey)
    qx = build_skew_operator(graph, psi_x) + sp.diags(0.5 * ex)
    qy = build_skew_operator(graph, psi_y) + sp.diags(0.5 * ey)
    qx = qx.tocsr()
    qy = qy.tocsr()
    qx.eliminate_zeros()
    qy.eliminate_zeros()
    return SbpOperatorSet(
        qx=qx, qy=qy, ex=ex, ey=ey, psi_x=psi_x, psi_y=psi_y, cloud=cloud, graph=graph
    )


def operator_report(ops: SbpOperatorSet) -> dict:
    """Residuals of the defining algebraic identities, for verification.

    Keys: consistency (max |Q 1|), symmetry (max |Q + Q^T - E|), boundary
    locality (max |E| over interior nodes), and norm positivity.
    """
    n = ops.cloud.n
    ones = np.ones(n)
    report = {}
    for name, q, e in (("x", ops.qx, ops.ex), ("y", ops.qy, ops.ey)):
        report[f"consistency_{name}"] = float(np.max(np.abs(q @ ones)))
        sym = (q + q.T) - sp.diags(e)
        report[f"symmetry_{name}"] = float(np.max(np.abs(sym.data))) if sym.nnz else 0.0
        report[f"boundary_sum_{name}"] = float(abs(e.sum()))
    interior = slice(0, ops.cloud.n_interior)
    report["interior_e"] = float(
        max(np.max(np.abs(ops.ex[interior]), initial=0.0),
            np.max(np.abs(ops.ey[interior]), initial=0.0))
    )
    if ops.h is not None:
        report["min_norm_weight"] = float(ops.h.min())
    return report


def verify_sbp(ops: SbpOperatorSet, consistency_tol=1e-11, symmetry_tol=1e-12) -> dict:
    """Raise if the operator identities exceed their tolerances."""
    report = operator_report(ops)
    failures = []
    for axis in "xy":
        if report[f"consistency_{axis}"] > consistency_tol:
            failures.append(f"Q_{axis} 1 = {report[f'consistency_{axis}']:.3e}")
        if report[f"symmetry_{axis}"] > symmetry_tol:
            failures.append(f"Q_{axis}+Q_{axis}^T-E_{axis} = {report[f'symmetry_{axis}']:.3e}")
    if ops.h is not None and report["min_norm_weight"] <= 0:
        failures.append("norm diagonal is not positive")
    if failures:
        raise SolverError("SBP verification failed: " + "; ".join(failures))
    return report


def _write_coo(matrix: sp.spmatrix, path) -> None:
    coo = matrix.tocoo()
    with open(path, "w") as fh:
        for i, j, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{i} {j} {float(v)!r}\n")


def export_operators(ops: SbpOperatorSet, out_dir, cloud_file: str = "cloud.csv") -> dict:
    """Write Q_x/Q_y in coordinate format, diagonal vectors, and a manifest.

    Returns the manifest dict (also written to ``manifest.json``).
    """
    import os

    os.makedirs(out_dir, exist_ok=True)
    files = {"q_x": "qx.txt", "q_y": "qy.txt", "e_x": "ex.txt", "e_y": "ey.txt"}
    _write_coo(ops.qx, os.path.join(out_dir, files["q_x"]))
    _write_coo(ops.qy, os.path.join(out_dir, files["q_y"]))
    np.savetxt(os.path.join(out_dir, files["e_x"]), ops.ex)
    np.savetxt(os.path.join(out_dir, files["e_y"]), ops.ey)
    if ops.h is not None:
        files["h"] = "h.txt"
        np.savetxt(os.path.join(out_dir, files["h"]), ops.h)
    manifest = {
        "n": ops.cloud.n,
        "n_interior": ops.cloud.n_interior,
        "n_boundary": ops.cloud.n_boundary,
        "adjacency": ops.graph.method,
        "radius": ops.graph.radius,
        "cloud": cloud_file,
        "files": files,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest
