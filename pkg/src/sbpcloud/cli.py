"""Command-line interface: operator builds, convergence studies, PDE solves.

Subcommands:
  build-ops         build cloud -> adjacency -> SBP operators, export + verify
  ops-convergence   derivative-accuracy error tables across grids
  adjacency-compare ops-convergence for all four adjacency notions
  solve             time-dependent PDE experiment with error report
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

from . import calculus, norm, presets
from .config import NORM_KINDS, ExperimentConfig
from .errors import SbpCloudError
from .geometry import save_cloud_csv, build_disk_cloud
from .adjacency import radius_adjacency, save_graph
from .problems import make_boundary_condition, make_problem
from .sbp_core import assemble_sbp, export_operators, verify_sbp
from .solver import SemiDiscretization, TimeIntegrationConfig, field_l2_error, integrate


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    if args.out:
        cfg.out_dir = args.out
    if args.grids:
        cfg.grids = tuple(int(g) for g in args.grids.split(","))
    if args.flux:
        cfg.flux = args.flux
    if args.norm:
        cfg.norm = args.norm
    if args.adjacency:
        cfg.adjacency = args.adjacency
    return cfg


def _build_pipeline(cfg: ExperimentConfig, grid: int, timings: dict):
    """Cloud -> graph -> operators -> norm with per-stage wall times."""
    t0 = time.perf_counter()
    if cfg.custom_grid is not None:
        n_xy, n_b = cfg.custom_grid
        radius = cfg.custom_radius or 1.0
        cloud = build_disk_cloud(n_xy, n_xy, n_b, radius)
        timings["cloud"] = time.perf_counter() - t0
        t0 = time.perf_counter()
        graph = radius_adjacency(cloud, presets.neighbor_radius(n_xy, 2 * radius))
    else:
        cloud = presets.build_cloud(cfg.domain, grid)
        timings["cloud"] = time.perf_counter() - t0
        t0 = time.perf_counter()
        graph = presets.build_graph(cloud, cfg.adjacency, cfg.domain, grid)
    timings["adjacency"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    ops = assemble_sbp(cloud, graph)
    timings["sbp_assembly"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    ops = norm.attach_norm(ops, NORM_KINDS[cfg.norm])
    timings["norm"] = time.perf_counter() - t0
    return ops


def cmd_build_ops(args) -> int:
    cfg = _load_config(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    for grid in cfg.grids:
        timings = {}
        ops = _build_pipeline(cfg, grid, timings)
        tag = f"{cfg.domain}_g{grid}_{cfg.adjacency}_{cfg.norm}"
        out = os.path.join(cfg.out_dir, tag)
        os.makedirs(out, exist_ok=True)
        save_cloud_csv(ops.cloud, os.path.join(out, "cloud.csv"))
        save_graph(ops.graph, os.path.join(out, "edges.txt"), os.path.join(out, "graph.json"))
        manifest = export_operators(ops, out)
        report = verify_sbp(ops)
        manifest["invariants"] = report
        manifest["timings_s"] = {k: round(v, 4) for k, v in timings.items()}
        with open(os.path.join(out, "manifest.json"), "w") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
        print(f"{tag}: N={ops.cloud.n}, edges={ops.graph.edge_count}, invariants pass")
        for k, v in timings.items():
            print(f"  {k}: {v:.3f}s")
    return 0


def _study_csv_path(cfg, fn_name, axis):
    return os.path.join(
        cfg.out_dir, f"ops_{cfg.domain}_{cfg.adjacency}_{cfg.norm}_{fn_name}_d{axis}.csv"
    )


def cmd_ops_convergence(args) -> int:
    cfg = _load_config(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    builder = lambda g: presets.build_operators(cfg.domain, g, cfg.adjacency, NORM_KINDS[cfg.norm])
    for fn_name in ("linear", "bump"):
        fn = calculus.TEST_FUNCTIONS[fn_name]
        for axis in ("x",):
            rows = calculus.convergence_study(cfg.grids, builder, fn, axis)
            path = _study_csv_path(cfg, fn_name, axis)
            calculus.write_study_csv(rows, path)
            print(f"wrote {path}")
            for row in rows:
                rate = "" if row.rate is None else f" rate {row.rate:.4f}"
                print(f"  grid {row.grid}: N={row.n} error {row.error:.6g}{rate}")
    return 0


def cmd_adjacency_compare(args) -> int:
    failures = []
    for method in ("radius", "delaunay1", "delaunay2", "mst"):
        args.adjacency = method
        try:
            cmd_ops_convergence(args)
        except SbpCloudError as exc:
            failures.append((method, str(exc)))
            print(f"{method}: FAILED ({exc})")
    return 1 if failures else 0


def _write_snapshot(path, cloud, u, eq) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        pts = cloud.points
        if u.shape[1] == 1:
            writer.writerow(["x", "y", "u"])
            for (x, y), row in zip(pts, u):
                writer.writerow([repr(float(x)), repr(float(y)), repr(float(row[0]))])
        else:
            writer.writerow(["x", "y", "rho", "rho_v1", "rho_v2", "rho_e", "pressure"])
            p = eq.pressure(u)
            for (x, y), row, pi in zip(pts, u, p):
                writer.writerow([repr(float(x)), repr(float(y))] + [repr(float(v)) for v in row] + [repr(float(pi))])


def cmd_solve(args) -> int:
    cfg = _load_config(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    problem = make_problem(cfg.problem, t_final=cfg.t_final)
    bc = make_boundary_condition(cfg.bc, problem)
    summary_rows = []
    for grid in cfg.grids:
        timings = {}
        ops = _build_pipeline(cfg, grid, timings)
        sd = SemiDiscretization(ops, problem.eq, cfg.flux, bc)
        pts = ops.cloud.points
        u0 = problem.initial(pts[:, 0], pts[:, 1])
        ti_cfg = TimeIntegrationConfig(
            t_final=cfg.t_final,
            cfl=cfg.cfl,
            stepper=cfg.stepper,
            snapshot_times=cfg.snapshot_times,
            global_lambda=cfg.global_lambda,
        )
        result = integrate(u0, sd, ti_cfg)
        summary = {
            "problem": cfg.problem,
            "grid": grid if cfg.custom_grid is None else list(cfg.custom_grid),
            "n": ops.cloud.n,
            "flux": cfg.flux,
            "bc": cfg.bc,
            "t_final": result.t,
            "steps": result.steps,
            "wall_time_s": round(result.wall_time, 3),
            "min_density": result.min_density,
            "min_pressure": result.min_pressure,
        }
        if problem.exact is not None:
            exact = problem.exact(pts[:, 0], pts[:, 1], result.t)
            summary["l2_error"] = field_l2_error(ops, result.u, exact)
        tag = f"{cfg.problem}_g{grid}_{cfg.flux}"
        for snap_t, snap_u in result.snapshots.items():
            snap_path = os.path.join(cfg.out_dir, f"{tag}_t{snap_t:g}.csv")
            _write_snapshot(snap_path, ops.cloud, snap_u, problem.eq)
            print(f"wrote {snap_path}")
        final_path = os.path.join(cfg.out_dir, f"{tag}_final.csv")
        _write_snapshot(final_path, ops.cloud, result.u, problem.eq)
        with open(os.path.join(cfg.out_dir, f"{tag}_summary.json"), "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
        summary_rows.append(summary)
        err = summary.get("l2_error")
        err_txt = f" l2_error {err:.6g}" if err is not None else ""
        print(f"{tag}: N={ops.cloud.n} steps={result.steps}{err_txt}")
    if len(summary_rows) > 1 and all("l2_error" in s for s in summary_rows):
        errs = [s["l2_error"] for s in summary_rows]
        rates = calculus.log2_rates(errs)
        print("rates:", ", ".join("-" if r is None else f"{r:.4f}" for r in rates))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sbpcloud", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("build-ops", cmd_build_ops),
        ("ops-convergence", cmd_ops_convergence),
        ("adjacency-compare", cmd_adjacency_compare),
        ("solve", cmd_solve),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", help="experiment config file (key = value lines)")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--grids", help="comma-separated grid labels, e.g. 1,2,3")
        p.add_argument("--flux", choices=["central", "llf", "hllc"])
        p.add_argument("--norm", choices=["opt", "unif"])
        p.add_argument("--adjacency", choices=["radius", "mst", "delaunay1", "delaunay2"])
        p.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SbpCloudError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
