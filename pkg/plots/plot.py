"""Render figures from sbpcloud CSV outputs.

Reads only the solver's documented file formats:
  * convergence CSVs with header ``grid,N,error,rate``,
  * snapshot CSVs with header ``x,y,<columns...>`` (one row per node).

Usage:
  plot convergence --in table.csv [more.csv ...] [--labels a,b] --out fig.png
  plot field --in snapshot.csv --column pressure [--clim 0.008,0.25] --out fig.png
  plot frames --in s1.csv s2.csv ... --column pressure [--clim ...] --out fig.png

Outputs are PNG and byte-stable across reruns of the same inputs; inputs
are never modified.
"""

from __future__ import annotations

import argparse
import csv
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import matplotlib.tri as mtri
import numpy as np


class PlotInputError(ValueError):
    pass


def read_convergence_csv(path):
    """Rows of (grid, n, error) from a ``grid,N,error,rate`` CSV."""
    grids, errors = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["grid", "N", "error"]:
            raise PlotInputError(f"{path}: expected header 'grid,N,error,rate', got {header}")
        for row in reader:
            if len(row) < 3:
                raise PlotInputError(f"{path}: malformed row {row}")
            grids.append(float(row[0]))
            errors.append(float(row[2]))
    if not grids:
        raise PlotInputError(f"{path}: no data rows")
    return np.array(grids), np.array(errors)


def read_snapshot_csv(path, column):
    """Coordinates and one value column from a nodal snapshot CSV."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["x", "y"]:
            raise PlotInputError(f"{path}: expected a snapshot CSV starting with x,y")
        if column not in header:
            raise PlotInputError(f"{path}: no column {column!r}; available: {header[2:]}")
        idx = header.index(column)
        xs, ys, vals = [], [], []
        for row in reader:
            xs.append(float(row[0]))
            ys.append(float(row[1]))
            vals.append(float(row[idx]))
    if not xs:
        raise PlotInputError(f"{path}: no data rows")
    return np.array(xs), np.array(ys), np.array(vals)


def plot_convergence(paths, labels, out):
    """Log-log error-vs-grid curves with slope 1/2, 1, 2 reference lines."""
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    first = None
    for path, label in zip(paths, labels):
        grids, errors = read_convergence_csv(path)
        ax.loglog(2.0**grids, errors, "o-", label=label)
        if first is None:
            first = (2.0 ** grids[0], errors[0], 2.0 ** grids[-1])
    x0, e0, x1 = first
    ref_x = np.array([x0, x1])
    for slope, style in ((0.5, ":"), (1.0, "--"), (2.0, "-.")):
        ax.loglog(ref_x, e0 * (ref_x / x0) ** -slope, style, color="gray", linewidth=0.8,
                  label=f"slope {slope:g}")
    ax.set_xlabel("refinement (2^grid)")
    ax.set_ylabel("L2 error")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def plot_field(path, column, clim, out):
    """Triangulated pseudo-color map of one nodal value column."""
    x, y, v = read_snapshot_csv(path, column)
    fig, ax = plt.subplots(figsize=(5.0, 4.4))
    tri = mtri.Triangulation(x, y)
    vmin, vmax = clim if clim else (float(v.min()), float(v.max()))
    m = ax.tripcolor(tri, v, shading="gouraud", vmin=vmin, vmax=vmax)
    fig.colorbar(m, ax=ax, label=column)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def plot_frames(paths, column, clim, out):
    """Row of field maps sharing fixed color limits (e.g. snapshot times)."""
    fig, axes = plt.subplots(1, len(paths), figsize=(3.4 * len(paths), 3.4))
    if len(paths) == 1:
        axes = [axes]
    mappable = None
    for ax, path in zip(axes, paths):
        x, y, v = read_snapshot_csv(path, column)
        tri = mtri.Triangulation(x, y)
        vmin, vmax = clim if clim else (float(v.min()), float(v.max()))
        mappable = ax.tripcolor(tri, v, shading="gouraud", vmin=vmin, vmax=vmax)
        ax.set_aspect("equal")
        ax.set_xticks([])
        ax.set_yticks([])
    fig.colorbar(mappable, ax=axes, label=column, shrink=0.8)
    fig.savefig(out, dpi=150)
    plt.close(fig)


def _parse_clim(text):
    if text is None:
        return None
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 2:
        raise PlotInputError(f"--clim needs two numbers, got {text!r}")
    return parts[0], parts[1]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plot", description=__doc__)
    sub = parser.add_subparsers(dest="kind", required=True)

    p = sub.add_parser("convergence")
    p.add_argument("--in", dest="inputs", nargs="+", required=True)
    p.add_argument("--labels", default=None, help="comma-separated curve labels")
    p.add_argument("--out", required=True)

    for name in ("field", "frames"):
        p = sub.add_parser(name)
        p.add_argument("--in", dest="inputs", nargs="+", required=True)
        p.add_argument("--column", required=True)
        p.add_argument("--clim", default=None, help="vmin,vmax")
        p.add_argument("--out", required=True)

    args = parser.parse_args(argv)
    try:
        if args.kind == "convergence":
            labels = args.labels.split(",") if args.labels else [f"series {i}" for i in range(len(args.inputs))]
            if len(labels) != len(args.inputs):
                raise PlotInputError("need one label per input file")
            plot_convergence(args.inputs, labels, args.out)
        elif args.kind == "field":
            if len(args.inputs) != 1:
                raise PlotInputError("field takes exactly one snapshot")
            plot_field(args.inputs[0], args.column, _parse_clim(args.clim), args.out)
        else:
            plot_frames(args.inputs, args.column, _parse_clim(args.clim), args.out)
    except (PlotInputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
