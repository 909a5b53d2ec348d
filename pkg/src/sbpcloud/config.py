"""Minimal key = value experiment configs.

The format is a TOML-like subset: one ``key = value`` pair per line,
``#`` comments, blank lines ignored. Values are parsed as int, float,
bool (true/false), quoted or bare strings, or comma-separated lists of
those. See README for the schema.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from .errors import ParameterError


def _parse_scalar(text: str):
    text = text.strip()
    if text.startswith(('"', "'")) and text.endswith(text[0]) and len(text) >= 2:
        return text[1:-1]
    low = text.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        value = value.strip()
        if "," in value:
            out[key.strip()] = [_parse_scalar(v) for v in value.split(",") if v.strip()]
        else:
            out[key.strip()] = _parse_scalar(value)
    return out


def load_config(path) -> dict:
    with open(path) as fh:
        return parse_config_text(fh.read())


@dataclass
class ExperimentConfig:
    """Declarative description of one experiment run."""

    domain: str = "disk"  # disk | punctured
    grids: tuple[int, ...] = (1, 2, 3)
    adjacency: str = "radius"
    norm: str = "opt"  # opt | unif
    equation: str = "advection"  # advection | euler
    problem: str = "advection_wave"
    flux: str = "llf"  # central | llf | hllc
    bc: str = "inflow_dirichlet"
    t_final: float = 0.7
    cfl: float = 0.5
    stepper: str = "ssprk43"
    global_lambda: bool = False
    snapshot_times: tuple[float, ...] = ()
    out_dir: str = "out"
    # explosion-style custom grids: (n_x, n_b) on a disk of explosion_radius
    custom_grid: tuple[int, int] | None = None
    custom_radius: float | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**raw)
        if isinstance(cfg.grids, (int, float)):
            cfg.grids = (int(cfg.grids),)
        else:
            cfg.grids = tuple(int(g) for g in cfg.grids)
        if isinstance(cfg.snapshot_times, (int, float)):
            cfg.snapshot_times = (float(cfg.snapshot_times),)
        else:
            cfg.snapshot_times = tuple(float(s) for s in cfg.snapshot_times)
        if isinstance(cfg.custom_grid, list):
            cfg.custom_grid = tuple(int(v) for v in cfg.custom_grid)
        return cfg

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_dict(load_config(path))


NORM_KINDS = {"opt": "optimized", "unif": "uniform"}
