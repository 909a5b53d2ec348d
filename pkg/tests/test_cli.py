import json
import os

import pytest

from sbpcloud.cli import main
from sbpcloud.config import ExperimentConfig, parse_config_text
from sbpcloud.errors import ParameterError


def test_config_parsing():
    raw = parse_config_text(
        """
        # comment
        domain = "disk"
        grids = 1, 2
        cfl = 0.5
        global_lambda = true
        out_dir = out/x
        """
    )
    assert raw["domain"] == "disk"
    assert raw["grids"] == [1, 2]
    assert raw["cfl"] == 0.5
    assert raw["global_lambda"] is True
    assert raw["out_dir"] == "out/x"
    cfg = ExperimentConfig.from_dict(raw)
    assert cfg.grids == (1, 2)


def test_config_rejects_unknown_keys():
    with pytest.raises(ParameterError):
        ExperimentConfig.from_dict({"domian": "disk"})
    with pytest.raises(ParameterError):
        parse_config_text("no equals sign here")


def test_build_ops_command(tmp_path):
    rc = main(["build-ops", "--grids", "1", "--out", str(tmp_path)])
    assert rc == 0
    out = tmp_path / "disk_g1_radius_opt"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["n"] == 4533
    assert manifest["invariants"]["consistency_x"] <= 1e-11
    for name in ("cloud.csv", "edges.txt", "graph.json", "qx.txt", "qy.txt", "h.txt"):
        assert (out / name).exists()


def test_ops_convergence_command(tmp_path):
    rc = main(["ops-convergence", "--grids", "1,2", "--out", str(tmp_path)])
    assert rc == 0
    files = sorted(os.listdir(tmp_path))
    assert "ops_disk_radius_opt_bump_dx.csv" in files
    assert "ops_disk_radius_opt_linear_dx.csv" in files
    body = (tmp_path / "ops_disk_radius_opt_bump_dx.csv").read_text().splitlines()
    assert body[0] == "grid,N,error,rate"
    assert len(body) == 3


def test_solve_command(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        "\n".join(
            [
                'problem = "advection_wave"',
                'domain = "disk"',
                "grids = 1",
                'flux = "llf"',
                'bc = "inflow_dirichlet"',
                "t_final = 0.1",
                "cfl = 0.5",
                f'out_dir = "{tmp_path}/out"',
            ]
        )
    )
    rc = main(["solve", "--config", str(cfg)])
    assert rc == 0
    summary = json.loads((tmp_path / "out" / "advection_wave_g1_llf_summary.json").read_text())
    assert summary["l2_error"] < 0.2
    assert summary["steps"] > 0
    assert (tmp_path / "out" / "advection_wave_g1_llf_final.csv").exists()


def test_cli_reports_errors(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text('problem = "no_such_problem"\ngrids = 1\n')
    rc = main(["solve", "--config", str(cfg), "--out", str(tmp_path)])
    assert rc == 2
