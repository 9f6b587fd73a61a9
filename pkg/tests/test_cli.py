import csv
import math
import io
import json

import numpy as np
import pytest

from trajgrowth.cli import main
from trajgrowth.idx import encode_idx


def test_bounds_table(capsys):
    assert main(["bounds", "--families", "gaussian", "--alphas", "0.5", "--scales", "2",
                 "--k", "784", "--unscaled"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 1
    assert float(rows[0]["bound_base"]) == pytest.approx(0.5 * 2 * 28 / math.sqrt(2 * math.pi))


def test_simulate_to_stdout_and_file(capsys, tmp_path):
    args = ["simulate", "--width", "12", "--depth", "3", "--segments", "20", "--replicates", "2",
            "--alphas", "0.5,1", "--trajectory", "random_line", "--dim", "12"]
    assert main(args) == 0
    out = capsys.readouterr().out
    assert out.startswith("family,alpha,")
    assert len(out.strip().splitlines()) == 1 + 2 * 4
    target = tmp_path / "run" / "r.csv"
    assert main(args + ["--summary", "--out", str(target)]) == 0
    assert len(target.read_text().strip().splitlines()) == 3
    assert json.loads(target.with_suffix(".json").read_text())["config"]["width"] == 12


def test_simulate_from_yaml(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("version: 1\nwidth: 8\ndepth: 2\nsegments: 10\nreplicates: 2\n"
                   "trajectory: {kind: random_arc, dim: 8, planes: 3}\n")
    assert main(["simulate", "--config", str(cfg), "--summary"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 2


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("version: 7\n")
    assert main(["simulate", "--config", str(cfg)]) == 2
    assert "version" in capsys.readouterr().err


def test_idx_info(tmp_path, capsys):
    path = tmp_path / "x.idx"
    path.write_bytes(encode_idx(np.zeros((3, 2, 2), np.uint8)))
    assert main(["idx-info", str(path)]) == 0
    assert "(3, 2, 2)" in capsys.readouterr().out
    path.write_bytes(b"\x01\x02\x03\x04")
    assert main(["idx-info", str(path)]) == 2


def test_figure_command(tmp_path, capsys):
    assert main(["figure", "fig4b", "--outdir", str(tmp_path)]) == 0
    assert (tmp_path / "fig4b.svg").exists()


def test_verify_quick(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert main(["verify", "--quick", "--json", str(out)]) == 0
    assert "checks passed" in capsys.readouterr().out
    assert all(r["passed"] for r in json.loads(out.read_text()))
