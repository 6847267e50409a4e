"""Command-line interface tests via click's test runner."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from geomgate.cli import main
from geomgate.io import CSV_HEADER


@pytest.fixture
def runner():
    return CliRunner()


def _build(runner, tmp_path, scheme, *args):
    result = runner.invoke(main, ["build", scheme, "--out", str(tmp_path), *args])
    assert result.exit_code == 0, result.output
    return result, tmp_path / f"{scheme}.json"


def test_list_schemes_names_every_constructor(runner):
    result = runner.invoke(main, ["list-schemes"])
    assert result.exit_code == 0
    for name in ("orange-slice", "toc", "composite-z", "dd-logical"):
        assert name in result.output


def test_build_reports_slice_loop_area(runner, tmp_path):
    result, path = _build(
        runner, tmp_path, "orange-slice", "--chi0", "1.0", "--xi0", "0.0", "--gamma", "0.5"
    )
    assert path.exists()
    area = float(result.output.split("pulse area: ")[1].splitlines()[0])
    assert abs(area - 2.0 * np.pi) < 1e-8


def test_build_reports_latitude_gate_minimum_area(runner, tmp_path):
    theta = 3.1
    result, _ = _build(runner, tmp_path, "toc", "--axis", "x", "--theta", str(theta))
    area = float(result.output.split("pulse area: ")[1].splitlines()[0])
    expected = np.pi / np.sqrt(1.0 + 1.0 / np.tan(theta / 2.0) ** 2)
    assert abs(area - expected) < 1e-8


def test_build_unknown_scheme_exits_with_validation_code(runner, tmp_path):
    result = runner.invoke(main, ["build", "pentagon", "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert "unknown scheme" in result.output


def test_propagate_clean_schedule_reports_unit_fidelity(runner, tmp_path):
    _, path = _build(
        runner, tmp_path, "orange-slice", "--chi0", "1.0", "--xi0", "0.0", "--gamma", "0.5"
    )
    result = runner.invoke(main, ["propagate", str(path)])
    assert result.exit_code == 0, result.output
    fidelity = float(result.output.split("avg gate fidelity: ")[1].splitlines()[0])
    assert fidelity > 1.0 - 1e-7
    gamma_d = float(result.output.split("gamma_d: ")[1].splitlines()[0])
    assert abs(gamma_d) < 1e-5


def test_propagate_rejects_malformed_document(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schedule": {"segments": [{"duration": 1.0}]}}))
    result = runner.invoke(main, ["propagate", str(bad)])
    assert result.exit_code == 2


def test_sweep_rejects_empty_grid(runner, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "scheme": "orange-slice",
                "scheme_params": {"chi0": 1.0, "xi0": 0.0, "gamma": 0.5},
                "gate": "test",
                "axis": "epsilon",
                "grid": [],
            }
        )
    )
    result = runner.invoke(main, ["sweep", "--config", str(cfg), "--out", str(tmp_path)])
    assert result.exit_code == 2


def test_sweep_writes_table_and_figure(runner, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "name": "slice-epsilon",
                "scheme": "orange-slice",
                "scheme_params": {"chi0": 1.5707963267948966, "xi0": 0.0, "gamma": 1.5707963267948966},
                "gate": "not",
                "axis": "epsilon",
                "grid": [-0.05, 0.0, 0.05],
            }
        )
    )
    result = runner.invoke(main, ["sweep", "--config", str(cfg), "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    csv_path = tmp_path / "slice-epsilon.csv"
    svg_path = tmp_path / "slice-epsilon.svg"
    assert csv_path.exists() and svg_path.exists()
    lines = csv_path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 4
    mid = lines[2].split(",")
    assert float(mid[5]) > 1.0 - 1e-8  # clean point


def test_experiment_writes_outputs_under_env_dir(runner, tmp_path, monkeypatch):
    monkeypatch.setenv("GEOMGATE_OUT", str(tmp_path))
    result = runner.invoke(main, ["experiment", "fig9", "--jobs", "2"])
    assert result.exit_code == 0, result.output
    csv_path = tmp_path / "fig9.csv"
    svg_path = tmp_path / "fig9.svg"
    assert csv_path.exists() and svg_path.exists()
    assert csv_path.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    assert svg_path.read_text().lstrip().startswith(("<?xml", "<svg"))
