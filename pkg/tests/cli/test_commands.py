import csv
import json

import numpy as np
import pytest

from anosov_lab.cli.commands import (
    cmd_dimension,
    cmd_exponent,
    cmd_intersect,
    cmd_limitset,
    cmd_pressure,
    comparison,
    representation,
    schottky_data,
    settings_echo,
)
from anosov_lab.configs.run import RunConfig
from anosov_lab.exceptions import ConfigurationError
from anosov_lab.fixtures import load_fixture


def fixture_run(name, tmp_path, **overrides):
    raw = {**load_fixture(name), "fixture": name, "out_dir": str(tmp_path), **overrides}
    return RunConfig(**raw)


def test_settings_echo_leaves_out_threads_and_output(tmp_path):
    run = fixture_run("cyclic", tmp_path, threads=3, command="spectrum")

    echo = settings_echo(run)

    assert "threads" not in echo
    assert "out_dir" not in echo
    assert "command" not in echo
    assert echo["max_len"] == 4
    assert echo["fixture"] == "cyclic"


def test_representation_needs_a_family(tmp_path):
    run = RunConfig(out_dir=str(tmp_path))
    with pytest.raises(ConfigurationError, match="no family given"):
        representation(run)


def test_comparison_defaults(tmp_path):
    run = fixture_run("cyclic", tmp_path)
    assert comparison(run) is None

    other = comparison(fixture_run("cyclic", tmp_path, compare_parameter=0.0))
    assert other is not None
    assert other.rank == 1


def test_exponent_of_cyclic_group(tmp_path):
    # Setup
    run = fixture_run("cyclic", tmp_path, exponent_method="dirichlet")

    # Execute
    [path] = cmd_exponent(run, run.lab_config(), 1)

    # Verify
    payload = json.loads(open(path).read())
    assert payload["command"] == "exponent"
    assert payload["results"]["a1"]["value"] == 0.0
    assert "delta" not in payload["results"]["a1"]
    assert payload["settings"]["exponent_method"] == "dirichlet"


def test_self_intersection_output(tmp_path):
    # Setup
    run = fixture_run("schottky_symmetric", tmp_path, max_len=9, windows={"min_classes": 20})

    # Execute
    [path] = cmd_intersect(run, run.lab_config(), 2)

    # Verify
    payload = json.loads(open(path).read())
    assert payload["results"]["a1"]["value"] == 1.0
    assert payload["results"]["a1"]["renormalized"]["value"] == 1.0
    assert payload["classes"] > 20


def test_limitset_outputs(tmp_path):
    # Setup
    run = fixture_run("cyclic", tmp_path, ppm=[4, 4])

    # Execute
    outputs = cmd_limitset(run, run.lab_config(), 1)

    # Verify
    assert [p.rsplit("/", 1)[-1] for p in outputs] == ["limitset.csv", "limitset.ppm"]
    with open(outputs[0], newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["x", "y", "chart"]
    assert len(rows) == 3
    raster = open(outputs[1], "rb").read()
    assert raster.startswith(b"P5 4 4 255\n")
    assert len(raster) == len(b"P5 4 4 255\n") + 16


def test_limitset_without_raster(tmp_path):
    run = fixture_run("cyclic", tmp_path)
    outputs = cmd_limitset(run, run.lab_config(), 1)
    assert len(outputs) == 1


def test_pressure_needs_a_grid(tmp_path):
    run = fixture_run("schottky_symmetric", tmp_path)
    with pytest.raises(ConfigurationError, match="parameter grid"):
        cmd_pressure(run, run.lab_config(), 1)


def test_schottky_data_from_disk_family(tmp_path):
    run = fixture_run("schottky_symmetric", tmp_path)

    sch = schottky_data(run, representation(run))

    assert np.allclose(sch.centers, [1, 3, -1, -3])
    assert np.allclose(sch.radii, 0.5)
    assert sch.margin > 0


def test_dimension_output(tmp_path):
    # Setup
    run = fixture_run("schottky_symmetric", tmp_path, max_len=9, windows={"min_classes": 20}, bowen_cells=9)

    # Execute
    [path] = cmd_dimension(run, run.lab_config(), 2)

    # Verify
    payload = json.loads(open(path).read())
    assert payload["value"] == payload["bowen"]["value"]
    assert 0.0 < payload["bowen"]["value"] < 1.0
    assert set(payload["delta"]) == {"box_vs_exponent", "bowen_vs_exponent", "bowen_vs_box"}
    assert payload["settings"]["bowen_cells"] == 9


def test_pressure_outputs_on_symmetric_grid(tmp_path):
    # Setup
    grid = {"center": 0.0, "ds": 0.05, "dt": 0.05, "n": 1}
    run = fixture_run("bending", tmp_path, grid=grid, max_len=8, functionals=["a1"], windows={"min_classes": 20})

    # Execute
    outputs = cmd_pressure(run, run.lab_config(), 2)

    # Verify
    assert [p.rsplit("/", 1)[-1] for p in outputs] == ["pressure.json", "master_identity.json", "pressure_h.csv"]
    payload = json.loads(open(outputs[0]).read())
    result = payload["results"]["a1"]
    assert payload["certificate"]["pass"] is True
    assert result["components_s"]["direct"] == result["s"]["value"]
    assert "master_identity" in result
