import json

import numpy as np
import pytest

from anosov_lab.exceptions import GridFormatError
from anosov_lab.reps.grid import GridGeometry, grid_builder, load_grid, save_grid


@pytest.fixture
def bending_grid(fixture_family):
    return grid_builder(fixture_family("bending"), 0.0, 0.05, 0.05, 1)


@pytest.fixture
def saved_grid(bending_grid, tmp_path):
    path = tmp_path / "grid.json"
    save_grid(bending_grid, str(path))
    return path


def rewrite(path, edit):
    payload = json.loads(path.read_text())
    edit(payload)
    path.write_text(json.dumps(payload))
    return str(path)


def test_geometry():
    geometry = GridGeometry(0.1, 0.0, 0.05, 0.02, 3, 5)
    nodes = list(geometry.nodes())
    assert len(nodes) == 15
    assert nodes[0] == (-1, -2)
    assert nodes[1] == (0, -2)
    assert geometry.z((1, 2)) == pytest.approx(complex(0.15, 0.04))
    assert not geometry.contains((2, 0))
    with pytest.raises(ValueError):
        GridGeometry(0.0, 0.0, 0.05, 0.05, 4, 5)


def test_symmetric_grid_is_mirrored(bending_grid, fixture_family):
    assert bending_grid.conj_symmetric
    assert bending_grid.holomorphic
    assert bending_grid.rank == 2 and bending_grid.dim == 2
    family = fixture_family("bending")
    mirrored = bending_grid.nodes[(1, -1)]
    fresh = family.at(complex(0.05, -0.05))
    for g, h in zip(mirrored.generators, fresh.generators):
        assert np.allclose(g.entries, h.entries, atol=1e-12)


def test_non_symmetric_family_evaluates_every_node(fixture_family):
    grid = grid_builder(fixture_family("complex_disks"), 0.0, 0.1, 0.1, 1)
    assert not grid.conj_symmetric
    assert len(grid.nodes) == 9


def test_save_and_load(bending_grid, saved_grid):
    loaded = load_grid(str(saved_grid))
    assert loaded.geometry == bending_grid.geometry
    assert loaded.conj_symmetric and loaded.holomorphic
    for node in bending_grid.geometry.nodes():
        for g, h in zip(loaded.nodes[node].generators, bending_grid.nodes[node].generators):
            assert np.array_equal(g.entries, h.entries)


def test_missing_file(tmp_path):
    with pytest.raises(GridFormatError, match="Malformed grid file"):
        load_grid(str(tmp_path / "absent.json"))


def test_invalid_json(tmp_path):
    path = tmp_path / "grid.json"
    path.write_text("{not json")
    with pytest.raises(GridFormatError):
        load_grid(str(path))


def test_missing_header_key(saved_grid):
    path = rewrite(saved_grid, lambda p: p.pop("dim"))
    with pytest.raises(GridFormatError, match="header"):
        load_grid(path)


def test_wrong_node_count(saved_grid):
    path = rewrite(saved_grid, lambda p: p["nodes"].pop())
    with pytest.raises(GridFormatError, match="Expected 9 nodes"):
        load_grid(path)


def test_duplicate_node(saved_grid):
    def duplicate(payload):
        payload["nodes"][1] = payload["nodes"][0]

    with pytest.raises(GridFormatError, match="Duplicate node"):
        load_grid(rewrite(saved_grid, duplicate))


def test_node_outside_grid(saved_grid):
    def move(payload):
        payload["nodes"][0]["is"] = 5

    with pytest.raises(GridFormatError, match="outside the grid"):
        load_grid(rewrite(saved_grid, move))


def test_wrong_matrix_shape(saved_grid):
    def shrink(payload):
        payload["nodes"][0]["generators"][0] = [[[1.0, 0.0]]]

    with pytest.raises(GridFormatError, match="Wrong matrix shape"):
        load_grid(rewrite(saved_grid, shrink))


def test_singular_matrix(saved_grid):
    def singular(payload):
        payload["nodes"][0]["generators"][0] = [[[1.0, 0.0], [2.0, 0.0]], [[2.0, 0.0], [4.0, 0.0]]]

    with pytest.raises(GridFormatError, match="Non-invertible"):
        load_grid(rewrite(saved_grid, singular))


def test_broken_symmetry_flag(saved_grid):
    def perturb(payload):
        node = next(n for n in payload["nodes"] if n["it"] == 1)
        node["generators"][0][0][0][0] += 1e-3

    with pytest.raises(GridFormatError, match="conj_symmetric"):
        load_grid(rewrite(saved_grid, perturb))


def test_unnormalized_matrix_is_rescaled(saved_grid):
    def scale(payload):
        payload["flags"]["conj_symmetric"] = False
        payload["nodes"][0]["generators"][0] = [[[2.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [2.0, 0.0]]]

    # Setup
    path = rewrite(saved_grid, scale)
    first = json.loads(saved_grid.read_text())["nodes"][0]

    # Execute
    loaded = load_grid(path)

    # Verify
    g = loaded.nodes[(first["is"], first["it"])].generators[0]
    assert np.allclose(g.entries, [[1.0, 0.5], [0.0, 1.0]], rtol=0, atol=1e-15)
