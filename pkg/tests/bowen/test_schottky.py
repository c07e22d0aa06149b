import numpy as np
import pytest

from anosov_lab.bowen.schottky import SchottkyData
from anosov_lab.bowen.transfer import bowen_dimension, build_transfer, cylinder_depth, spectral_radius
from anosov_lab.exceptions import ConfigurationError
from anosov_lab.spectrum.exponents import exponent_dirichlet

CENTERS = [1.0, 3.0, -1.0, -3.0]


@pytest.fixture
def symmetric():
    return SchottkyData.from_disks(CENTERS, [0.5] * 4)


def test_disk_data(symmetric):
    assert symmetric.rank == 2
    assert symmetric.margin == pytest.approx(1.0)
    assert symmetric.letter_stack().shape == (4, 2, 2)
    assert all(abs(np.linalg.det(m) - 1) < 1e-12 for m in symmetric.letter_stack())


def test_isometric_circles_of_disk_group(schottky_rep):
    sch = SchottkyData.from_rep(schottky_rep)
    assert np.allclose(sch.centers, CENTERS)
    assert np.allclose(sch.radii, 0.5)


@pytest.mark.parametrize(
    "centers, radii",
    [
        ([1.0, 1.5, -1.0, -3.0], [0.5] * 4),
        ([1.0, 3.0, -1.0], [0.5] * 3),
        ([1.0, 3.0, -1.0, -3.0], [0.5, 0.5, 0.5, -0.5]),
    ],
)
def test_invalid_disks(centers, radii):
    with pytest.raises(ConfigurationError):
        SchottkyData(np.array(centers), np.array(radii), (np.eye(2), np.eye(2)))


def test_mismatched_pairing(symmetric):
    with pytest.raises(ConfigurationError, match="pairing map"):
        SchottkyData(np.array(CENTERS), np.full(4, 0.4), symmetric.generators)


def test_generator_fixing_infinity(cyclic_rep):
    with pytest.raises(ConfigurationError, match="fixes infinity"):
        SchottkyData.from_rep(cyclic_rep)


def test_conjugation_by_translation(symmetric):
    moved = symmetric.conjugate(np.array([[1.0, 0.25j], [0.0, 1.0]]))
    assert np.allclose(moved.centers, np.array(CENTERS) + 0.25j)
    assert np.allclose(moved.radii, 0.5)
    with pytest.raises(ConfigurationError, match="pole"):
        symmetric.conjugate(np.array([[0.0, 1.0], [1.0, -1.0]]))


@pytest.mark.parametrize("rank, per_disk, depth", [(2, 243, 6), (2, 1, 1), (2, 4, 3), (3, 25, 3), (1, 100, 1)])
def test_cylinder_depth(rank, per_disk, depth):
    assert cylinder_depth(rank, per_disk) == depth


def test_cylinder_depth_needs_samples():
    with pytest.raises(ValueError):
        cylinder_depth(2, 0)


def test_transfer_admissibility(symmetric):
    transfer = build_transfer(symmetric, 0.5, 9)
    assert transfer.depth == 3
    assert transfer.size == 36
    mask = transfer.admissibility_mask()
    assert np.all(mask.sum(axis=1) == 3)
    for row, cell in enumerate(transfer.cells):
        for column in np.nonzero(mask[row])[0]:
            target = transfer.cells[column]
            assert target[0] != (cell[0] ^ 1)
            assert np.array_equal(target[1:], cell[:-1])


def test_transfer_is_thread_independent(symmetric):
    single = build_transfer(symmetric, 0.7, 27, threads=1)
    pooled = build_transfer(symmetric, 0.7, 27, threads=4)
    assert np.array_equal(single.dense(), pooled.dense())


def test_spectral_radius_decreases(symmetric):
    transfer = build_transfer(symmetric, 0.0, 27)
    assert spectral_radius(transfer) == pytest.approx(3.0)
    radii = [spectral_radius(transfer.at(s)) for s in (0.1, 0.4, 0.8)]
    assert radii[0] > radii[1] > radii[2]
    with pytest.raises(ValueError):
        transfer.at(-0.1)


def test_cyclic_group_has_dimension_zero():
    sch = SchottkyData.from_disks([1.0, 3.0], [0.5, 0.5])
    result = bowen_dimension(sch, m=8)
    assert result.value == 0.0
    assert result.depth == 1
    assert result.radius == pytest.approx(1.0)


def test_symmetric_dimension(symmetric):
    result = bowen_dimension(symmetric, tol=1e-10, m=27)
    assert 0 < result.value < 1
    assert result.radius == pytest.approx(1.0, abs=1e-9)
    assert result.cells == 4 * 27


def test_smaller_disks_give_smaller_dimension(symmetric):
    thin = SchottkyData.from_disks(CENTERS, [0.3] * 4)
    assert bowen_dimension(thin, m=27).value < bowen_dimension(symmetric, m=27).value


@pytest.mark.slow
def test_bowen_matches_critical_exponent(symmetric, schottky_rep):
    bowen = bowen_dimension(symmetric, m=243).value
    assert bowen == pytest.approx(exponent_dirichlet(schottky_rep, "a1", 12).value, abs=5e-2)
