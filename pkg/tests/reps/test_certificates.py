import numpy as np
import pytest

from anosov_lab.configs.base import EnumerationConfig, LabConfig
from anosov_lab.exceptions import EnumerationBudgetError, EstimationError, NonProximalError
from anosov_lab.fixtures import load_fixture
from anosov_lab.reps.base import RepPoint, WeightFunctional, evaluate
from anosov_lab.reps.boundary import attracting_point, fixed_line, hyperconvexity_certificate, limit_cone
from anosov_lab.reps.certificates import anosov_certificate, fit_affine_bound
from anosov_lab.utils.factory import FamilyFactory
from anosov_lab.words import ConjClass, Word


def veronese_rep(degree):
    base = load_fixture("schottky_symmetric")["family"]
    return FamilyFactory.from_dict({"provider": "lift", "config": {"kind": "sym", "degree": degree, "base": base}}).at(0)


def test_schottky_group_is_certified(schottky_rep):
    certificate = anosov_certificate(schottky_rep, WeightFunctional.root(1, 2), 8)
    assert certificate.passed
    assert certificate.held_out
    assert certificate.mu > 0.05
    assert certificate.window == (4, 8)
    lengths = np.arange(1, 9)
    assert np.all(np.array(certificate.minima) >= certificate.mu * lengths - certificate.c - 1e-9)
    assert certificate.to_dict()["pass"] is True


def test_affine_bound_is_fitted_on_long_words():
    mu, c, held_out = fit_affine_bound(0.5 * np.arange(1, 9) + 0.25)
    assert mu == pytest.approx(0.5)
    assert c == 0.0
    assert held_out

    minima = 0.5 * np.arange(1, 9)
    minima[1] = -1.0
    mu, c, held_out = fit_affine_bound(minima)
    assert mu == pytest.approx(0.5)
    assert c == pytest.approx(0.0, abs=1e-12)
    assert not held_out


def test_offset_covers_the_window_deficit():
    minima = np.array([1.0, 2.0, 3.0, 3.5, 5.0, 6.0])
    mu, c, held_out = fit_affine_bound(minima)
    lengths = np.arange(3, 7)
    assert c > 0
    assert np.min(minima[2:] - (mu * lengths - c)) == pytest.approx(0.0, abs=1e-12)
    assert held_out


def test_held_out_violation_fails_the_certificate(schottky_rep, mocker):
    # Setup
    minima = [float(x) for x in np.arange(1, 9)]
    minima[0] = -2.0
    mocker.patch("anosov_lab.reps.certificates._shard_minima", return_value=minima)

    # Execute
    certificate = anosov_certificate(schottky_rep, WeightFunctional.root(1, 2), 8, threads=1)

    # Verify
    assert certificate.mu == pytest.approx(1.0)
    assert not certificate.held_out
    assert not certificate.passed
    assert certificate.to_dict()["held_out"] is False


def test_unipotent_generator_fails(fixture_family):
    rep = fixture_family("unipotent").at(0)
    certificate = anosov_certificate(rep, WeightFunctional.root(1, 2), 8)
    assert not certificate.passed
    assert certificate.mu < 0.05


def test_certificate_is_thread_independent(schottky_rep):
    root = WeightFunctional.root(1, 2)
    single = anosov_certificate(schottky_rep, root, 6, threads=1)
    pooled = anosov_certificate(schottky_rep, root, 6, threads=4)
    assert single.minima == pooled.minima
    assert single.mu == pooled.mu


def test_certificate_arguments(schottky_rep):
    with pytest.raises(ValueError, match="simple root"):
        anosov_certificate(schottky_rep, WeightFunctional.omega(1, 2), 6)
    with pytest.raises(ValueError):
        anosov_certificate(schottky_rep, WeightFunctional.root(1, 2), 1)
    config = LabConfig(enumeration=EnumerationConfig(budget=100))
    with pytest.raises(EnumerationBudgetError):
        anosov_certificate(schottky_rep, WeightFunctional.root(1, 2), 6, config)


def test_fixed_line_of_diagonal(cyclic_rep):
    point = fixed_line(cyclic_rep, ConjClass.of(Word.parse("a")))
    assert np.allclose(np.abs(point.line), [1.0, 0.0])
    assert point.gap == pytest.approx(2 * np.log(2))
    inverse = fixed_line(cyclic_rep, ConjClass.of(Word.parse("A")))
    assert np.allclose(np.abs(inverse.line), [0.0, 1.0])


def test_elliptic_element_is_not_proximal():
    rep = RepPoint.from_arrays([np.array([[0.0, -1.0], [1.0, 0.0]])])
    with pytest.raises(NonProximalError):
        fixed_line(rep, ConjClass.of(Word.parse("a")))


def test_limit_cone_of_cyclic_group(cyclic_rep):
    cone = limit_cone(cyclic_rep, 3, [WeightFunctional.root(1, 2)])
    assert cone.class_count == 2
    assert cone.directions.shape == (1, 2)
    assert cone.minima["a1"] == pytest.approx(np.sqrt(2))
    assert cone.positive("a1")


def test_hyperconvexity_of_lifted_fuchsian_group(fixture_family):
    rep = fixture_family("bending_sym3").at(0)
    report = hyperconvexity_certificate(rep, sample_size=12, max_len=3)
    assert len(report.triples) == 12
    # nested disks put attracting points close together and the d = 4 frame degenerates polynomially in their distance
    assert report.min_gap > 1e-10
    again = hyperconvexity_certificate(rep, sample_size=12, max_len=3)
    assert report.triples == again.triples


def test_veronese_lift_is_hyperconvex():
    report = hyperconvexity_certificate(veronese_rep(3), sample_size=12, max_len=3)
    assert report.min_gap > 1e-8


def test_block_diagonal_group_is_not_hyperconvex(fixture_family):
    rep = fixture_family("block_diagonal").at(0)
    report = hyperconvexity_certificate(rep, sample_size=8, max_len=3)
    assert len(report.triples) == 8
    assert report.min_gap < 1e-12
    assert hyperconvexity_certificate(veronese_rep(3), sample_size=8, max_len=3).min_gap > 1e4 * report.min_gap


@pytest.mark.parametrize("name", ["schottky_symmetric", "complex_disks", "bending_sym3"])
def test_fixed_line_is_equivariant(fixture_family, name):
    rep = fixture_family(name).at(0)
    for core, g in [("ab", "b"), ("aab", "A"), ("aBB", "ba")]:
        word, h = Word.parse(core, rank=2), Word.parse(g, rank=2)
        conjugate = h * word * h.inverse()
        line = attracting_point(rep, word).line
        moved = evaluate(rep, h).entries @ line
        image = attracting_point(rep, conjugate).line
        assert abs(np.vdot(moved / np.linalg.norm(moved), image)) == pytest.approx(1.0, abs=1e-9)


def test_hyperconvexity_needs_dimension_three(schottky_rep):
    with pytest.raises(ValueError):
        hyperconvexity_certificate(schottky_rep, sample_size=4)


def test_hyperconvexity_needs_three_points():
    rep = RepPoint.from_arrays([np.diag([4.0, 1.0, 0.25])])
    with pytest.raises(EstimationError, match="insufficient distinct classes"):
        hyperconvexity_certificate(rep, sample_size=4, max_len=2)
