import numpy as np
import pytest

from anosov_lab.configs.enums import ExponentMethod
from anosov_lab.exceptions import EstimationError, PositivityError
from anosov_lab.reps.base import WeightFunctional
from anosov_lab.spectrum.exponents import entropy_growth, exponent_dirichlet, level_values
from anosov_lab.spectrum.table import spectrum_table


@pytest.fixture
def schottky_spectrum(schottky_rep, small_config):
    return spectrum_table(schottky_rep, ["a1", "2*a1"], 9, small_config)


def test_growth_entropy_is_positive(schottky_spectrum, small_config):
    estimate = entropy_growth(schottky_spectrum, config=small_config)
    assert estimate.method is ExponentMethod.GROWTH
    assert estimate.value > 0
    assert estimate.diagnostics["classes"] >= 20
    assert len(estimate.diagnostics["window_estimates"]) == 3


def test_scaled_functional_halves_entropy(schottky_spectrum, small_config):
    h = entropy_growth(schottky_spectrum, functional="a1", config=small_config).value
    h_scaled = entropy_growth(schottky_spectrum, functional="2*a1", config=small_config).value
    assert h_scaled == pytest.approx(h / 2, rel=1e-9)


def test_too_few_classes(cyclic_rep):
    spectrum = spectrum_table(cyclic_rep, ["a1"], 4)
    with pytest.raises(EstimationError, match="too few classes"):
        entropy_growth(spectrum)


def test_dirichlet_cyclic_group_is_zero(cyclic_rep):
    estimate = exponent_dirichlet(cyclic_rep, "a1", 6)
    assert estimate.value == 0.0
    assert estimate.method is ExponentMethod.DIRICHLET


def test_dirichlet_rejects_non_positive_functional(schottky_rep):
    with pytest.raises(PositivityError):
        exponent_dirichlet(schottky_rep, WeightFunctional(np.array([-1.0, 1.0])), 4)


def test_level_values_are_thread_independent(schottky_rep):
    a1 = WeightFunctional.root(1, 2)
    single = level_values(schottky_rep, a1, 5, threads=1)
    pooled = level_values(schottky_rep, a1, 5, threads=4)
    assert [len(level) for level in single] == [4, 12, 36, 108, 324]
    assert all(np.array_equal(x, y) for x, y in zip(single, pooled))


def test_dirichlet_scales_inversely(schottky_rep):
    h = exponent_dirichlet(schottky_rep, "a1", 8).value
    h_scaled = exponent_dirichlet(schottky_rep, "2*a1", 8).value
    assert 0 < h < 1
    assert h_scaled == pytest.approx(h / 2, rel=1e-6)


@pytest.mark.slow
def test_growth_and_dirichlet_agree(schottky_rep):
    spectrum = spectrum_table(schottky_rep, ["a1"], 14)
    growth = entropy_growth(spectrum).value
    dirichlet = exponent_dirichlet(schottky_rep, "a1", 12).value
    assert growth == pytest.approx(dirichlet, abs=5e-2)
