import numpy as np
import pytest

from anosov_lab.configs.base import LabConfig, WindowConfig
from anosov_lab.exceptions import PositivityError
from anosov_lab.reps.base import WeightFunctional
from anosov_lab.reps.certificates import anosov_certificate
from anosov_lab.spectrum.exponents import entropy_growth
from anosov_lab.spectrum.table import ClassSpectrum, spectrum_table
from anosov_lab.spectrum.thermo import (
    gibbs_average,
    intersection,
    orbit_variance,
    pressure_orbit,
    renormalized_intersection,
    variance,
)


@pytest.fixture
def twin_spectrum(schottky_rep, small_config):
    return spectrum_table([schottky_rep, schottky_rep], ["a1"], 9, small_config, rep_names=["rho", "eta"])


def with_second_rep(spectrum, g_periods):
    periods = np.stack([spectrum.base, g_periods], axis=1)[:, :, None]
    return ClassSpectrum(
        spectrum.classes, spectrum.core_lengths.copy(), periods, ("f", "g"), ("a1",), spectrum.max_len
    )


def test_self_intersection_is_one(twin_spectrum, small_config):
    estimate = intersection(twin_spectrum, "rho", "eta", config=small_config, h=0.5)
    assert estimate.value == 1.0
    assert estimate.plain.spread == 0.0
    assert estimate.gibbs.value == 1.0


def test_renormalized_self_intersection_is_one(twin_spectrum, small_config):
    estimate = renormalized_intersection(twin_spectrum, 0, 1, config=small_config)
    assert estimate.value == 1.0
    assert estimate.intersection.value == 1.0


def test_intersection_of_scaled_lengths(twin_spectrum, small_config):
    spectrum = with_second_rep(twin_spectrum, 2.0 * twin_spectrum.base)
    estimate = intersection(spectrum, "f", "g", config=small_config, with_gibbs=False)
    assert estimate.value == pytest.approx(2.0)
    assert estimate.gibbs is None


def test_renormalized_intersection_is_scale_invariant(twin_spectrum, small_config):
    spectrum = with_second_rep(twin_spectrum, 3.0 * twin_spectrum.base)
    estimate = renormalized_intersection(spectrum, "f", "g", config=small_config)
    assert estimate.h_g.value == pytest.approx(estimate.h_f.value / 3.0, rel=1e-9)
    assert estimate.value == pytest.approx(1.0, rel=1e-9)


def test_intersection_rejects_non_positive_comparison(twin_spectrum, small_config):
    spectrum = with_second_rep(twin_spectrum, -twin_spectrum.base)
    with pytest.raises(PositivityError):
        intersection(spectrum, "f", "g", config=small_config, with_gibbs=False)


def test_gibbs_average_of_multiple(twin_spectrum, small_config):
    fit = gibbs_average(twin_spectrum, 3.0 * twin_spectrum.base, 0.5, config=small_config)
    assert fit.value == pytest.approx(3.0)


def test_pressure_orbit_misaligned_potential(twin_spectrum):
    with pytest.raises(ValueError, match="one value per table row"):
        pressure_orbit(twin_spectrum, np.zeros(3))


def test_pressure_at_entropy_is_near_zero(twin_spectrum, small_config):
    h = entropy_growth(twin_spectrum, config=small_config).value
    fit = pressure_orbit(twin_spectrum, -h * twin_spectrum.base, config=small_config)
    assert abs(fit.value) < 0.05
    assert pressure_orbit(twin_spectrum, np.zeros(len(twin_spectrum)), config=small_config).value == pytest.approx(h, abs=1e-12)


def test_pressure_is_decreasing_in_s(twin_spectrum, small_config):
    h = entropy_growth(twin_spectrum, config=small_config).value
    values = [
        pressure_orbit(twin_spectrum, -s * twin_spectrum.base, config=small_config, h=h).value
        for s in np.linspace(0.0, 2.0 * h, 5)
    ]
    assert np.all(np.diff(values) < 0)
    assert values[0] > 0 > values[-1]


def test_pressure_without_orbit_correction_uses_raw_shell_sums(twin_spectrum, mocker):
    # Setup
    config = LabConfig(windows=WindowConfig(min_classes=20, orbit_correction=False))
    growth = mocker.patch("anosov_lab.spectrum.thermo.entropy_growth")

    # Execute
    fit = pressure_orbit(twin_spectrum, np.zeros(len(twin_spectrum)), config=config)

    # Verify
    growth.assert_not_called()
    assert fit.value > 0


def test_distinct_certified_groups_have_renormalized_intersection_above_one(schottky_rep, fixture_family, small_config):
    # Setup
    other = fixture_family("schottky_asymmetric").at(0)
    root = WeightFunctional.root(1, 2)
    assert anosov_certificate(schottky_rep, root, 8).passed
    assert anosov_certificate(other, root, 8).passed
    spectrum = spectrum_table([schottky_rep, other], ["a1"], 9, small_config, rep_names=["rho", "eta"])

    # Execute
    forward = renormalized_intersection(spectrum, "rho", "eta", config=small_config)
    backward = renormalized_intersection(spectrum, "eta", "rho", config=small_config)

    # Verify
    assert forward.value > 1.0
    assert backward.value > 1.0


def test_variance_of_the_base_functional_vanishes(twin_spectrum, small_config):
    estimate = variance(twin_spectrum, twin_spectrum.base, config=small_config, h=0.5)
    assert estimate.gibbs_mean == 1.0
    assert estimate.value == 0.0
    assert estimate.orbit_variance == 0.0
    assert estimate.step == small_config.calculus.variance_step


def test_orbit_variance_is_non_negative(twin_spectrum, small_config):
    rng = np.random.default_rng(0)
    g = twin_spectrum.base * (1.0 + 0.1 * rng.standard_normal(len(twin_spectrum)))
    assert orbit_variance(twin_spectrum, g, 0.5, config=small_config) > 0
