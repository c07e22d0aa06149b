import numpy as np
import pytest

from anosov_lab.configs.base import WindowConfig
from anosov_lab.exceptions import EstimationError
from anosov_lab.spectrum.windows import combine_windows, linear_fit, rank_windows, shell_fit, shell_sums, staircase_fit


def test_linear_fit():
    slope, intercept = linear_fit([0.0, 1.0, 2.0, 3.0], [1.0, 3.0, 5.0, 7.0])
    assert slope == pytest.approx(2.0)
    assert intercept == pytest.approx(1.0)


def test_linear_fit_constant_is_exact():
    assert linear_fit([0.1, 0.2, 0.7], [0.3, 0.3, 0.3]) == (0.0, 0.3)


def test_linear_fit_degenerate():
    with pytest.raises(EstimationError):
        linear_fit([1.0], [2.0])
    with pytest.raises(EstimationError):
        linear_fit([1.0, 1.0], [2.0, 3.0])


def test_combine_windows():
    fit = combine_windows([1.1, 1.05, 1.0], [3.0, 2.0, 1.0], extrapolate=True)
    assert fit.value == pytest.approx(0.95)
    assert fit.extrapolated
    assert fit.spread == pytest.approx(0.1)

    averaged = combine_windows([1.1, 1.05, 1.0], [3.0, 2.0, 1.0], extrapolate=False)
    assert averaged.value == pytest.approx(1.05)
    assert not averaged.extrapolated


def test_staircase_recovers_exponential_growth():
    # N(T) = floor(e^{T}) periods, no orbit correction
    periods = np.log(np.arange(1, 20001, dtype=np.float64))
    config = WindowConfig(orbit_correction=False, extrapolate=False, min_classes=10)
    fit = staircase_fit(periods, float(periods.max()), config)
    assert fit.value == pytest.approx(1.0, abs=1e-3)


def test_staircase_needs_classes():
    with pytest.raises(EstimationError, match="too few classes"):
        staircase_fit(np.array([1.0, 2.0, 3.0]), 3.0, WindowConfig(min_classes=10))


def test_shell_sums_skip_empty_shells():
    periods = np.array([0.5, 0.6, 3.5])
    centers, values = shell_sums(periods, np.zeros(3), 4.0, WindowConfig(bins=4, orbit_correction=False))
    assert centers.tolist() == [0.5, 3.5]
    assert values == pytest.approx([np.log(2.0), 0.0])


def test_rank_windows_start_at_count_powers():
    periods = np.arange(1.0, 101.0)
    windows = list(rank_windows(periods, (0.5, 0.75)))
    assert windows == [(9, 10.0), (31, 32.0)]
    with pytest.raises(EstimationError, match="too few classes"):
        list(rank_windows(np.zeros(0), (0.5,)))


def test_window_fits_are_scale_equivariant():
    rng = np.random.default_rng(1)
    periods = np.log(np.arange(2, 3001, dtype=np.float64)) + 0.01 * rng.random(2999)
    t_cut = float(np.max(periods))
    config = WindowConfig(min_classes=10, bins=12)
    staircase = staircase_fit(periods, t_cut, config)
    scaled = staircase_fit(3.0 * periods, 3.0 * t_cut, config)
    assert scaled.value == pytest.approx(staircase.value / 3.0, rel=1e-12)
    weights = -0.5 * periods
    shells = shell_fit(periods, weights, t_cut, config, average=True)
    assert shell_fit(3.0 * periods, weights, 3.0 * t_cut, config, average=True).value == pytest.approx(shells.value / 3.0, rel=1e-9)


def test_shell_averages_divide_by_counts():
    periods = np.array([0.5, 0.6, 3.5])
    _, values = shell_sums(periods, np.zeros(3), 4.0, WindowConfig(bins=4), average=True)
    assert values == pytest.approx([0.0, 0.0])
