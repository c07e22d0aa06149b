import pytest
from pydantic import ValidationError

from anosov_lab.configs.base import DEFAULT_CONFIG, LabConfig, WindowConfig, resolve
from anosov_lab.configs.run import GridSpec, RunConfig
from anosov_lab.words import check_budget, element_count


def test_defaults():
    run = RunConfig()
    assert run.command is None
    assert run.max_len == 10
    assert run.functionals == ["a1"]
    assert run.exponent_method == "both"


def test_extra_fields_rejected():
    with pytest.raises(ValidationError) as e:
        RunConfig(command="spectrum", max_length=8)
    assert "Extra fields not allowed: max_length" in str(e.value)


@pytest.mark.parametrize(
    "overrides",
    [
        {"command": "plot"},
        {"max_len": 0},
        {"functionals": []},
        {"tolerances": {"epsilon": 1.0}},
        {"ppm": (0, 10)},
        {"threads": 0},
        {"suite": "everything"},
    ],
)
def test_invalid_values_rejected(overrides):
    with pytest.raises(ValidationError):
        RunConfig(**overrides)


def test_tolerances_reach_lab_config():
    # Setup
    run = RunConfig(
        tolerances={"mu_min": 0.2, "condition_threshold": 1e10, "variance_step": 0.005},
        windows={"min_classes": 50},
        seed=7,
        threads=3,
    )

    # Execute
    lab = run.lab_config()

    # Verify
    assert lab.anosov.mu_min == 0.2
    assert lab.linalg.condition_threshold == 1e10
    assert lab.calculus.variance_step == 0.005
    assert lab.windows.min_classes == 50
    assert lab.seed == 7
    assert lab.threads == 3
    assert lab.linalg.proximal_gap == DEFAULT_CONFIG.linalg.proximal_gap


def test_grid_spec_center():
    assert GridSpec(center=[0.1, -0.2]).center_value == complex(0.1, -0.2)
    assert GridSpec().center_value == 0j
    with pytest.raises(ValidationError):
        GridSpec(n=5)
    with pytest.raises(ValidationError):
        GridSpec(ds=0.0)


@pytest.mark.parametrize("fractions", [(), (0.5, 1.0), (0.75, 0.5)])
def test_window_fractions_validated(fractions):
    with pytest.raises(ValidationError):
        WindowConfig(fractions=fractions)


def test_resolve():
    config = LabConfig(seed=3)
    assert resolve(config) is config
    assert resolve(None) is DEFAULT_CONFIG


def test_budget_and_residual_overrides():
    # Setup
    run = RunConfig(tolerances={"budget": 10**10, "spectrum_residual": 1e-6})

    # Execute
    lab = run.lab_config()

    # Verify
    assert lab.enumeration.budget == 10**10
    assert isinstance(lab.enumeration.budget, int)
    assert lab.linalg.spectrum_residual == 1e-6


def test_default_budget_covers_length_eighteen():
    total = sum(element_count(2, n) for n in range(1, 19))
    assert total <= DEFAULT_CONFIG.enumeration.budget
    check_budget(2, 18, DEFAULT_CONFIG.enumeration.budget)
