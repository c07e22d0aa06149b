import json
from types import SimpleNamespace

import numpy as np
import pytest

from anosov_lab.calculus.fields import GridSpectrum, ScalarField
from anosov_lab.calculus.forms import (
    certify_center,
    degenerate_direction_check,
    export_report,
    master_identity_check,
    pluriharmonicity_residual,
    pressure_form,
    pressure_form_components,
)
from anosov_lab.configs.base import LabConfig, WindowConfig
from anosov_lab.exceptions import VerificationError
from anosov_lab.fixtures import load_fixture
from anosov_lab.reps.grid import grid_builder
from anosov_lab.utils.factory import FamilyFactory

CONFIG = LabConfig(windows=WindowConfig(min_classes=20))


def build_spectra(name, max_len=8):
    family = FamilyFactory.from_dict(load_fixture(name)["family"])
    return GridSpectrum(grid_builder(family, 0.0, 0.05, 0.05, 1), ["a1"], max_len, CONFIG)


@pytest.fixture(scope="module")
def bending_spectra():
    return build_spectra("bending")


def test_certified_center(bending_spectra):
    certificate = certify_center(bending_spectra.grid, CONFIG)
    assert certificate.passed


def test_uncertified_center_raises():
    family = FamilyFactory.from_dict(load_fixture("unipotent")["family"])
    grid = grid_builder(family, 0.0, 0.05, 0.05, 1)
    with pytest.raises(VerificationError, match="not Anosov-certified"):
        certify_center(grid, CONFIG)


def test_pressure_form_second_difference(bending_spectra, mocker):
    # Setup
    mocker.patch(
        "anosov_lab.calculus.forms.renormalized_intersection",
        side_effect=[SimpleNamespace(value=1.02, spread=1e-4), SimpleNamespace(value=1.01, spread=2e-4)],
    )

    # Execute
    form = pressure_form(bending_spectra, "a1", "s", certify=False)

    # Verify
    assert form.value == pytest.approx(0.03 / 0.05**2)
    assert form.spread == pytest.approx(3e-4 / 0.05**2)
    assert (form.j_plus, form.j_minus) == (1.02, 1.01)
    assert form.axis == "s"


def test_pluriharmonic_field(bending_spectra, mocker):
    harmonic = ScalarField.from_function(bending_spectra.geometry, lambda s, t: 1.0 + s * s - t * t)
    mocker.patch.object(bending_spectra, "intersection_field", return_value=harmonic)
    report = pluriharmonicity_residual(bending_spectra, certify=False)
    assert report.residual == pytest.approx(0.0, abs=1e-9)
    assert report.i_ss == pytest.approx(2.0)
    assert not report.flagged


def test_degenerate_direction_on_symmetric_grid(bending_spectra):
    report = degenerate_direction_check(bending_spectra, sample=10)
    assert report.max_derivative == 0.0
    assert len(report.derivatives) == 10
    assert report.axis == "t"


def test_pressure_form_components_along_imaginary_axis(bending_spectra):
    components = pressure_form_components(bending_spectra, "a1", "t", certify=False)

    assert components.h_first == 0.0
    assert components.assembled == components.assembled_measured
    assert components.h0 == bending_spectra.entropy_field(0).center
    assert np.isfinite(components.direct)


def test_master_identity_report(bending_spectra, tmp_path):
    # Execute
    report = master_identity_check(bending_spectra)
    json_path, csv_path = tmp_path / "master_identity.json", tmp_path / "pressure_h.csv"
    export_report(report, str(json_path), str(csv_path))

    # Verify
    assert report.h_t == 0.0
    assert report.h0 > 0
    assert np.isfinite(report.residual)
    assert report.functional == "a1"
    payload = json.loads(json_path.read_text())
    assert payload["settings"]["max_len"] == 8
    assert len(payload["h_grid"]) == 3
    assert sum(payload["intersection_signature"]["signature"]) == 2
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "is,it,s,t,h"
    assert len(rows) == 10


def test_master_identity_needs_symmetric_grid():
    spectra = build_spectra("complex_disks", max_len=6)
    with pytest.raises(VerificationError, match="conjugation-symmetric"):
        master_identity_check(spectra)
