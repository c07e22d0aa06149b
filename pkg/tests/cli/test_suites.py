import json

import pytest

from anosov_lab.cli.suites import (
    SUITE_DESCRIPTIONS,
    SUITES,
    Criterion,
    SuiteReport,
    certificates_suite,
    cmd_verify,
    guarded,
    linalg_suite,
)
from anosov_lab.configs.run import RunConfig
from anosov_lab.exceptions import ConfigurationError, EstimationError, VerificationError
from anosov_lab.fixtures import load_fixture


def fixture_run(name, tmp_path, **overrides):
    return RunConfig(**{**load_fixture(name), "fixture": name, "out_dir": str(tmp_path), **overrides})


def test_every_suite_is_described():
    assert set(SUITES) == set(SUITE_DESCRIPTIONS)


def test_report_passes_only_when_every_criterion_passes():
    report = SuiteReport("oracles", [Criterion("a", True, 0.1, 1.0), Criterion("b", True)])
    assert report.passed
    report.criteria.append(Criterion("c", False))
    assert not report.passed
    assert report.results() == {"a": True, "b": True, "c": False}
    assert report.to_dict()["criteria"][0] == {"name": "a", "passed": True, "value": 0.1, "threshold": 1.0, "detail": {}}


def test_guarded_turns_numeric_errors_into_failures():
    report = SuiteReport("oracles")

    def broken():
        raise EstimationError("too few classes")

    criterion = guarded(report, "broken", broken)

    assert criterion.passed is False
    assert criterion.detail == {"error": "EstimationError: too few classes"}
    assert report.criteria == [criterion]


def test_guarded_lets_other_errors_through():
    report = SuiteReport("oracles")

    def broken():
        raise KeyError("bug")

    with pytest.raises(KeyError):
        guarded(report, "broken", broken)


def test_linalg_suite_criteria(tmp_path, mocker):
    mocker.patch("anosov_lab.cli.suites.LINALG_SAMPLES", 8)
    run = RunConfig(out_dir=str(tmp_path))

    report = linalg_suite(run, run.lab_config(), 1)

    names = [c.name for c in report.criteria]
    assert names == sorted(["cartan_inverse", "conjugation", "jordan_inverse", "power", "sym", "wedge"])
    assert all(c.detail["samples"] == 8 for c in report.criteria)


def test_certificates_suite_on_schottky_group(tmp_path):
    run = fixture_run("schottky_symmetric", tmp_path, max_len=8)

    report = certificates_suite(run, run.lab_config(), 2)

    assert report.results() == {"anosov[a1]": True, "limit_cone_positive": True}


def test_certificates_suite_on_unipotent_generator(tmp_path):
    run = fixture_run("unipotent", tmp_path)

    report = certificates_suite(run, run.lab_config(), 1)

    assert report.results()["anosov[a1]"] is False
    assert not report.passed


def test_verify_writes_report(tmp_path, mocker, capsys):
    # Setup
    report = SuiteReport("linalg", [Criterion("power", True, 0.0, 1e-9)])
    mocker.patch.dict("anosov_lab.cli.suites.SUITES", {"linalg": lambda run, lab, threads: report})
    run = RunConfig(out_dir=str(tmp_path), suite="linalg", command="verify")

    # Execute
    [path] = cmd_verify(run, run.lab_config(), 1)

    # Verify
    payload = json.loads(open(path).read())
    assert payload["passed"] is True
    assert payload["settings"]["suite"] == "linalg"
    assert "power: PASS" in capsys.readouterr().out


def test_verify_failure_raises(tmp_path, mocker):
    report = SuiteReport("linalg", [Criterion("power", False, 1.0, 1e-9), Criterion("wedge", True)])
    mocker.patch.dict("anosov_lab.cli.suites.SUITES", {"linalg": lambda run, lab, threads: report})
    run = RunConfig(out_dir=str(tmp_path), suite="linalg", command="verify")

    with pytest.raises(VerificationError, match="1 of 2 criteria failed"):
        cmd_verify(run, run.lab_config(), 1)
    assert (tmp_path / "verify_linalg.json").exists()


def test_verify_needs_a_suite(tmp_path):
    run = RunConfig(out_dir=str(tmp_path), command="verify")
    with pytest.raises(ConfigurationError):
        cmd_verify(run, run.lab_config(), 1)
