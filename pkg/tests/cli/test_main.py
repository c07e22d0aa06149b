import csv
import json

import pytest

from anosov_lab.cli.main import LabCLI, RunRecord, config_digest
from anosov_lab.configs.run import RunConfig
from anosov_lab.exceptions import EstimationError


@pytest.fixture
def cli():
    return LabCLI()


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


def test_list_prints_inventory(cli, capsys):
    assert cli.main(["--list"]) == 0

    output = capsys.readouterr().out
    assert "Commands:" in output
    assert "Verification suites:" in output
    assert "  - cyclic" in output


def test_list_for_verify_shows_only_suites(cli, capsys):
    assert cli.main(["verify", "--list"]) == 0

    output = capsys.readouterr().out
    assert "Verification suites:" in output
    assert "Commands:" not in output


def test_spectrum_of_cyclic_fixture(cli, tmp_path, capsys):
    # Execute
    code = cli.main(["spectrum", "--fixture", "cyclic", "--out", str(tmp_path), "--no-history"])

    # Verify
    assert code == 0
    rows = read_rows(tmp_path / "spectrum.csv")
    assert rows[0] == ["class", "core_length", "primitive", "rho:a1"]
    assert [row[0] for row in rows[1:]] == ["a", "A"]
    assert str(tmp_path / "spectrum.csv") in capsys.readouterr().out


def test_outputs_do_not_depend_on_threads(cli, tmp_path):
    # Setup
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"max_len": 5}))
    outputs = []

    # Execute
    for threads in ("1", "3"):
        out = tmp_path / f"threads_{threads}"
        argv = ["spectrum", "--fixture", "schottky_symmetric", "--config", str(config)]
        assert cli.main(argv + ["--threads", threads, "--out", str(out), "--no-history"]) == 0
        outputs.append((out / "spectrum.csv").read_bytes())

    # Verify
    assert outputs[0] == outputs[1]


def test_missing_command_is_a_configuration_error(cli, tmp_path):
    assert cli.main(["--fixture", "cyclic", "--out", str(tmp_path), "--no-history"]) == 2


def test_extra_config_field_is_rejected(cli, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"max_len": 4, "unknown_key": 1}))

    assert cli.main(["spectrum", "--config", str(config), "--no-history"]) == 2


def test_unreadable_config_is_rejected(cli, tmp_path):
    config = tmp_path / "run.json"
    config.write_text("{not json")

    assert cli.main(["spectrum", "--config", str(config), "--no-history"]) == 2
    assert cli.main(["spectrum", "--config", str(tmp_path / "missing.json"), "--no-history"]) == 2


def test_unknown_fixture_is_rejected(cli):
    assert cli.main(["spectrum", "--fixture", "no_such_fixture", "--no-history"]) == 2


def test_numeric_failure_exit_code(cli, tmp_path, mocker):
    # Setup
    mocker.patch("anosov_lab.cli.commands.spectrum_table", side_effect=EstimationError("too few classes"))

    # Execute
    code = cli.main(["spectrum", "--fixture", "cyclic", "--out", str(tmp_path), "--no-history"])

    # Verify
    assert code == 3
    assert not (tmp_path / "spectrum.csv").exists()


def test_failed_verification_exit_code(cli, tmp_path, capsys):
    # Execute
    argv = ["verify", "--fixture", "unipotent", "--suite", "certificates", "--out", str(tmp_path), "--no-history"]
    code = cli.main(argv)

    # Verify
    assert code == 4
    report = json.loads((tmp_path / "verify_certificates.json").read_text())
    assert report["suite"] == "certificates"
    assert report["passed"] is False
    assert report["settings"]["fixture"] == "unipotent"
    assert "=== Verification suite: certificates ===" in capsys.readouterr().out


def test_verify_without_suite(cli, tmp_path):
    assert cli.main(["verify", "--fixture", "cyclic", "--out", str(tmp_path), "--no-history"]) == 2


def test_run_is_recorded(cli, tmp_path, mocker):
    # Setup
    history_cls = mocker.patch("anosov_lab.cli.main.RunHistory")
    mocker.patch("anosov_lab.cli.main.ensure_lab_dir")

    # Execute
    code = cli.main(["spectrum", "--fixture", "cyclic", "--out", str(tmp_path)])

    # Verify
    assert code == 0
    history = history_cls.return_value
    history.add_run.assert_called_once()
    command, digest, outputs, exit_code = history.add_run.call_args.args
    assert command == "spectrum"
    assert len(digest) == 64
    assert outputs == [str(tmp_path / "spectrum.csv")]
    assert exit_code == 0
    history.close.assert_called_once()


def test_failed_run_is_recorded_with_its_exit_code(cli, tmp_path, mocker):
    history_cls = mocker.patch("anosov_lab.cli.main.RunHistory")
    mocker.patch("anosov_lab.cli.main.ensure_lab_dir")

    assert cli.main(["spectrum", "--fixture", "no_such_fixture", "--out", str(tmp_path)]) == 2

    assert history_cls.return_value.add_run.call_args.args[3] == 2


def test_history_failure_does_not_change_exit_code(cli, tmp_path, mocker):
    mocker.patch("anosov_lab.cli.main.ensure_lab_dir", side_effect=OSError("read-only"))

    assert cli.main(["spectrum", "--fixture", "cyclic", "--out", str(tmp_path)]) == 0


def test_config_digest_ignores_threads_and_output():
    first = RunConfig(command="spectrum", max_len=4, threads=1, out_dir="a")
    second = RunConfig(command="spectrum", max_len=4, threads=8, out_dir="b")
    third = RunConfig(command="spectrum", max_len=5)

    assert config_digest(first) == config_digest(second)
    assert config_digest(first) != config_digest(third)


def test_record_defaults():
    record = RunRecord()
    assert record.command == ""
    assert record.outputs == []
