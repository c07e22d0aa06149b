from datetime import datetime

import pytest

from anosov_lab.storage import RunHistory


@pytest.fixture
def history():
    store = RunHistory(":memory:")
    yield store
    store.close()


def test_add_and_get_run(history):
    # Setup
    run_id = history.add_run("spectrum", "abc123", ["out/spectrum.csv"], 0)

    # Execute
    runs = history.get_runs()

    # Verify
    assert len(runs) == 1
    assert runs[0]["id"] == run_id
    assert runs[0]["command"] == "spectrum"
    assert runs[0]["config_digest"] == "abc123"
    assert runs[0]["outputs"] == ["out/spectrum.csv"]
    assert runs[0]["exit_code"] == 0


def test_timestamps_are_utc(history):
    history.add_run("exponent", "d", [], 3)
    created = datetime.fromisoformat(history.get_runs()[0]["created_at"])
    assert created.utcoffset().total_seconds() == 0


def test_runs_filtered_by_command_in_time_order(history):
    history.add_run("verify", "d2", [], 4, created_at="2026-01-02T00:00:00+00:00")
    history.add_run("spectrum", "d1", ["a.csv", "b.csv"], 0, created_at="2026-01-01T00:00:00+00:00")
    history.add_run("verify", "d3", [], 0, created_at="2026-01-03T00:00:00+00:00")

    verify_runs = history.get_runs(command="verify")
    assert [r["config_digest"] for r in verify_runs] == ["d2", "d3"]
    assert [r["command"] for r in history.get_runs()] == ["spectrum", "verify", "verify"]
    assert history.get_runs(command="spectrum")[0]["outputs"] == ["a.csv", "b.csv"]


def test_reset_empties_history(history):
    history.add_run("spectrum", "d", [], 0)
    history.reset()
    assert history.get_runs() == []
    history.add_run("limitset", "d", [], 0)
    assert len(history.get_runs()) == 1


def test_history_on_disk(tmp_path):
    path = str(tmp_path / "history.db")
    first = RunHistory(path)
    first.add_run("dimension", "d", ["dimension.json"], 0)
    first.close()

    second = RunHistory(path)
    assert second.get_runs()[0]["outputs"] == ["dimension.json"]
    second.close()
