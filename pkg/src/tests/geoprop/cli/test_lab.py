from __future__ import annotations

import json

import pytest

from cli.lab import config_data, main, parse_args
from geoprop.core.config import LabSettings
from geoprop.core.errors import ConfigError


@pytest.fixture
def quiet_settings(tmp_path) -> LabSettings:
    return LabSettings(_env_file=None, log_json=False, log_level="CRITICAL", output_dir=tmp_path)


def test_flags_mirror_config_fields():
    args = parse_args(
        [
            "slice",
            "--manifold",
            "sphere2:1",
            "--slices",
            "4",
            "8",
            "--policy",
            "rho-n",
            "--function",
            "1:1",
            "--function",
            "2:0:0.5:-1",
            "--no-runtime",
        ]
    )

    data = config_data(args)

    assert data["study"] == "slice"
    assert data["slices"] == [4, 8]
    assert data["policy"] == "rho-n"
    assert data["function"] == [
        {"level": 1, "mode": 1, "amplitude": (1.0, 0.0)},
        {"level": 2, "mode": 0, "amplitude": (0.5, -1.0)},
    ]
    assert data["record_runtime"] is False
    assert "t" not in data


def test_flags_override_config_file(tmp_path):
    path = tmp_path / "limit.json"
    path.write_text(json.dumps({"study": "curvature-limit", "manifold": "torus:1,1", "t": 2.0}))

    data = config_data(parse_args(["curvature-limit", "--config", str(path), "--manifold", "sphere2:1"]))

    assert data["manifold"] == "sphere2:1"
    assert data["t"] == 2.0
    assert data["name"] == "limit"


def test_config_study_must_match_command(tmp_path):
    path = tmp_path / "limit.json"
    path.write_text(json.dumps({"study": "curvature-limit"}))

    with pytest.raises(ConfigError) as excinfo:
        config_data(parse_args(["oracle", "--config", str(path)]))

    assert excinfo.value.field == "study"


def test_malformed_function_term():
    with pytest.raises(ConfigError) as excinfo:
        config_data(parse_args(["single-step", "--function", "one"]))

    assert excinfo.value.field == "function"


def test_successful_command_prints_envelope(quiet_settings, tmp_path, capsys):
    code = main(
        [
            "curvature-limit",
            "--manifold",
            "sphere2:1",
            "--output-dir",
            str(tmp_path / "out"),
            "--emit",
            "csv",
        ],
        settings=quiet_settings,
    )

    payload = json.loads(capsys.readouterr().out)

    assert code == 0
    assert payload["status"] == "success"
    assert payload["command"] == "curvature-limit"
    assert payload["passed"] is True
    assert payload["data"]["fitted"]["laplacian"] == pytest.approx(1 / 3, abs=1e-4)
    assert (tmp_path / "out" / "experiment.csv").exists()


def test_failed_check_exits_one(quiet_settings, tmp_path, capsys):
    code = main(
        [
            "single-step",
            "--manifold",
            "circle:1",
            "--function",
            "1",
            "--energy-max",
            "1",
            "--times",
            "0.05",
            "0.025",
            "0.0125",
            "--expected-slope",
            "-3",
            "--slope-tolerance",
            "0.1",
            "--output-dir",
            str(tmp_path),
            "--emit",
            "json",
        ],
        settings=quiet_settings,
    )

    assert code == 1
    assert json.loads(capsys.readouterr().out)["passed"] is False


def test_config_error_goes_to_stderr_with_exit_code(quiet_settings, capsys):
    code = main(["curvature-limit", "--manifold", "sphere3:1"], settings=quiet_settings)

    captured = capsys.readouterr()
    envelope = json.loads(captured.err)

    assert code == 2
    assert captured.out == ""
    assert envelope["status"] == "error"
    assert envelope["error"]["code"] == "config.manifold"
    assert envelope["error"]["details"]["field"] == "manifold"


def test_verify_all_summarizes_reports(quiet_settings, tmp_path, capsys):
    directory = tmp_path / "configs"
    directory.mkdir()
    (directory / "one.json").write_text(json.dumps({"study": "curvature-limit", "manifold": "sphere2:1"}))

    code = main(["verify-all", str(directory), "--output-dir", str(tmp_path / "out")], settings=quiet_settings)

    payload = json.loads(capsys.readouterr().out)

    assert code == 0
    assert payload["data"]["reports"][0]["name"] == "one"
    assert payload["data"]["reports"][0]["failed_checks"] == []
