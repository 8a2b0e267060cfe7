import json

import pytest
from pydantic import ValidationError

from isostables.core.schemas import RunConfig, load_config
from isostables.main import main

DIAGONAL = {
    "model": "linear",
    "matrix": [[-1.0, 0.0], [0.0, -3.0]],
    "grid": {"bounds": [[-1.0, 1.0], [-1.0, 1.0]], "resolution": [5, 5]},
    "integration": {"horizon": 30.0},
    "trajectory": {"x0": [1.0, 1.0], "times": [0.0, 1.0, 2.0]},
    "contour": {"quantity": "magnitude", "levels": [0.5, 5.0]},
    "validate": {"samples": 5},
}


@pytest.fixture
def write_config(tmp_path):
    def write(data, name="config.json"):
        path = tmp_path / name
        path.write_text(data if isinstance(data, str) else json.dumps(data), encoding="utf-8")
        return str(path)

    return write


def run(*argv):
    return main([*argv, "--log-level", "WARNING"])


def test_spectrum_command(write_config, capsys):
    assert run("spectrum", "--config", write_config(DIAGONAL)) == 0

    report = json.loads(capsys.readouterr().out)
    assert report["leading_class"] == "Real"
    assert report["sigma1"] == -1
    assert len(report["eigenpairs"]) == 2


def test_fixed_point_command(write_config, tmp_path):
    output = tmp_path / "fp.json"
    assert run("fixed-point", "--config", write_config(DIAGONAL), "--output", str(output)) == 0
    assert json.loads(output.read_text(encoding="utf-8"))["location"] == [0, 0]


@pytest.mark.parametrize("config", [
    "{not json",
    json.dumps({**DIAGONAL, "colour": "red"}),
    json.dumps({"model": "van_der_pol"}),
    json.dumps({**DIAGONAL, "laplace": {"integration": {"horizon": 5.0}}}),
])
def test_bad_configs_exit_with_config_error(write_config, config):
    assert run("spectrum", "--config", write_config(config)) == 2


def test_missing_config_file(tmp_path):
    assert run("spectrum", "--config", str(tmp_path / "missing.json")) == 2


def test_nonhyperbolic_fixed_point_is_a_numeric_failure(write_config, capsys):
    config = {"model": "linear", "matrix": [[0.0, 1.0], [-1.0, 0.0]]}
    assert run("spectrum", "--config", write_config(config)) == 3
    assert '"error_code": "nonhyperbolic"' in capsys.readouterr().err


def test_field_then_contour(write_config, tmp_path, capsys):
    config = write_config(DIAGONAL)
    field_csv = tmp_path / "out" / "field.csv"

    assert run("field", "--config", config, "--output", str(field_csv), "--workers", "1", "--no-timestamp") == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["points"] == 25 and summary["converged"] == 25
    header = json.loads(field_csv.with_suffix(".json").read_text(encoding="utf-8"))
    assert "created_at" not in header

    assert run("contour", "--config", config, "--field", str(field_csv), "--no-timestamp") == 0
    result = json.loads(capsys.readouterr().out)
    assert result["empty_levels"] == [5.0]
    index = json.loads((tmp_path / "out" / "contours" / "index.json").read_text(encoding="utf-8"))
    assert index["levels"] == [0.5, 5.0]
    assert "created_at" not in index


def test_contour_needs_a_field(write_config):
    assert run("contour", "--config", write_config(DIAGONAL)) == 2


def test_field_needs_a_grid(write_config):
    config = {key: value for key, value in DIAGONAL.items() if key != "grid"}
    assert run("field", "--config", write_config(config)) == 2


def test_field_with_observable_orthogonal_to_v1(write_config, tmp_path, capsys):
    config = {**DIAGONAL, "laplace": {"observable": [0.0, 1.0]}}
    field_csv = tmp_path / "field.csv"
    assert run("field", "--config", write_config(config), "--output", str(field_csv), "--workers", "1") == 2
    assert '"error_code": "zero_projection"' in capsys.readouterr().err
    assert not field_csv.exists()


def test_trajectory_command(write_config, tmp_path):
    output = tmp_path / "trajectory.csv"
    assert run("trajectory", "--config", write_config(DIAGONAL), "--output", str(output)) == 0

    lines = output.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "t,x1,x2"
    assert len(lines) == 4
    assert lines[1] == "0,1,1"


def test_trajectory_escape_is_measured_from_the_fixed_point(write_config, tmp_path):
    # the sinks of Lorenz rho=2 sit about 2.5 from the origin
    config = {
        "model": "lorenz",
        "params": {"a": 10.0, "rho": 2.0, "b": 8.0 / 3.0},
        "guess": [1.0, 1.0, 1.0],
        "integration": {"escape_radius": 1.0},
        "trajectory": {"x0": [1.68, 1.68, 1.05], "times": [0.0, 1.0, 2.0]},
    }
    output = tmp_path / "trajectory.csv"
    assert run("trajectory", "--config", write_config(config), "--output", str(output)) == 0
    assert len(output.read_text(encoding="utf-8").splitlines()) == 4


def test_validate_passes_on_linear_system(write_config, tmp_path):
    output = tmp_path / "report.json"
    assert run("validate", "--config", write_config(DIAGONAL), "--output", str(output), "--no-timestamp") == 0

    report = json.loads(output.read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert report["created_at"] is None
    assert {check["name"] for check in report["checks"]} >= {"linear_oracle", "generalized_oracle"}


def test_validate_reports_failed_anchor(write_config, tmp_path):
    config = {**DIAGONAL, "validate": {
        "anchors": [{"v": 0.5, "v_prime": 1.0, "expected": 100.0}],
        "checks": ["tau_difference_anchor"],
    }}
    output = tmp_path / "report.json"
    assert run("validate", "--config", write_config(config), "--output", str(output)) == 1

    report = json.loads(output.read_text(encoding="utf-8"))
    assert report["passed"] is False
    assert report["checks"][0]["name"] == "tau_difference_anchor"


def test_validate_rejects_unknown_checks(write_config, capsys):
    config = {**DIAGONAL, "validate": {"checks": ["curvature"]}}
    assert run("validate", "--config", write_config(config)) == 2
    assert '"error_code": "invalid_config"' in capsys.readouterr().err


def test_workers_must_be_positive(write_config):
    with pytest.raises(SystemExit):
        run("field", "--config", write_config(DIAGONAL), "--workers", "0")


# ===============================================
# Run configs
# ===============================================

def test_run_config_merges_integration_options(write_config):
    config = load_config(write_config(DIAGONAL))
    assert config.laplace_options().integration.horizon == 30.0
    assert config.validate_.samples == 5


def test_run_config_rejections():
    with pytest.raises(ValidationError):
        RunConfig.model_validate({**DIAGONAL, "laplace": {"integration": {"horizon": 5.0}}})
    with pytest.raises(ValidationError):
        RunConfig.model_validate({**DIAGONAL, "contour": {"quantity": "magnitude"}})
    with pytest.raises(ValidationError):
        RunConfig.model_validate({**DIAGONAL, "grid": {"bounds": [[1.0, -1.0], [-1.0, 1.0]], "resolution": [5, 5]}})
