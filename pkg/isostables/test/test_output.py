import json
import math

import numpy as np
from pydantic import BaseModel

from isostables.core.errors import ConfigError, ExitCode, Nonhyperbolic, ZeroProjection, handle_cli_errors
from isostables.core.output import dumps, format_float, write_csv
from isostables.laplace.models import Status


def test_floats_keep_round_trip_precision():
    assert format_float(0.1) == "0.10000000000000001"
    assert float(format_float(1.0 / 3.0)) == 1.0 / 3.0
    assert format_float(math.nan) == "nan"
    assert format_float(-math.inf) == "-inf"


def test_dumps_encodes_special_values():
    assert dumps({"a": math.nan, "z": 1 + 2j}) == '{"a": null, "z": {"re": 1, "im": 2}}'
    assert dumps([Status.CONVERGED, np.int64(3), np.array([0.5, 2.0])]) == '["Converged", 3, [0.5, 2]]'
    assert json.loads(dumps({"inf": math.inf, "flag": np.bool_(True)})) == {"inf": None, "flag": True}


def test_dumps_pydantic_models():
    class Point(BaseModel):
        x: float
        label: str

    assert json.loads(dumps(Point(x=0.25, label="p"), indent=2)) == {"x": 0.25, "label": "p"}


def test_csv_cells(capsys):
    write_csv(["t", "x1", "status"], [[0.0, 0.1, Status.DIVERGED], [1.0, math.nan, "Converged"]])
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["t,x1,status", "0,0.10000000000000001,Diverged", "1,nan,Converged"]


def test_error_detail():
    detail = ZeroProjection(projection=0.0).detail
    assert detail["error_code"] == "zero_projection"
    assert detail["projection"] == 0.0
    assert "resolution" in detail

    custom = ConfigError("Grid is missing", section="grid")
    assert custom.detail["message"] == "Grid is missing"
    assert custom.exit_code is ExitCode.CONFIG_ERROR


def test_cli_handler_maps_errors_to_exit_codes(capsys):
    @handle_cli_errors
    def numeric():
        raise Nonhyperbolic(eigenvalues=np.array([1j, -1j]))

    @handle_cli_errors
    def invalid_json():
        json.loads("{not json")

    @handle_cli_errors
    def invalid_schema():
        class Strict(BaseModel):
            count: int

        Strict(count="many")

    assert numeric() is ExitCode.NUMERIC_FAILURE
    report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert report["error_code"] == "nonhyperbolic"
    assert report["eigenvalues"] == [{"re": 0, "im": 1}, {"re": 0, "im": -1}]

    assert invalid_json() is ExitCode.CONFIG_ERROR
    assert invalid_schema() is ExitCode.CONFIG_ERROR
    assert '"error_code": "invalid_config"' in capsys.readouterr().err

